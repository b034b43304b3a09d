import math
from dataclasses import replace

import numpy as np
import pytest

from catbypass import metrics
from catbypass.dyad import DyadLayout, hybrid_ket
from catbypass.errors import ContractError
from catbypass.protocols import (
    Gate,
    apply_gate,
    bypass_2scs,
    bypass_ecs,
    make_2scs,
    make_ecs,
    run_protocol,
    unprotected,
)


def test_fidelity_pure_projector():
    psi = make_2scs(0.6, 0.8j, 1.5)
    assert metrics.fidelity_pure_mixed(psi, psi.to_density()) \
        == pytest.approx(1.0, abs=1e-12)


def test_fidelity_orthogonal_states():
    lay = DyadLayout(0, 1)
    g = hybrid_ket(lay, [(1.0, (0,), ())])
    e = hybrid_ket(lay, [(1.0, (1,), ())])
    assert metrics.fidelity_pure_mixed(g, e.to_density()) \
        == pytest.approx(0.0, abs=1e-12)


def test_fidelity_matches_uhlmann_on_fock():
    from catbypass.channels import LossChannel, apply_loss
    psi = make_2scs(1.0, 1.0, 2.0)
    rho = apply_loss(psi.to_density(), LossChannel(0.96, 0))
    via_gram = metrics.fidelity_pure_mixed(psi, rho)
    dim = 42
    rho_f = rho.to_fock([dim]).entries
    psi_f = psi.to_fock([dim]).entries
    via_uhlmann = metrics.uhlmann_fidelity_fock(np.outer(psi_f, psi_f.conj()),
                                                rho_f)
    # the matrix square roots cost half the working precision near zero
    # eigenvalues, so the achievable agreement floor sits near sqrt(eps)
    assert via_gram == pytest.approx(via_uhlmann, abs=5e-7)


def test_channel_fidelity_identity_protocol():
    f, prob = metrics.channel_fidelity(unprotected(1), 3.0, 1.0, 0.0)
    assert f == pytest.approx(1.0, abs=1e-9)
    assert prob == pytest.approx(1.0)


def test_channel_fidelity_unitary_protocols_at_no_noise():
    from catbypass.protocols import bypass_2scs_sine
    for alpha in (2.0, 5.0):
        for build in (bypass_2scs, bypass_2scs_sine):
            f, _ = metrics.channel_fidelity(build(alpha), alpha, 1.0, 0.0)
            assert f == pytest.approx(1.0, abs=1e-9)


def test_blockage_channel_fidelity_formula():
    for alpha in (4.0, 6.0, 8.0):
        f, _ = metrics.channel_fidelity(bypass_2scs(alpha), alpha, 0.0, 0.0)
        assert abs(f - metrics.blockage_channel_fidelity(alpha)) < 0.01


def test_wigner_cross_section_axes():
    rho = make_2scs(1.0, -1.0, 2.0).to_density()
    grid_p = metrics.wigner_cross_section(rho, 0, "P", 3.0, 0.05)
    grid_x = metrics.wigner_cross_section(rho, 0, "X", 4.0, 0.05)
    # fringes oscillate along P; lobes sit at x = +-sqrt(2) alpha
    assert grid_p.values.min() < -0.5
    peak_x = grid_x.points[int(np.argmax(grid_x.values))]
    assert abs(abs(peak_x) - math.sqrt(2.0) * 2.0) < 0.1


def test_negative_peak_vacuum_has_no_negativity():
    rho = hybrid_ket(DyadLayout(1, 0), [(1.0, (), (0.0,))]).to_density()
    _, depth = metrics.negative_peak(rho, 0, 2.0)
    assert depth >= -1e-12


def test_negative_peak_depth_respects_parity_bound():
    rho, _ = run_protocol(bypass_2scs(3.0), make_2scs(1.0, -1.0, 3.0), 0.9, 0.2)
    _, depth = metrics.negative_peak(rho, 0, 2.0)
    assert depth >= -2.0 / math.pi - 1e-6


def test_protected_peak_first_order_law():
    alpha = 6.0
    spec = bypass_2scs(alpha)
    for one_minus_eta in (0.0, 0.02, 0.05):
        for p in (0.0, 0.1):
            rho, _ = run_protocol(spec, make_2scs(1.0, -1.0, alpha),
                                  1.0 - one_minus_eta, p)
            law = metrics.protected_peak_depth_expansion(alpha,
                                                         1.0 - one_minus_eta, p)
            assert abs(rho.wigner(0, 0.0j) - law) < 0.01


def test_unprotected_peak_closed_form():
    alpha = 6.0
    for eta in (0.99, 0.9):
        rho, _ = run_protocol(unprotected(1), make_2scs(1.0, -1.0, alpha),
                              eta, 0.0)
        assert abs(rho.wigner(0, 0.0j)
                   - metrics.unprotected_peak_depth(alpha, eta)) < 1e-8


def test_log_negativity_product_state():
    lay = DyadLayout(2, 0)
    ket = hybrid_ket(lay, [(1.0, (), (1.2, -0.7))])
    assert metrics.log_negativity(ket.to_density(), modes=(1,)) \
        == pytest.approx(0.0, abs=1e-9)


def test_log_negativity_odd_entangled_state_ln2():
    for alpha in (0.4, 2.0, 6.0):
        rho = make_ecs(-1, alpha).to_density()
        assert metrics.log_negativity(rho, modes=(1,)) \
            == pytest.approx(math.log(2.0), abs=1e-9)


def test_log_negativity_even_state_small_alpha():
    rho = make_ecs(1, 0.07).to_density()
    assert metrics.log_negativity(rho, modes=(1,)) < 0.01


def test_log_negativity_invariant_under_local_unitaries():
    rng = np.random.default_rng(5)
    spec = replace(bypass_ecs(1.5), trace_out_ancillas=False)
    rho, _ = run_protocol(spec, make_ecs(-1, 1.5), 0.97, 0.0)
    base = metrics.log_negativity(rho, modes=(1,), ancillas=(1,))
    for _ in range(3):
        rotated = rho
        for anc in (0, 1):
            axis = rng.choice(["x", "y", "z"])
            angle = float(rng.uniform(0, 2 * math.pi))
            rotated = apply_gate(rotated, Gate("qrot", ancilla=anc, axis=axis,
                                               strength=angle))
        val = metrics.log_negativity(rotated, modes=(1,), ancillas=(1,))
        assert val == pytest.approx(base, abs=1e-9)
    assert base >= -1e-9


def test_witness_ideal_entangled_state():
    rho = make_ecs(-1, 6.0).to_density()
    depth, loc, prob = metrics.vacuum_project_witness(rho)
    assert depth == pytest.approx(-2.0 / math.pi, abs=1e-6)
    assert abs(loc) < 1e-3


def test_witness_unprotected_formula():
    for alpha, eta in ((2.0, 0.99), (6.0, 0.99), (6.0, 0.98)):
        rho, _ = run_protocol(unprotected(2), make_ecs(-1, alpha), eta, 0.0)
        depth, _, _ = metrics.vacuum_project_witness(rho)
        assert abs(depth - metrics.projected_peak_unprotected(alpha, eta)) < 1e-8


def test_witness_bypass_fitted_formula():
    for alpha in (4.0, 6.0):
        for eta in (0.99, 0.98):
            rho, _ = run_protocol(bypass_ecs(alpha), make_ecs(-1, alpha), eta, 0.0)
            depth, _, _ = metrics.vacuum_project_witness(rho)
            ref = metrics.projected_peak_bypass_fit(alpha, eta)
            assert abs(depth - ref) / abs(ref) < 0.2


def test_fit_recovers_exact_exponential():
    gamma, f1 = 2.345, 0.93
    etas = np.linspace(0.8, 1.0, 11)
    samples = [(e, f1 * math.exp(-gamma * (1.0 - e))) for e in etas]
    fit = metrics.fit_exponential_decay(samples)
    assert fit.params["gamma"] == pytest.approx(gamma, abs=1e-10)
    assert math.exp(fit.params["log_f1"]) == pytest.approx(f1, abs=1e-10)
    assert fit.residual_norm < 1e-12


def test_fit_rejects_bad_samples():
    with pytest.raises(ContractError):
        metrics.fit_exponential_decay([(1.0, 1.0), (0.9, 0.5)])
    with pytest.raises(ContractError):
        metrics.fit_exponential_decay([(1.0, 1.0), (0.95, 0.5),
                                       (0.9, -0.1), (0.85, 0.2)])


def test_gamma_fits_against_quoted_trends():
    from catbypass.harness import GAMMA_WINDOW_SMALL
    # small-loss fits for the unprotected and bypass pipelines
    for alpha in (2.0, 4.0):
        samples = [(e, metrics.channel_fidelity(unprotected(1), alpha, e, 0.0)[0])
                   for e in GAMMA_WINDOW_SMALL]
        gamma = metrics.fit_exponential_decay(samples).params["gamma"]
        ref = metrics.gamma_fit_unprotected(alpha)
        assert abs(gamma - ref) / ref < 0.15
    samples = [(e, metrics.channel_fidelity(bypass_2scs(4.0), 4.0, e, 0.0)[0])
               for e in GAMMA_WINDOW_SMALL]
    gamma = metrics.fit_exponential_decay(samples).params["gamma"]
    assert abs(gamma - metrics.gamma_fit_bypass(4.0)) < 0.1
