import math

import numpy as np
import pytest

from catbypass import fock
from catbypass.channels import (
    DephasingChannel,
    LossChannel,
    apply_dephasing,
    apply_dephasing_fock,
    apply_loss,
    apply_loss_2scs_analytic,
    apply_loss_fock,
)
from catbypass.dyad import DyadLayout, HybridComponent, hs_distance, hybrid_ket
from catbypass.errors import ContractError
from catbypass.protocols import make_2scs, make_ecs


def lossy_cat(mu, nu, alpha, eta):
    return apply_loss(make_2scs(mu, nu, alpha).to_density(), LossChannel(eta, 0))


def test_loss_identity_at_unit_transmissivity():
    rho = make_2scs(0.6, 0.8j, 1.7).to_density()
    out = apply_loss(rho, LossChannel(1.0, 0))
    assert hs_distance(rho, out) < 1e-12


def test_loss_offdiagonal_factor_exact():
    alpha, eta = 2.0, 0.96
    rho = lossy_cat(1.0, 1.0, alpha, eta)
    root = math.sqrt(eta) * alpha
    ket = HybridComponent((), (root,))
    bra = HybridComponent((), (-root,))
    n2 = 1.0 / (2.0 + 2.0 * math.exp(-2.0 * alpha ** 2))
    expected = n2 * math.exp(-2.0 * alpha ** 2 * (1.0 - eta))
    assert rho.dyad_coefficient(ket, bra) == pytest.approx(expected, abs=1e-14)


def test_loss_matches_analytic_table():
    # criterion-level exactness on the four-dyad table
    for alpha in (1.0, 2.0, 4.0):
        for eta in (0.5, 0.9, 0.99):
            mu, nu = 0.8, 0.6
            generic = lossy_cat(mu, nu, alpha, eta)
            table = apply_loss_2scs_analytic(mu, nu, alpha, eta)
            root = math.sqrt(eta) * alpha
            for ket_amp in (root, -root):
                for bra_amp in (root, -root):
                    k = HybridComponent((), (ket_amp,))
                    b = HybridComponent((), (bra_amp,))
                    assert abs(generic.dyad_coefficient(k, b)
                               - table.dyad_coefficient(k, b)) < 1e-12


def test_loss_composition_law():
    # beam-splitter composition: the coefficient tables must agree entrywise
    alpha = 1.8
    rho = make_2scs(0.7, 0.3 + 0.4j, alpha).to_density()
    one = apply_loss(apply_loss(rho, LossChannel(0.9, 0)), LossChannel(0.8, 0))
    two = apply_loss(rho, LossChannel(0.72, 0))
    root = math.sqrt(0.72) * alpha
    for ket_amp in (root, -root):
        for bra_amp in (root, -root):
            k = HybridComponent((), (ket_amp,))
            b = HybridComponent((), (bra_amp,))
            assert abs(one.dyad_coefficient(k, b)
                       - two.dyad_coefficient(k, b)) < 1e-10


def test_loss_range_check():
    with pytest.raises(ContractError):
        LossChannel(1.5, 0)


def test_dephasing_identity_and_maximal():
    lay = DyadLayout(0, 1)
    plus = hybrid_ket(lay, [(1.0, (0,), ()), (1.0, (1,), ())])
    rho = plus.to_density()
    assert hs_distance(apply_dephasing(rho, DephasingChannel(0.0, 0)), rho) < 1e-12
    dead = apply_dephasing(rho, DephasingChannel(1.0, 0))
    g, e = HybridComponent((0,), ()), HybridComponent((1,), ())
    assert dead.dyad_coefficient(g, e) == pytest.approx(0.0, abs=1e-15)


def test_dephasing_offdiagonal_value():
    # direct 2x2 algebra: (1 - p/2)rho + (p/2) sz rho sz scales the coherence
    # 0.5 -> 0.5(1 - p) = 0.475 at p = 0.05
    lay = DyadLayout(0, 1)
    plus = hybrid_ket(lay, [(1.0, (0,), ()), (1.0, (1,), ())])
    rho = apply_dephasing(plus.to_density(), DephasingChannel(0.05, 0))
    g, e = HybridComponent((0,), ()), HybridComponent((1,), ())
    assert rho.dyad_coefficient(g, e) == pytest.approx(0.475, abs=1e-12)


def test_dephasing_range_check():
    with pytest.raises(ContractError):
        DephasingChannel(-0.1, 0)


def test_channels_preserve_trace_and_positivity():
    rho = make_2scs(0.4 + 0.3j, 0.85, 2.2).to_density()
    out = apply_loss(rho, LossChannel(0.7, 0))
    assert out.trace() == pytest.approx(1.0, abs=1e-9)
    assert float(np.min(out.eigenvalues())) > -1e-8


def test_ecs_double_decay_rate():
    alpha, eta = 1.5, 0.9
    rho = make_ecs(-1, alpha).to_density()
    rho = apply_loss(rho, LossChannel(eta, 0))
    rho = apply_loss(rho, LossChannel(eta, 1))
    root = math.sqrt(eta) * alpha
    ket = HybridComponent((), (root, root))
    bra = HybridComponent((), (-root, -root))
    n2 = 1.0 / (2.0 - 2.0 * math.exp(-4.0 * alpha ** 2))
    expected = -n2 * math.exp(-4.0 * alpha ** 2 * (1.0 - eta))
    assert rho.dyad_coefficient(ket, bra) == pytest.approx(expected, abs=1e-12)


def test_loss_and_dephasing_commute_on_disjoint_subsystems():
    ket = hybrid_ket(DyadLayout(1, 1),
                     [(0.8, (0,), (1.3,)), (0.6, (1,), (-1.3,))])
    rho = ket.to_density()
    a = apply_dephasing(apply_loss(rho, LossChannel(0.85, 0)),
                        DephasingChannel(0.2, 0))
    b = apply_loss(apply_dephasing(rho, DephasingChannel(0.2, 0)),
                   LossChannel(0.85, 0))
    assert hs_distance(a, b) < 1e-12


def test_fock_channels_match_dyad_channels():
    dim = 30
    ket = hybrid_ket(DyadLayout(1, 1),
                     [(0.8, (0,), (1.1,)), (0.6j, (1,), (-0.9 + 0.3j,))])
    rho = ket.to_density()
    out = apply_dephasing(apply_loss(rho, LossChannel(0.88, 0)),
                          DephasingChannel(0.15, 0))
    rho_f = fock.FockOperator(fock.HilbertLayout((dim,), 1),
                              ket.to_fock([dim]).entries[:, None]
                              @ ket.to_fock([dim]).entries.conj()[None, :])
    out_f = apply_dephasing_fock(apply_loss_fock(rho_f, LossChannel(0.88, 0)),
                                 DephasingChannel(0.15, 0))
    diff = np.max(np.abs(out.to_fock([dim]).entries - out_f.entries))
    assert diff < 1e-10
    assert np.trace(out_f.entries).real == pytest.approx(1.0, abs=1e-9)
    assert float(np.min(np.linalg.eigvalsh(out_f.entries))) > -1e-8
