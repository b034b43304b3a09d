"""Squeezing baseline: S(r) before the loss channel, S(-r) after.

Squeezed states leave the coherent-component algebra, so this baseline runs
entirely on the Fock backend.  The optimal squeezing minimizes the mean
photon number of the squeezed input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import fock
from ..dyad import DyadLayout, HybridKet
from ..errors import ContractError
from .fock_runner import BranchEnsemble
from .pipeline import make_2scs, make_ecs


@dataclass(frozen=True)
class SqueezeParam:
    r: float
    from_fallback: bool = False


def _moments_2scs(mu: complex, nu: complex, alpha: float) -> tuple[float, float]:
    """(⟨n̂⟩, Re⟨â²⟩) of N(μ|α⟩+ν|-α⟩); both peaks are â² eigenstates, so
    ⟨â²⟩ = α² exactly."""
    rho = make_2scs(mu, nu, alpha).to_density()
    return rho.mean_photon(0), float(np.real(rho.mean_a_squared(0)))


def r_opt_from_moments(n0: float, re_a2: float) -> float:
    """Minimizer of ⟨n̂(r)⟩ = cosh(2r)·n̂₀ + sinh²r - sinh(2r)·Re⟨â²⟩."""
    arg = 2.0 * re_a2 / (1.0 + 2.0 * n0)
    if abs(arg) >= 1.0:
        raise ContractError("squeeze optimization has no finite minimum")
    return 0.5 * math.atanh(arg)


def r_opt_2scs(mu: complex, nu: complex, alpha: float) -> SqueezeParam:
    """Optimal squeezing for N(μ|α⟩+ν|-α⟩) with respect to mean photon number.

    Evaluates the closed form
        r = (1/4)(log[4 e^{2α²} α² μ* / D + 1] - log[1 - 4α² ν((μ*)² + μ²)/D]),
        D = e^{2α²} μ* + ν (μ*)² + μ² ν,
    which assumes |μ|² + |ν|² = 1 (coefficients are rescaled accordingly) and
    is real for real coefficient ratios; complex coefficients or non-positive
    logarithm arguments fall back to the moment minimizer.
    """
    try:
        e2 = math.exp(2.0 * alpha ** 2)
        scale = math.sqrt(abs(mu) ** 2 + abs(nu) ** 2)
        mu_s, nu_s = complex(mu) / scale, complex(nu) / scale
        d = e2 * np.conj(mu_s) + nu_s * np.conj(mu_s) ** 2 + mu_s ** 2 * nu_s
        arg1 = 4.0 * e2 * alpha ** 2 * np.conj(mu_s) / d + 1.0
        arg2 = 1.0 - 4.0 * alpha ** 2 * nu_s * (np.conj(mu_s) ** 2 + mu_s ** 2) / d
        if abs(arg1.imag) > 1e-12 * abs(arg1) or abs(arg2.imag) > 1e-12 * abs(arg2):
            raise ValueError("complex logarithm argument")
        if arg1.real <= 0.0 or arg2.real <= 0.0:
            raise ValueError("non-positive logarithm argument")
        r = 0.25 * (math.log(arg1.real) - math.log(arg2.real))
        return SqueezeParam(r)
    except (ValueError, ZeroDivisionError, OverflowError):
        n0, re_a2 = _moments_2scs(mu, nu, alpha)
        return SqueezeParam(r_opt_from_moments(n0, re_a2), from_fallback=True)


def r_opt_ecs(alpha: float) -> SqueezeParam:
    """Optimal per-mode squeezing for the two-mode entangled superposition:
    r = (1/4)(log[2α² + 2α²coth(2α²) + 1] - log[-2α² + 2α²coth(2α²) + 1])."""
    s = 2.0 * alpha ** 2
    coth = 1.0 / math.tanh(s)
    return SqueezeParam(0.25 * (math.log(s + s * coth + 1.0)
                                - math.log(-s + s * coth + 1.0)))


def squeezed_mean_photon(n0: float, re_a2: float, r: float) -> float:
    return math.cosh(2.0 * r) * n0 + math.sinh(r) ** 2 \
        - math.sinh(2.0 * r) * re_a2


def gaussian_dim(alpha: float, r: float) -> int:
    """Truncation for squeezed superpositions: the input support plus the
    photon spread the squeeze adds."""
    return fock.required_dim(abs(alpha)) + int(math.ceil(24.0 * abs(r))) + 8


def run_gaussian(state: HybridKet, r: float, eta: float,
                 mode_dim: int | None = None, recover: bool = True) -> BranchEnsemble:
    """S(r) on every mode, loss, then S(-r) if `recover`."""
    alpha_max = max((abs(a) for c in state.components for a in c.amps), default=0.0)
    if mode_dim is None:
        mode_dim = gaussian_dim(alpha_max, r)
    state = state.normalized()
    vec = state.to_fock([mode_dim] * state.layout.n_modes)
    layout = vec.layout
    ens = BranchEnsemble(layout, [vec.entries])
    s_fwd = fock.squeeze(r, mode_dim)
    for m in range(layout.n_modes):
        ens.apply_unitary_small(s_fwd, (layout.mode_axis(m),))
    for v in ens.vectors:
        fock.check_truncation(v, layout)
    for m in range(layout.n_modes):
        ens.apply_kraus(fock.loss_kraus(eta, mode_dim), layout.mode_axis(m))
    if recover:
        s_back = fock.squeeze(-r, mode_dim)
        for m in range(layout.n_modes):
            ens.apply_unitary_small(s_back, (layout.mode_axis(m),))
    return ens


def gaussian_fidelity(state: HybridKet, reference: HybridKet, eta: float,
                      r: float, mode_dim: int | None = None,
                      recover: bool = True) -> float:
    """⟨ref|ρ_out|ref⟩ for the squeeze/loss/unsqueeze chain."""
    ens = run_gaussian(state, r, eta, mode_dim=mode_dim, recover=recover)
    ref = reference.normalized().to_fock(list(ens.layout.mode_dims)).entries
    return ens.expect_with_vector(ref) / ens.total_weight()


def gaussian_reduced_mode(state: HybridKet, eta: float, r: float, mode: int = 0,
                          mode_dim: int | None = None) -> np.ndarray:
    """Reduced single-mode density matrix of the protected-and-recovered state."""
    ens = run_gaussian(state, r, eta, mode_dim=mode_dim)
    rho = ens.reduced_density([ens.layout.mode_axis(mode)]).entries
    return rho / np.trace(rho).real


def gaussian_ecs_density(alpha: float, eta: float, r: float | None = None,
                         mode_dim: int | None = None) -> fock.FockOperator:
    """Full two-mode output density for the squeezing-protected entangled
    superposition (needed for entanglement spectra)."""
    if r is None:
        r = r_opt_ecs(alpha).r
    state = make_ecs(-1, alpha)
    ens = run_gaussian(state, r, eta, mode_dim=mode_dim)
    dims = ens.layout.dims
    d = ens.layout.total_dim
    rho = np.zeros((d, d), dtype=complex)
    for v in ens.vectors:
        rho += np.outer(v, v.conj())
    rho /= np.trace(rho).real
    return fock.FockOperator(ens.layout, rho)


def gaussian_ecs_projected_mode2(alpha: float, eta: float, r: float | None = None,
                                 mode_dim: int | None = None) -> np.ndarray:
    """Mode-2 density after a vacuum projection on mode 1, squeezing baseline."""
    if r is None:
        r = r_opt_ecs(alpha).r
    state = make_ecs(-1, alpha)
    ens = run_gaussian(state, r, eta, mode_dim=mode_dim)
    layout = ens.layout
    d = layout.mode_dims[0]
    proj = np.zeros((d, d), dtype=complex)
    proj[0, 0] = 1.0
    ens.apply_unitary_small(proj, (layout.mode_axis(0),))
    ens.prune()
    rho = ens.reduced_density([layout.mode_axis(1)]).entries
    tr = np.trace(rho).real
    if tr <= 0:
        raise ContractError("vacuum projection annihilated the state")
    return rho / tr
