"""Figures of merit: fidelities, Wigner cross-sections and negative peaks,
logarithmic negativity, the vacuum-projection steering witness, and
exponential decay fits, plus the closed-form reference curves they are
compared against."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import dyad, fock
from .dyad import DyadDensity, HybridKet
from .errors import ContractError, LayoutError
from .protocols.pipeline import (
    ProtocolSpec, add_reference_qubit, make_2scs, pad_ancillas, run_protocol,
)


# ---------------------------------------------------------------------------
# fidelities
# ---------------------------------------------------------------------------

def fidelity_pure_mixed(psi: HybridKet, rho: DyadDensity) -> float:
    """⟨ψ|ρ|ψ⟩, the pure-reference reduction of the Uhlmann fidelity."""
    val = rho.expect_with_ket(psi.normalized())
    if val < -1e-9 or val > 1.0 + 1e-9:
        raise ContractError(f"fidelity {val} outside [0, 1]")
    return val


def uhlmann_fidelity_fock(rho: np.ndarray, sigma: np.ndarray) -> float:
    """tr(√(√ρ σ √ρ))² for two density matrices (Fock backend only)."""
    w, v = np.linalg.eigh(rho)
    w = np.clip(w, 0.0, None)
    root = (v * np.sqrt(w)) @ v.conj().T
    inner = root @ sigma @ root
    vals = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
    return float(np.sum(np.sqrt(np.clip(vals, 0.0, None))) ** 2)


def virtual_2scs_input(alpha: float, n_physical_ancillas: int) -> HybridKet:
    """2^{-1/2}(|0_f⟩|α⟩ + |1_f⟩|-α⟩) with ground physical ancillas and the
    noiseless reference qubit appended last."""
    branch0 = pad_ancillas(make_2scs(1.0, 0.0, alpha), n_physical_ancillas)
    branch1 = pad_ancillas(make_2scs(0.0, 1.0, alpha), n_physical_ancillas)
    return add_reference_qubit(branch0, branch1)


def channel_fidelity(spec: ProtocolSpec, alpha: float, eta: float,
                     p: float) -> tuple[float, float]:
    """Channel fidelity of a single-mode protocol: run the virtual entangled
    input through the physical pipeline and score against itself.

    Returns (fidelity, success probability)."""
    if spec.n_modes != 1:
        raise LayoutError("channel fidelity is defined for one-mode protocols")
    virt = virtual_2scs_input(alpha, spec.n_ancillas)
    rho, info = run_protocol(spec, virt, eta, p)
    reference = virtual_2scs_input(alpha, 0)  # modes + reference qubit only
    return fidelity_pure_mixed(reference, rho), info["success_prob"]


def channel_fidelity_pair(spec: ProtocolSpec, ket0: HybridKet, ket1: HybridKet,
                          eta: float, p: float) -> tuple[float, float]:
    """Channel fidelity with arbitrary (normalized) logical basis states."""
    b0 = pad_ancillas(ket0.normalized(), spec.n_ancillas)
    b1 = pad_ancillas(ket1.normalized(), spec.n_ancillas)
    virt = add_reference_qubit(b0, b1)
    rho, info = run_protocol(spec, virt, eta, p)
    reference = add_reference_qubit(ket0.normalized(), ket1.normalized())
    return fidelity_pure_mixed(reference, rho), info["success_prob"]


# ---------------------------------------------------------------------------
# phase space
# ---------------------------------------------------------------------------

@dataclass
class WignerGrid:
    axis: str                 # 'X' or 'P' for cross sections
    points: np.ndarray        # quadrature coordinate (x or p), ζ = (x+ip)/√2
    values: np.ndarray
    spacing: float

    def __post_init__(self):
        if self.spacing <= 0:
            raise ContractError("grid spacing must be positive")


def wigner_cross_section(rho: DyadDensity, mode: int, axis: str, extent: float,
                         spacing: float = 0.02) -> WignerGrid:
    """W along one quadrature axis through the origin; coordinates follow
    ζ = (x + ip)/√2, putting a coherent state α at x = √2 Re α."""
    pts = np.arange(-extent, extent + spacing / 2.0, spacing)
    if axis == "X":
        zetas = pts / math.sqrt(2.0)
    elif axis == "P":
        zetas = 1j * pts / math.sqrt(2.0)
    else:
        raise LayoutError("axis must be 'X' or 'P'")
    vals = rho.wigner(mode, zetas)
    return WignerGrid(axis, pts, vals, spacing)


def wigner_integral(rho: DyadDensity, mode: int, extent: float,
                    spacing: float = 0.05) -> float:
    """∫ W d²ζ over an (x, p) grid with the Jacobian d²ζ = dx dp / 2."""
    pts = np.arange(-extent, extent + spacing / 2.0, spacing)
    x, p = np.meshgrid(pts, pts, indexing="ij")
    zetas = ((x + 1j * p) / math.sqrt(2.0)).ravel()
    vals = rho.wigner(mode, zetas)
    return float(np.sum(vals) * spacing * spacing / 2.0)


def negative_peak(rho: DyadDensity, mode: int, search_extent: float,
                  coarse: float = 0.1) -> tuple[complex, float]:
    """Deepest Wigner minimum: grid scan fine enough to resolve the
    interference fringes (period π/(2·amp) in ζ), then local refinement to
    1e-4 in position.  Returns (ζ location, depth)."""
    amps, _ = rho._reduced_pairs(mode)
    amax = max(1.0, float(np.max(np.abs(amps))) if amps.size else 1.0)
    step = min(coarse / math.sqrt(2.0), math.pi / (16.0 * amax))
    ext = search_extent / math.sqrt(2.0)
    pts = np.arange(-ext, ext + step / 2.0, step)
    re, im = np.meshgrid(pts, pts, indexing="ij")
    zetas = (re + 1j * im).ravel()
    vals = rho.wigner(mode, zetas)
    k = int(np.argmin(vals))
    z0 = zetas[k]

    def f(v):
        return rho.wigner(mode, complex(v[0], v[1]))

    res = optimize.minimize(f, [z0.real, z0.imag], method="Nelder-Mead",
                            options={"xatol": 1e-5, "fatol": 1e-14})
    z = complex(res.x[0], res.x[1])
    return z, float(res.fun)


def negative_peak_fock(rho_mode: np.ndarray, search_extent: float,
                       coarse: float = 0.02) -> tuple[complex, float]:
    """Same scan on a Fock-backend single-mode density matrix, using the
    Laguerre-recurrence grid evaluator for the coarse pass."""
    ext = search_extent / math.sqrt(2.0)
    pts = np.arange(-ext, ext + coarse / 2.0, coarse)
    re, im = np.meshgrid(pts, pts, indexing="ij")
    zetas = (re + 1j * im).ravel()
    vals = fock.wigner_grid(rho_mode, zetas)
    k = int(np.argmin(vals))
    z0 = zetas[k]

    def f(v):
        return fock.wigner_point(rho_mode, complex(v[0], v[1]))

    res = optimize.minimize(f, [z0.real, z0.imag], method="Nelder-Mead",
                            options={"xatol": 1e-5, "fatol": 1e-14})
    return complex(res.x[0], res.x[1]), float(res.fun)


# ---------------------------------------------------------------------------
# entanglement
# ---------------------------------------------------------------------------

def log_negativity(rho: DyadDensity, modes=(), ancillas=()) -> float:
    """ln ‖ρ^PT‖₁ with the partial transpose over the given subsystems."""
    pt = rho.partial_transpose(modes=modes, ancillas=ancillas)
    return float(np.log(pt.trace_norm()))


def log_negativity_fock(rho: fock.FockOperator, transpose_axes) -> float:
    layout = rho.layout
    dims = layout.dims
    n = len(dims)
    t = rho.entries.reshape(dims + dims)
    perm = list(range(2 * n))
    for ax in transpose_axes:
        perm[ax], perm[n + ax] = perm[n + ax], perm[ax]
    d = layout.total_dim
    pt = t.transpose(perm).reshape(d, d)
    vals = np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))
    return float(np.log(np.sum(np.abs(vals))))


def vacuum_project_witness(rho: DyadDensity, search_extent: float | None = None
                           ) -> tuple[float, complex, float]:
    """Project mode 0 onto vacuum and find the deepest Wigner minimum of
    mode 1.  Returns (depth, ζ location, projection probability)."""
    if rho.layout.n_modes != 2:
        raise LayoutError("witness requires a two-mode state")
    projected = rho.apply_expansion(
        dyad.vacuum_projection_expansion(rho.layout, 0))
    prob = projected.trace()
    projected = projected.normalized()
    if search_extent is None:
        amax = max((abs(c.amps[1]) for c in projected.components), default=1.0)
        search_extent = math.sqrt(2.0) * amax + 3.0
    z, depth = negative_peak(projected, 1, search_extent)
    return depth, z, prob


# ---------------------------------------------------------------------------
# decay-law fitting
# ---------------------------------------------------------------------------

@dataclass
class FitResult:
    model: str
    params: dict
    residual_norm: float
    samples: list = field(default_factory=list)


def fit_exponential_decay(samples) -> FitResult:
    """Least squares of log F against (1-η) for the model F = F(1)e^{-γ(1-η)}."""
    pts = [(float(e), float(f)) for e, f in samples]
    if len(pts) < 4:
        raise ContractError("need at least 4 samples")
    if any(f <= 0 for _, f in pts):
        raise ContractError("fidelities must be positive for a log fit")
    loss = np.array([1.0 - e for e, _ in pts])
    logf = np.array([math.log(f) for _, f in pts])
    a = np.column_stack([np.ones_like(loss), -loss])
    coef, *_ = np.linalg.lstsq(a, logf, rcond=None)
    resid = float(np.linalg.norm(a @ coef - logf))
    return FitResult("exp_decay", {"log_f1": float(coef[0]), "gamma": float(coef[1])},
                     resid, pts)


# ---------------------------------------------------------------------------
# closed-form reference curves
# ---------------------------------------------------------------------------

def blockage_channel_fidelity(alpha: float) -> float:
    """Large-α channel fidelity of the bypass when the oscillator is fully
    blocked (η=0, p=0): (e^{-3π²/64α²} + e^{-π²/64α²})/2."""
    x = math.pi ** 2 / (64.0 * alpha ** 2)
    return 0.5 * (math.exp(-3.0 * x) + math.exp(-x))


def unprotected_peak_depth(alpha: float, eta: float) -> float:
    """Origin Wigner value of a lossy odd two-component superposition:
    2(e^{2α²(1-η)} - e^{2α²η}) / (π(e^{2α²} - 1))."""
    a2 = 2.0 * alpha ** 2
    return 2.0 * (math.exp(a2 * (1.0 - eta)) - math.exp(a2 * eta)) \
        / (math.pi * (math.exp(a2) - 1.0))


def protected_peak_depth_expansion(alpha: float, eta: float, p: float) -> float:
    """First-order origin-peak law for the bypass-protected odd state:
    -(2-4e^{-2α²})/π + (1-η)·2e^{-2α²}α²/π + p·(1-e^{-π²/8α²})/(2π)."""
    e = math.exp(-2.0 * alpha ** 2)
    return (-(2.0 - 4.0 * e) / math.pi
            + (1.0 - eta) * 2.0 * e * alpha ** 2 / math.pi
            + p * (1.0 - math.exp(-math.pi ** 2 / (8.0 * alpha ** 2)))
            / (2.0 * math.pi))


def projected_peak_unprotected(alpha: float, eta: float) -> float:
    """Deepest mode-2 peak after a vacuum projection on mode 1 of the lossy
    entangled superposition: 2(e^{-4α²(η-1)} - e^{2α²η}) / (π(e^{-2α²(η-2)} - 1))."""
    a2 = alpha ** 2
    return 2.0 * (math.exp(-4.0 * a2 * (eta - 1.0)) - math.exp(2.0 * a2 * eta)) \
        / (math.pi * (math.exp(-2.0 * a2 * (eta - 2.0)) - 1.0))


def projected_peak_bypass_fit(alpha: float, eta: float) -> float:
    """Fitted witness depth for the bypass: -(2/π)exp[(1.46α²-7.14α+11.0)(η-1)]."""
    c = 1.46 * alpha ** 2 - 7.14 * alpha + 11.0
    return -(2.0 / math.pi) * math.exp(c * (eta - 1.0))


def gamma_fit_unprotected(alpha: float) -> float:
    return 0.17 + alpha ** 1.92


def gamma_fit_gaussian(alpha: float) -> float:
    return 0.29 + 0.96 * alpha


def gamma_fit_bypass(alpha: float) -> float:
    return 0.65 - 0.025 * alpha ** 1.2


def ecs_loss_slope_unprotected(alpha: float) -> float:
    return 1.59 * alpha ** 2 + 0.12 * alpha + 0.59


def ecs_loss_slope_gaussian(alpha: float) -> float:
    return -0.26 + 1.34 * alpha - 0.70 * math.log(alpha)


def ecs_loss_slope_bypass(alpha: float) -> float:
    return 0.44 - 0.22 * math.log(alpha)


def gaussian_peak_slope_fit(alpha: float) -> float:
    """Origin-peak growth rate of the squeezing baseline: 0.61 α^{1.60}."""
    return 0.61 * alpha ** 1.60
