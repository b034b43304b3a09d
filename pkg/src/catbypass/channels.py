"""Bosonic loss and qubit dephasing.

Both maps exist in two independent implementations: a closed dyad form for
the coherent-component engine and a Kraus sum for the truncated Fock backend.
The pair of routes is what makes cross-checking meaningful, so neither side
may ever call into the other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fock
from .dyad import DyadDensity, DyadLayout, HybridComponent, _amps_matrix, _bits_matrix
from .errors import ContractError


@dataclass(frozen=True)
class LossChannel:
    """Photon loss with transmissivity η on one oscillator."""

    eta: float
    mode: int = 0

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ContractError(f"loss parameter η={self.eta} outside [0, 1]")


@dataclass(frozen=True)
class DephasingChannel:
    """Qubit phase damping with parameter p on one ancilla."""

    p: float
    ancilla: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ContractError(f"dephasing parameter p={self.p} outside [0, 1]")


# ---------------------------------------------------------------------------
# dyad backend
# ---------------------------------------------------------------------------

def apply_loss(rho: DyadDensity, channel: LossChannel) -> DyadDensity:
    """Loss in closed form on the coefficient table.

    Each dyad |β⟩⟨γ| on the mode picks up the factor
    exp[(1-η)(γ*β - |β|²/2 - |γ|²/2)] and its amplitudes shrink to √η β, √η γ.
    For β = -γ = α this reduces to the coherence decay e^{-2α²(1-η)}.
    """
    rho.layout.check_mode(channel.mode)
    eta = channel.eta
    amps = _amps_matrix(rho.components)[:, channel.mode]
    sq = np.abs(amps) ** 2
    factor = np.exp((1.0 - eta) * (amps[:, None] * amps.conj()[None, :]
                                   - 0.5 * sq[:, None] - 0.5 * sq[None, :]))
    root = np.sqrt(eta)
    comps = []
    for c in rho.components:
        new = c.amps[:channel.mode] + (root * c.amps[channel.mode],) \
            + c.amps[channel.mode + 1:]
        comps.append(HybridComponent(c.bits, new))
    return DyadDensity(rho.layout, comps, rho.coeffs * factor).pruned()


def apply_dephasing(rho: DyadDensity, channel: DephasingChannel) -> DyadDensity:
    """Dephasing in closed form: dyads whose bra/ket bits differ on the
    ancilla are scaled by (1-p)."""
    rho.layout.check_ancilla(channel.ancilla)
    bits = _bits_matrix(rho.components)[:, channel.ancilla]
    differ = bits[:, None] != bits[None, :]
    factor = np.where(differ, 1.0 - channel.p, 1.0)
    return DyadDensity(rho.layout, list(rho.components), rho.coeffs * factor)


def apply_loss_2scs_analytic(mu: complex, nu: complex, alpha: float,
                             eta: float) -> DyadDensity:
    """Reference four-dyad table for a lossy two-component superposition.

    Emits the loss output of N(μ|α⟩ + ν|-α⟩) directly: diagonal dyads keep
    weights |μ|², |ν|², off-diagonal dyads decay by e^{-2α²(1-η)}; all
    amplitudes shrink to √η α.  Used only as an independent check of the
    generic dyad path.
    """
    if not 0.0 <= eta <= 1.0:
        raise ContractError(f"loss parameter η={eta} outside [0, 1]")
    norm2 = 1.0 / (abs(mu) ** 2 + abs(nu) ** 2
                   + 2.0 * np.real(np.conj(mu) * nu) * np.exp(-2.0 * alpha ** 2))
    decay = np.exp(-2.0 * alpha ** 2 * (1.0 - eta))
    plus = HybridComponent((), (complex(np.sqrt(eta) * alpha),))
    minus = HybridComponent((), (complex(-np.sqrt(eta) * alpha),))
    c = norm2 * np.array(
        [[abs(mu) ** 2, mu * np.conj(nu) * decay],
         [np.conj(mu) * nu * decay, abs(nu) ** 2]], dtype=complex)
    return DyadDensity(DyadLayout(1, 0), [plus, minus], c)


# ---------------------------------------------------------------------------
# Fock backend
# ---------------------------------------------------------------------------

def apply_loss_fock(rho: fock.FockOperator, channel: LossChannel) -> fock.FockOperator:
    layout = rho.layout
    dim = layout.mode_dims[layout.mode_axis(channel.mode)]
    out = np.zeros_like(rho.entries)
    for k in fock.loss_kraus(channel.eta, dim):
        out += fock.apply_one_site_density(rho.entries, layout, k,
                                           layout.mode_axis(channel.mode))
    return fock.FockOperator(layout, out)


def apply_dephasing_fock(rho: fock.FockOperator,
                         channel: DephasingChannel) -> fock.FockOperator:
    layout = rho.layout
    ax = layout.ancilla_axis(channel.ancilla)
    out = np.zeros_like(rho.entries)
    for k in fock.dephasing_kraus(channel.p):
        out += fock.apply_one_site_density(rho.entries, layout, k, ax)
    return fock.FockOperator(layout, out)
