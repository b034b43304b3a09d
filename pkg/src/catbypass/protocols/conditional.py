"""Conditional enhancements: measurement filters on the encoded state.

Two flavors: post-selecting on finding the oscillator in vacuum after the
encoder (probabilistic), and a deterministic variant that measures photon
parity and applies a qubit correction on the odd outcome.
"""

from __future__ import annotations

import math

from .. import dyad
from ..dyad import DyadDensity, HybridKet, density_sum
from ..errors import ProjectionError


def conditional_vacuum_filter(state: HybridKet, mode: int = 0) -> tuple[HybridKet, float]:
    """Project the oscillator onto vacuum, renormalize, report probability."""
    fn = dyad.vacuum_projection_expansion(state.layout, mode)
    projected = state.apply_expansion(fn)
    prob = projected.norm_squared()
    if prob <= 1e-300:
        raise ProjectionError("vacuum projection has zero probability")
    return projected.normalized(), prob


def parity_branches(state: HybridKet, mode: int = 0,
                    ancilla: int = 0) -> list[tuple[str, float, HybridKet]]:
    """Photon-parity measurement branches with their corrections applied.

    The even outcome already carries the target qubit state.  The odd
    outcome lives on a shared odd-cat oscillator factor with the qubit in
    μ|-_i⟩ - ν|+_i⟩, which σ_x maps back onto the target up to global phase.
    """
    out = []
    for name, even in (("even", True), ("odd", False)):
        proj = dyad.parity_projection_expansion(state.layout, mode, even)
        branch = state.apply_expansion(proj)
        prob = branch.norm_squared()
        if prob <= 1e-300:
            continue
        branch = branch.normalized()
        if not even:
            branch = branch.apply_expansion(
                dyad.qubit_rotation_expansion(state.layout, ancilla, "x",
                                              math.pi / 2.0))
        out.append((name, prob, branch))
    return out


def parity_corrected_filter(state: HybridKet, mode: int = 0,
                            ancilla: int = 0) -> tuple[DyadDensity, dict]:
    """Deterministic corrected ensemble after the parity measurement."""
    branches = parity_branches(state, mode, ancilla)
    rho = density_sum([b.to_density().scaled(p) for _, p, b in branches])
    info = {name: p for name, p, _ in branches}
    return rho, info


def parity_corrected_state(rho: DyadDensity, mode: int,
                           ancilla: int) -> tuple[DyadDensity, float]:
    """Density-operator version used inside pipelines; trace preserving."""
    layout = rho.layout
    even = rho.apply_expansion(dyad.parity_projection_expansion(layout, mode, True))
    odd = rho.apply_expansion(dyad.parity_projection_expansion(layout, mode, False))
    odd = odd.apply_expansion(
        dyad.qubit_rotation_expansion(layout, ancilla, "x", math.pi / 2.0))
    return density_sum([even, odd]), 1.0
