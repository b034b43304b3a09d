"""Single-round correction of qubit dephasing using two oscillator ancillas.

The qubit (carrying c₁|+⟩ + c₂|-⟩ in the σ_x basis) is entangled with a
vacuum oscillator through exp[-i√2β σ_x P̂₁], may suffer a dephasing event,
is entangled with a second oscillator, and a balanced beam splitter routes
all phonons into mode 1 (no error) or mode 2 (σ_z occurred).  Number-resolved
which-mode detection then fixes the error 100% of the time outside the
|⟨√2β|0⟩|² ambiguity window where both modes are dark.
"""

from __future__ import annotations

import math

import numpy as np

from .. import dyad
from ..channels import DephasingChannel, apply_dephasing
from ..dyad import DyadDensity, DyadLayout, HybridKet, density_sum, hybrid_ket
from ..errors import LayoutError
from .pipeline import Gate, apply_gate, rabi

_SQRT2 = math.sqrt(2.0)


def plus_minus_qubit(c_plus: complex, c_minus: complex) -> HybridKet:
    """c₊|+⟩ + c₋|-⟩ on a bare qubit, expressed in the (|g⟩, |e⟩) basis."""
    return hybrid_ket(DyadLayout(0, 1),
                      [((c_plus + c_minus) / _SQRT2, (0,), ()),
                       ((c_plus - c_minus) / _SQRT2, (1,), ())])


def _syndrome_branches(layout: DyadLayout):
    """(name, mode-0 projector, mode-1 projector, correction gates)."""
    vac0 = dyad.vacuum_projection_expansion(layout, 0)
    vac1 = dyad.vacuum_projection_expansion(layout, 1)
    even0 = dyad.even_nonvacuum_projection_expansion(layout, 0)
    even1 = dyad.even_nonvacuum_projection_expansion(layout, 1)
    odd0 = dyad.parity_projection_expansion(layout, 0, even=False)
    odd1 = dyad.parity_projection_expansion(layout, 1, even=False)
    sx = (Gate("qrot", ancilla=0, axis="x", strength=math.pi / 2.0),)
    sz = (Gate("qrot", ancilla=0, axis="z", strength=math.pi / 2.0),)
    return [
        ("mode1_even", even0, vac1, ()),
        ("mode1_odd", odd0, vac1, sx),
        ("mode2_even", vac0, even1, sz),
        ("mode2_odd", vac0, odd1, sz + sx),
        ("ambiguous", vac0, vac1, ()),
    ]


def dephasing_qec(qubit_state: HybridKet, beta: float = 1.0,
                  p: float = 0.0) -> tuple[DyadDensity, dict]:
    """Run the correction round; returns the corrected qubit density and the
    syndrome probabilities."""
    if qubit_state.layout != DyadLayout(0, 1):
        raise LayoutError("input must be a bare single-qubit state")
    layout = DyadLayout(2, 1)
    comps = [dyad.HybridComponent(c.bits, (0.0 + 0.0j, 0.0 + 0.0j))
             for c in qubit_state.components]
    ket = HybridKet(layout, comps, qubit_state.coeffs).normalized()

    ket = apply_gate(ket, rabi(0, "x", 0, math.pi / 2.0, -_SQRT2 * beta))
    rho = ket.to_density()
    rho = apply_dephasing(rho, DephasingChannel(p, 0))
    rho = apply_gate(rho, rabi(0, "x", 1, math.pi / 2.0, -_SQRT2 * beta))
    rho = apply_gate(rho, Gate("bs", mode=0, mode2=1))

    probs: dict[str, float] = {}
    corrected = []
    for name, proj0, proj1, correction in _syndrome_branches(layout):
        branch = rho.apply_expansion(proj0).apply_expansion(proj1)
        prob = branch.trace()
        probs[name] = prob
        if prob <= 1e-14:
            continue
        for g in correction:
            branch = apply_gate(branch, g)
        corrected.append(branch)
    out = density_sum(corrected).trace_out(modes=(0, 1))
    probs["unresolved"] = max(0.0, 1.0 - sum(probs.values()))
    return out, probs


def ambiguity_weight(beta: float) -> float:
    """|⟨√2β|0⟩|²: probability floor of the dark-dark outcome."""
    return float(np.exp(-2.0 * beta ** 2))
