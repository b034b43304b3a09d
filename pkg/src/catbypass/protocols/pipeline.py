"""Protection pipelines over the dyad engine.

A pipeline is: prepare ancillas in |g⟩, apply `gates_pre`, send every
oscillator through a loss channel and every physical ancilla through a
dephasing channel, apply `gates_post` (the adjoint of the encoder for bypass
protocols), optionally filter on a measurement, and trace out ancillas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .. import dyad
from ..channels import DephasingChannel, LossChannel, apply_dephasing, apply_loss
from ..dyad import DyadDensity, DyadLayout, HybridKet, hybrid_ket
from ..errors import ContractError, LayoutError

_SQRT2 = math.sqrt(2.0)


def rabi_strength(alpha: float) -> float:
    """Coupling ε = π/(4√2 α) that rotates a qubit by ±π/4 conditioned on the
    sign of a coherent amplitude ±α."""
    if alpha <= 0:
        raise ContractError(f"amplitude must be positive, got {alpha}")
    return math.pi / (4.0 * _SQRT2 * alpha)


# ---------------------------------------------------------------------------
# gates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Gate:
    """One pipeline element.

    kind: 'rabi' (exp[i t σ_axis X_Φ]), 'qrot' (exp[iθ σ_axis]),
    'disp' (D(δ)), 'rot' (exp[iθ n̂]), or 'bs' (balanced beam splitter).
    """

    kind: str
    mode: int = 0
    ancilla: int = 0
    axis: str = "x"
    quad_angle: float = 0.0
    strength: float = 0.0
    delta: complex = 0.0 + 0.0j
    mode2: int = 1

    def adjoint(self) -> "Gate":
        if self.kind in ("rabi", "qrot", "rot"):
            return replace(self, strength=-self.strength)
        if self.kind == "disp":
            return replace(self, delta=-self.delta)
        if self.kind == "bs":
            # the balanced splitter is its own inverse up to mode relabeling
            return Gate("bs_inv", mode=self.mode, mode2=self.mode2)
        if self.kind == "bs_inv":
            return Gate("bs", mode=self.mode, mode2=self.mode2)
        raise LayoutError(f"unknown gate kind {self.kind!r}")

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "rabi":
            d.update(ancilla=self.ancilla, axis=self.axis, mode=self.mode,
                     quad_angle=self.quad_angle, strength=self.strength)
        elif self.kind == "qrot":
            d.update(ancilla=self.ancilla, axis=self.axis, strength=self.strength)
        elif self.kind == "disp":
            d.update(mode=self.mode, delta_re=self.delta.real, delta_im=self.delta.imag)
        elif self.kind == "rot":
            d.update(mode=self.mode, strength=self.strength)
        elif self.kind in ("bs", "bs_inv"):
            d.update(mode=self.mode, mode2=self.mode2)
        return d

    @staticmethod
    def from_dict(d: dict) -> "Gate":
        kind = d["kind"]
        if kind == "disp":
            return Gate("disp", mode=d["mode"],
                        delta=complex(d.get("delta_re", 0.0), d.get("delta_im", 0.0)))
        return Gate(kind,
                    mode=d.get("mode", 0), ancilla=d.get("ancilla", 0),
                    axis=d.get("axis", "x"), quad_angle=d.get("quad_angle", 0.0),
                    strength=d.get("strength", 0.0), mode2=d.get("mode2", 1))


def adjoint_gates(gates: Sequence[Gate]) -> tuple[Gate, ...]:
    return tuple(g.adjoint() for g in reversed(gates))


def rabi(ancilla: int, axis: str, mode: int, quad_angle: float,
         strength: float) -> Gate:
    return Gate("rabi", mode=mode, ancilla=ancilla, axis=axis,
                quad_angle=quad_angle, strength=strength)


def _gate_expansion(layout: DyadLayout, g: Gate):
    if g.kind == "rabi":
        return dyad.rabi_expansion(layout, g.ancilla, g.axis, g.mode,
                                   g.quad_angle, g.strength)
    if g.kind == "qrot":
        return dyad.qubit_rotation_expansion(layout, g.ancilla, g.axis, g.strength)
    if g.kind == "disp":
        return dyad.displacement_expansion(layout, g.mode, g.delta)
    if g.kind == "rot":
        return dyad.phase_rotation_expansion(layout, g.mode, g.strength)
    if g.kind == "bs":
        return dyad.beam_splitter_expansion(layout, g.mode, g.mode2)
    if g.kind == "bs_inv":
        return dyad.beam_splitter_expansion(layout, g.mode2, g.mode)
    raise LayoutError(f"unknown gate kind {g.kind!r}")


def apply_gate(state, g: Gate):
    """Apply one gate to a HybridKet or DyadDensity."""
    return state.apply_expansion(_gate_expansion(state.layout, g))


def apply_gates(state, gates: Iterable[Gate]):
    for g in gates:
        state = apply_gate(state, g)
    return state


# ---------------------------------------------------------------------------
# protocol description
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProtocolSpec:
    """Declarative gate/channel pipeline.

    `n_modes`/`n_ancillas` describe the physical system; input states may
    carry extra trailing ancillas (e.g. a noiseless reference qubit), which
    see no gates and no dephasing.
    """

    name: str
    n_modes: int
    n_ancillas: int
    gates_pre: tuple[Gate, ...] = ()
    gates_post: tuple[Gate, ...] = ()
    filter_after_pre: str = ""    # '', 'vacuum:<mode>', 'parity_correct:<mode>:<anc>'
    filter_after_post: str = ""   # '', 'qubit_g:<anc>'
    trace_out_ancillas: bool = True

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "n_modes": self.n_modes,
            "n_ancillas": self.n_ancillas,
            "gates_pre": [g.to_dict() for g in self.gates_pre],
            "gates_post": [g.to_dict() for g in self.gates_post],
            "filter_after_pre": self.filter_after_pre,
            "filter_after_post": self.filter_after_post,
            "trace_out_ancillas": self.trace_out_ancillas,
        }

    @staticmethod
    def from_dict(d: dict) -> "ProtocolSpec":
        return ProtocolSpec(
            name=d["name"], n_modes=d["n_modes"], n_ancillas=d["n_ancillas"],
            gates_pre=tuple(Gate.from_dict(g) for g in d.get("gates_pre", [])),
            gates_post=tuple(Gate.from_dict(g) for g in d.get("gates_post", [])),
            filter_after_pre=d.get("filter_after_pre", ""),
            filter_after_post=d.get("filter_after_post", ""),
            trace_out_ancillas=d.get("trace_out_ancillas", True),
        )


# ---------------------------------------------------------------------------
# input states
# ---------------------------------------------------------------------------

def make_2scs(mu: complex, nu: complex, alpha: float) -> HybridKet:
    """N(μ|α⟩ + ν|-α⟩) on one bare mode."""
    if mu == 0 and nu == 0:
        raise ContractError("coefficients must not all vanish")
    return hybrid_ket(DyadLayout(1, 0),
                      [(mu, (), (alpha,)), (nu, (), (-alpha,))])


def make_4scs(mus: Sequence[complex], alpha: complex) -> HybridKet:
    """μ₁|α⟩ + μ₂|α*⟩ + μ₃|-α⟩ + μ₄|-α*⟩ for complex α."""
    if len(mus) != 4:
        raise ContractError("need exactly four coefficients")
    if all(m == 0 for m in mus):
        raise ContractError("coefficients must not all vanish")
    a = complex(alpha)
    amps = [a, np.conj(a), -a, -np.conj(a)]
    return hybrid_ket(DyadLayout(1, 0),
                      [(m, (), (z,)) for m, z in zip(mus, amps)])


def make_ecs(sign: int, alpha: float) -> HybridKet:
    """N±(|α⟩|α⟩ ± |-α⟩|-α⟩) on two bare modes."""
    if sign not in (+1, -1):
        raise ContractError("sign must be +1 or -1")
    return hybrid_ket(DyadLayout(2, 0),
                      [(1.0, (), (alpha, alpha)), (float(sign), (), (-alpha, -alpha))])


def make_3scs(coeffs: Sequence[complex], alpha: float) -> HybridKet:
    """Superposition of three coherent peaks on a triangle."""
    if len(coeffs) != 3:
        raise ContractError("need exactly three coefficients")
    amps = [alpha * np.exp(2j * math.pi * k / 3.0) for k in range(3)]
    return hybrid_ket(DyadLayout(1, 0),
                      [(c, (), (z,)) for c, z in zip(coeffs, amps)])


def make_line_scs(coeffs: Sequence[complex], alpha: float) -> HybridKet:
    """Superposition of four collinear peaks at -3α, -α, α, 3α."""
    if len(coeffs) != 4:
        raise ContractError("need exactly four coefficients")
    amps = [-3.0 * alpha, -alpha, alpha, 3.0 * alpha]
    return hybrid_ket(DyadLayout(1, 0),
                      [(c, (), (z,)) for c, z in zip(coeffs, amps)])


def pad_ancillas(ket: HybridKet, n_ancillas: int) -> HybridKet:
    """Append ground-state ancillas until the ket carries `n_ancillas`."""
    extra = n_ancillas - ket.layout.n_ancillas
    if extra < 0:
        raise LayoutError("ket already has more ancillas than requested")
    if extra == 0:
        return ket
    comps = [dyad.HybridComponent(c.bits + (0,) * extra, c.amps)
             for c in ket.components]
    return HybridKet(DyadLayout(ket.layout.n_modes, n_ancillas), comps, ket.coeffs)


def add_reference_qubit(ket_zero: HybridKet, ket_one: HybridKet) -> HybridKet:
    """2^{-1/2}(|ψ₀⟩|0_f⟩ + |ψ₁⟩|1_f⟩) with a trailing noiseless qubit.

    The two branches must be individually normalized; orthogonality of the
    reference qubit then makes the combination exactly normalized.
    """
    if ket_zero.layout != ket_one.layout:
        raise LayoutError("branch layouts differ")
    lay = DyadLayout(ket_zero.layout.n_modes, ket_zero.layout.n_ancillas + 1)
    comps, coeffs = [], []
    for bit, ket in ((0, ket_zero), (1, ket_one)):
        for c, w in zip(ket.components, ket.coeffs):
            comps.append(dyad.HybridComponent(c.bits + (bit,), c.amps))
            coeffs.append(w / _SQRT2)
    return HybridKet(lay, comps, np.array(coeffs)).pruned()


# ---------------------------------------------------------------------------
# standard pipelines
# ---------------------------------------------------------------------------

def encode_gates_2scs(alpha: float, mode: int = 0, ancilla: int = 0) -> tuple[Gate, ...]:
    """Two-gate encoder: controlled qubit rotation, then the controlled
    displacement that folds the ±α peaks onto the vacuum."""
    eps = rabi_strength(alpha)
    return (rabi(ancilla, "x", mode, 0.0, eps),
            rabi(ancilla, "y", mode, math.pi / 2.0, _SQRT2 * alpha))


def bypass_2scs(alpha: float) -> ProtocolSpec:
    pre = encode_gates_2scs(alpha)
    return ProtocolSpec("bypass", 1, 1, pre, adjoint_gates(pre))


def unprotected(n_modes: int = 1) -> ProtocolSpec:
    return ProtocolSpec("none", n_modes, 0)


def encode_gates_4scs(alpha_r: float, alpha_i: float, mode: int = 0,
                      anc_x: int = 0, anc_p: int = 1) -> tuple[Gate, ...]:
    """Four-gate encoder for peaks at ±α_r ± iα_i, one ancilla per quadrature."""
    return (
        rabi(anc_x, "x", mode, 0.0, rabi_strength(alpha_r)),
        rabi(anc_x, "y", mode, math.pi / 2.0, _SQRT2 * alpha_r),
        rabi(anc_p, "x", mode, math.pi / 2.0, rabi_strength(alpha_i)),
        rabi(anc_p, "y", mode, 0.0, -_SQRT2 * alpha_i),
    )


def bypass_4scs(alpha_r: float, alpha_i: float) -> ProtocolSpec:
    pre = encode_gates_4scs(alpha_r, alpha_i)
    return ProtocolSpec("bypass4", 1, 2, pre, adjoint_gates(pre))


def bypass_ecs(alpha: float) -> ProtocolSpec:
    """Local single-mode bypass on each arm of a two-mode entangled state."""
    pre = (encode_gates_2scs(alpha, mode=0, ancilla=0)
           + encode_gates_2scs(alpha, mode=1, ancilla=1))
    return ProtocolSpec("bypass", 2, 2, pre, adjoint_gates(pre))


def sine_composite_gates(alpha: float, mode: int = 0, ancilla: int = 0) -> tuple[Gate, ...]:
    """Three Rabi gates and two qubit rotations approximating
    exp[i 2t₂ σ_x sin(2t₁ X)] with t₁ = π/(4√2α), t₂ = -π/8.

    Listed in application order (the rightmost factor of the operator
    product comes first).
    """
    t1 = rabi_strength(alpha)
    t2 = -math.pi / 8.0
    return (
        rabi(ancilla, "y", mode, 0.0, -t1),
        Gate("qrot", ancilla=ancilla, axis="z", strength=-t2),
        rabi(ancilla, "y", mode, 0.0, 2.0 * t1),
        Gate("qrot", ancilla=ancilla, axis="z", strength=t2),
        rabi(ancilla, "y", mode, 0.0, -t1),
    )


def bypass_2scs_sine(alpha: float) -> ProtocolSpec:
    """Bypass with the sine-shaped composite replacing the linear qubit
    rotation.  The composite pairs |±α⟩ with the opposite σ_y eigenstates, so
    the controlled displacement flips sign relative to the plain bypass."""
    pre = sine_composite_gates(alpha) + (rabi(0, "y", 0, math.pi / 2.0, -_SQRT2 * alpha),)
    return ProtocolSpec("bypass-sine", 1, 1, pre, adjoint_gates(pre))


def three_scs_pipeline(alpha: float) -> ProtocolSpec:
    """Triangle of three peaks: two displacements and two Rabi gates shift
    the peaks onto rectangle corners, then the two-quadrature scheme runs
    with the first ancilla reused as the X-quadrature control."""
    a_r = 3.0 * alpha / 4.0
    a_i = math.sqrt(3.0) * alpha / 2.0
    pre = (
        Gate("disp", mode=0, delta=-alpha / 4.0),
        rabi(0, "x", 0, 0.0, math.pi / (3.0 * _SQRT2 * alpha)),
        rabi(0, "y", 0, 0.0, -math.sqrt(6.0) * alpha / 4.0),
        Gate("disp", mode=0, delta=-1j * math.sqrt(3.0) * alpha / 4.0),
        rabi(0, "y", 0, math.pi / 2.0, _SQRT2 * a_r),
        rabi(1, "x", 0, math.pi / 2.0, rabi_strength(a_i)),
        rabi(1, "y", 0, 0.0, -_SQRT2 * a_i),
    )
    return ProtocolSpec("bypass3", 1, 2, pre, adjoint_gates(pre))


def line_scs_pipeline(alpha: float) -> ProtocolSpec:
    """Four collinear peaks: a σ_y rotation tags inner/outer pairs, a
    controlled displacement folds them to ±2α, then the two-peak scheme runs
    at amplitude 2α on a second ancilla."""
    pre = (
        rabi(0, "y", 0, 0.0, rabi_strength(alpha)),
        rabi(0, "x", 0, math.pi / 2.0, _SQRT2 * alpha),
    ) + encode_gates_2scs(2.0 * alpha, mode=0, ancilla=1)
    return ProtocolSpec("bypass-line", 1, 2, pre, adjoint_gates(pre))


def lift_2scs_gates(alpha: float, mode: int = 0) -> tuple[Gate, ...]:
    """Gaussian lift: displace by iα and rotate by -π/4 to put the ±α peaks
    at √2α and i√2α (peak magnitude grows to √2α), then rotate by another
    -π/4 so both peaks sit at Re = +α where the two-quadrature encoder can
    grab them."""
    return (
        Gate("disp", mode=mode, delta=1j * alpha),
        Gate("rot", mode=mode, strength=-math.pi / 4.0),
        Gate("rot", mode=mode, strength=-math.pi / 4.0),
    )


def lift_2scs_to_4scs(alpha: float) -> ProtocolSpec:
    """Two-peak state protected with the two-quadrature scheme after the lift."""
    pre = lift_2scs_gates(alpha) + encode_gates_4scs(alpha, alpha)
    return ProtocolSpec("bypass-lift", 1, 2, pre, adjoint_gates(pre))


# ---------------------------------------------------------------------------
# execution
# ---------------------------------------------------------------------------

def _apply_filter(rho: DyadDensity, spec_str: str) -> tuple[DyadDensity, float]:
    """Apply a named measurement filter; returns (renormalized state, prob)."""
    parts = spec_str.split(":")
    kind = parts[0]
    if kind == "vacuum":
        mode = int(parts[1])
        rho = rho.apply_expansion(dyad.vacuum_projection_expansion(rho.layout, mode))
    elif kind == "qubit_g":
        anc = int(parts[1])
        rho = rho.apply_expansion(
            dyad.qubit_projection_expansion(rho.layout, anc, (1.0, 0.0)))
    elif kind == "code2":
        mode, alpha = int(parts[1]), float(parts[2])
        rho = rho.apply_expansion(dyad.coherent_subspace_projection_expansion(
            rho.layout, mode, (alpha, -alpha)))
    elif kind == "parity_correct":
        from .conditional import parity_corrected_state
        return parity_corrected_state(rho, int(parts[1]), int(parts[2]))
    else:
        raise LayoutError(f"unknown filter {spec_str!r}")
    prob = rho.trace()
    return rho.normalized(), prob


def run_protocol(spec: ProtocolSpec, state: HybridKet, eta: float,
                 p: float) -> tuple[DyadDensity, dict]:
    """Run a pipeline on the dyad backend.

    `state` must carry `spec.n_modes` oscillators; missing physical ancillas
    are appended in |g⟩, and any ancillas beyond the physical count are
    noiseless spectators (no gates, no dephasing).
    """
    if state.layout.n_modes != spec.n_modes:
        raise LayoutError("input mode count does not match protocol")
    if state.layout.n_ancillas < spec.n_ancillas:
        state = pad_ancillas(state, spec.n_ancillas)
    state = state.normalized()

    info: dict = {"success_prob": 1.0}
    ket = apply_gates(state, spec.gates_pre)
    rho = ket.to_density()

    if spec.filter_after_pre:
        rho, prob = _apply_filter(rho, spec.filter_after_pre)
        info["success_prob"] *= prob

    for m in range(spec.n_modes):
        rho = apply_loss(rho, LossChannel(eta, m))
    for a in range(spec.n_ancillas):
        rho = apply_dephasing(rho, DephasingChannel(p, a))

    rho = apply_gates(rho, spec.gates_post)

    if spec.filter_after_post:
        rho, prob = _apply_filter(rho, spec.filter_after_post)
        info["success_prob"] *= prob

    if spec.trace_out_ancillas and spec.n_ancillas:
        rho = rho.trace_out(ancillas=range(spec.n_ancillas))
    return rho, info


def required_mode_dim(alpha: float, margin: float = 0.5) -> int:
    """Fock dimension adequate for a bypass run: intermediate components can
    sit at twice the input amplitude."""
    from .. import fock as _fock
    return _fock.required_dim(2.0 * abs(alpha) + margin)


def displacement_budget(spec: ProtocolSpec, mode: int) -> float:
    """Worst-case displacement a pipeline can add to one mode's amplitude:
    every Rabi gate shifts a branch by |t|/√2, plus explicit displacements."""
    total = 0.0
    for g in spec.gates_pre + spec.gates_post:
        if g.kind == "rabi" and g.mode == mode:
            total += abs(g.strength) / _SQRT2
        elif g.kind == "disp" and g.mode == mode:
            total += abs(g.delta)
    return total


def adequate_mode_dim(spec: ProtocolSpec, state: HybridKet,
                      margin: float = 0.3, full_budget: bool = False) -> int:
    """Truncation covering the input amplitudes plus the pipeline's reach.

    The half budget covers the encoder (enough when the output is only
    contracted against low-lying reference states); `full_budget` also covers
    the decoder's reach and is required whenever filtered weights or reduced
    densities of the decoded state are consumed directly."""
    from .. import fock as _fock
    alpha_in = max((abs(a) for c in state.components for a in c.amps),
                   default=0.0)
    budget = max((displacement_budget(spec, m) for m in range(spec.n_modes)),
                 default=0.0)
    if not full_budget:
        budget = budget / 2.0
    return _fock.required_dim(alpha_in + budget + margin)
