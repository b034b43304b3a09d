"""Independent Fock-space execution of the same pipelines.

States evolve as an ensemble of pure branch vectors: unitaries act on every
branch, each Kraus operator of a channel spawns a new branch.  This keeps
two-mode protocols affordable (the density matrix is never materialized) and
shares no algebra with the dyad engine beyond the input-state bridge.
"""

from __future__ import annotations

import math

import numpy as np

from .. import fock
from ..dyad import HybridKet
from ..errors import LayoutError, ProjectionError
from .pipeline import (Gate, ProtocolSpec, adequate_mode_dim, pad_ancillas,
                       required_mode_dim)

_BRANCH_PRUNE = 1e-16  # squared-norm floor below which a branch is dropped


class BranchEnsemble:
    """ρ = Σ_b |v_b⟩⟨v_b| with unnormalized branch vectors v_b."""

    def __init__(self, layout: fock.HilbertLayout, vectors: list[np.ndarray]):
        self.layout = layout
        self.vectors = vectors

    def total_weight(self) -> float:
        return float(sum(np.vdot(v, v).real for v in self.vectors))

    def prune(self) -> None:
        self.vectors = [v for v in self.vectors
                        if np.vdot(v, v).real > _BRANCH_PRUNE]

    def apply_unitary_small(self, small: np.ndarray, axes: tuple[int, ...]) -> None:
        if len(axes) == 1:
            self.vectors = [fock.apply_one_site(v, self.layout, small, axes[0])
                            for v in self.vectors]
        elif len(axes) == 2:
            self.vectors = [fock.apply_two_site(v, self.layout, small, *axes)
                            for v in self.vectors]
        else:
            raise LayoutError("only one- and two-site operators supported")

    def apply_kraus(self, kraus: list[np.ndarray], axis: int) -> None:
        out = []
        for v in self.vectors:
            for k in kraus:
                out.append(fock.apply_one_site(v, self.layout, k, axis))
        self.vectors = out
        self.prune()

    def expect_with_vector(self, ref: np.ndarray) -> float:
        """⟨ref|ρ|ref⟩."""
        return float(sum(abs(np.vdot(ref, v)) ** 2 for v in self.vectors))

    def reduced_density(self, keep_axes: list[int]) -> fock.FockOperator:
        dims = self.layout.dims
        n = len(dims)
        drop = [i for i in range(n) if i not in keep_axes]
        d_keep = int(np.prod([dims[i] for i in keep_axes], dtype=np.int64))
        rho = np.zeros((d_keep, d_keep), dtype=complex)
        for v in self.vectors:
            t = v.reshape(dims).transpose(keep_axes + drop).reshape(d_keep, -1)
            rho += t @ t.conj().T
        kept_modes = tuple(dims[i] for i in keep_axes if i < self.layout.n_modes)
        kept_anc = sum(1 for i in keep_axes if i >= self.layout.n_modes)
        return fock.FockOperator(fock.HilbertLayout(kept_modes, kept_anc), rho)


def _gate_small(layout: fock.HilbertLayout, g: Gate) -> tuple[np.ndarray, tuple[int, ...]]:
    if g.kind == "rabi":
        ax_m = layout.mode_axis(g.mode)
        ax_a = layout.ancilla_axis(g.ancilla)
        u = fock.rabi_unitary_small(layout, g.ancilla, g.axis, g.mode,
                                    g.quad_angle, g.strength)
        return u, (ax_m, ax_a)
    if g.kind == "qrot":
        u = fock.expm_hermitian(fock.pauli(g.axis), g.strength)
        return u, (layout.ancilla_axis(g.ancilla),)
    if g.kind == "disp":
        d = layout.mode_dims[g.mode]
        return fock.displacement(g.delta, d), (layout.mode_axis(g.mode),)
    if g.kind == "rot":
        d = layout.mode_dims[g.mode]
        return fock.phase_rotation(g.strength, d), (layout.mode_axis(g.mode),)
    if g.kind in ("bs", "bs_inv"):
        m1, m2 = (g.mode, g.mode2) if g.kind == "bs" else (g.mode2, g.mode)
        u = fock.beam_splitter(layout.mode_dims[m1], layout.mode_dims[m2])
        return u, (layout.mode_axis(m1), layout.mode_axis(m2))
    raise LayoutError(f"unknown gate kind {g.kind!r}")


def apply_gates_fock(ens: BranchEnsemble, gates) -> None:
    for g in gates:
        small, axes = _gate_small(ens.layout, g)
        ens.apply_unitary_small(small, axes)


def _apply_filter_fock(ens: BranchEnsemble, spec_str: str) -> float:
    parts = spec_str.split(":")
    kind = parts[0]
    layout = ens.layout
    if kind == "vacuum":
        mode = int(parts[1])
        d = layout.mode_dims[mode]
        proj = np.zeros((d, d), dtype=complex)
        proj[0, 0] = 1.0
        ens.apply_unitary_small(proj, (layout.mode_axis(mode),))
    elif kind == "qubit_g":
        anc = int(parts[1])
        proj = np.diag([1.0, 0.0]).astype(complex)
        ens.apply_unitary_small(proj, (layout.ancilla_axis(anc),))
    elif kind == "code2":
        mode, alpha = int(parts[1]), float(parts[2])
        d = layout.mode_dims[mode]
        basis = np.column_stack([fock.coherent_vec(alpha, d),
                                 fock.coherent_vec(-alpha, d)])
        gram_inv = np.linalg.inv(basis.conj().T @ basis)
        proj = basis @ gram_inv @ basis.conj().T
        ens.apply_unitary_small(proj, (layout.mode_axis(mode),))
    elif kind == "parity_correct":
        mode, anc = int(parts[1]), int(parts[2])
        d = layout.mode_dims[mode]
        par = fock.parity(d)
        even = 0.5 * (np.eye(d) + par)
        odd = 0.5 * (np.eye(d) - par)
        sz = fock.pauli("z")
        new = []
        for v in ens.vectors:
            new.append(fock.apply_one_site(v, layout, even, layout.mode_axis(mode)))
            w = fock.apply_one_site(v, layout, odd, layout.mode_axis(mode))
            new.append(fock.apply_one_site(w, layout, sz, layout.ancilla_axis(anc)))
        ens.vectors = new
        ens.prune()
        return ens.total_weight()
    else:
        raise LayoutError(f"unknown filter {spec_str!r}")
    ens.prune()
    weight = ens.total_weight()
    if weight <= 0:
        raise ProjectionError(f"filter {spec_str!r} has zero probability")
    return weight


def run_protocol_fock(spec: ProtocolSpec, state: HybridKet, eta: float, p: float,
                      mode_dim: int | None = None,
                      check_truncation: bool = True) -> tuple[BranchEnsemble, dict]:
    """Run a pipeline on the Fock backend; the input crosses over through the
    coherent-state bridge, everything after that is dense linear algebra."""
    if state.layout.n_modes != spec.n_modes:
        raise LayoutError("input mode count does not match protocol")
    if state.layout.n_ancillas < spec.n_ancillas:
        state = pad_ancillas(state, spec.n_ancillas)
    state = state.normalized()

    if mode_dim is None:
        mode_dim = adequate_mode_dim(spec, state, full_budget=True)
    vec = state.to_fock([mode_dim] * spec.n_modes)
    layout = vec.layout
    ens = BranchEnsemble(layout, [vec.entries])

    info: dict = {"success_prob": 1.0}
    apply_gates_fock(ens, spec.gates_pre)
    if check_truncation:
        for v in ens.vectors:
            fock.check_truncation(v, layout)

    if spec.filter_after_pre:
        before = ens.total_weight()
        info["success_prob"] *= _apply_filter_fock(ens, spec.filter_after_pre) / before

    for m in range(spec.n_modes):
        ens.apply_kraus(fock.loss_kraus(eta, layout.mode_dims[m]),
                        layout.mode_axis(m))
    for a in range(spec.n_ancillas):
        ens.apply_kraus(fock.dephasing_kraus(p), layout.ancilla_axis(a))

    apply_gates_fock(ens, spec.gates_post)

    if spec.filter_after_post:
        before = ens.total_weight()
        info["success_prob"] *= _apply_filter_fock(ens, spec.filter_after_post) / before

    return ens, info


def output_fidelity_fock_streaming(spec: ProtocolSpec, state: HybridKet,
                                   reference: HybridKet, eta: float, p: float,
                                   mode_dim: int | None = None) -> float:
    """Memory-light variant of :func:`output_fidelity_fock` for filter-free
    pipelines: the reference is pulled backwards through the decoder once,
    then channel branches are enumerated one Kraus combination at a time.
    """
    import itertools

    if spec.filter_after_pre or spec.filter_after_post:
        raise LayoutError("streaming fidelity does not support filters")
    if state.layout.n_modes != spec.n_modes:
        raise LayoutError("input mode count does not match protocol")
    if state.layout.n_ancillas < spec.n_ancillas:
        state = pad_ancillas(state, spec.n_ancillas)
    state = state.normalized()
    if mode_dim is None:
        mode_dim = adequate_mode_dim(spec, state)
    vec = state.to_fock([mode_dim] * spec.n_modes)
    layout = vec.layout
    enc = BranchEnsemble(layout, [vec.entries])
    apply_gates_fock(enc, spec.gates_pre)
    fock.check_truncation(enc.vectors[0], layout)
    psi = enc.vectors[0]

    # rows of M = (⟨ref on kept subsystems| ⊗ I on traced ancillas) · U_post,
    # built by adjoint-evolving each reference ⊗ ancilla-basis bra
    n_anc_total = layout.ancilla_count
    if spec.trace_out_ancillas and spec.n_ancillas:
        n_keep = n_anc_total - spec.n_ancillas
        if reference.layout.n_ancillas != n_keep:
            raise LayoutError("reference must live on the kept subsystems")
        traced_bits = list(itertools.product((0, 1), repeat=spec.n_ancillas))
        ref_rows = []
        ref_norm = reference.normalized()
        for bits in traced_bits:
            lifted = _lift_reference(ref_norm, bits, spec.n_ancillas)
            ref_rows.append(lifted.to_fock([mode_dim] * spec.n_modes).entries)
    else:
        ref_rows = [pad_ancillas(reference, n_anc_total).normalized()
                    .to_fock([mode_dim] * spec.n_modes).entries]

    adj = BranchEnsemble(layout, list(ref_rows))
    from .pipeline import adjoint_gates
    apply_gates_fock(adj, adjoint_gates(spec.gates_post))
    bras = [v.conj() for v in adj.vectors]

    kraus_plan = []
    for m in range(spec.n_modes):
        kraus_plan.append((layout.mode_axis(m),
                           fock.loss_kraus(eta, layout.mode_dims[m])))
    for a in range(spec.n_ancillas):
        kraus_plan.append((layout.ancilla_axis(a), fock.dephasing_kraus(p)))

    num = 0.0
    den = 0.0
    axes = [ax for ax, _ in kraus_plan]
    for combo in itertools.product(*[ks for _, ks in kraus_plan]):
        v = psi
        for ax, k in zip(axes, combo):
            v = fock.apply_one_site(v, layout, k, ax)
        w = float(np.vdot(v, v).real)
        if w < _BRANCH_PRUNE:
            continue
        den += w
        num += sum(abs(bra @ v) ** 2 for bra in bras)
    return num / den


def _lift_reference(reference: HybridKet, traced_bits, n_traced: int) -> HybridKet:
    """Insert definite bits for the traced ancillas ahead of the kept ones."""
    from ..dyad import DyadLayout, HybridComponent

    comps = [HybridComponent(tuple(traced_bits) + c.bits, c.amps)
             for c in reference.components]
    layout = DyadLayout(reference.layout.n_modes,
                        n_traced + reference.layout.n_ancillas)
    return HybridKet(layout, comps, reference.coeffs)


def output_fidelity_fock(spec: ProtocolSpec, state: HybridKet, reference: HybridKet,
                         eta: float, p: float, mode_dim: int | None = None) -> float:
    """⟨ref|ρ_out|ref⟩ with the pure reference supplied as a dyad-engine ket.

    When the protocol traces out its physical ancillas, the reference must
    live on the kept subsystems (modes plus any spectator ancillas);
    otherwise it is padded with |g⟩ ancillas to the full layout.
    """
    ens, _ = run_protocol_fock(spec, state, eta, p, mode_dim=mode_dim)
    total = ens.total_weight()
    n_anc_total = ens.layout.ancilla_count
    mode_dims = list(ens.layout.mode_dims)
    if spec.trace_out_ancillas and spec.n_ancillas:
        n_keep_anc = n_anc_total - spec.n_ancillas
        if reference.layout.n_ancillas != n_keep_anc:
            raise LayoutError("reference must live on the kept subsystems")
        keep = list(range(ens.layout.n_modes)) + [
            ens.layout.n_modes + a for a in range(spec.n_ancillas, n_anc_total)]
        rho = ens.reduced_density(keep).entries / total
        vec = reference.normalized().to_fock(mode_dims).entries
        return float(np.real(vec.conj() @ rho @ vec))
    reference = pad_ancillas(reference, n_anc_total).normalized()
    ref_vec = reference.to_fock(mode_dims).entries
    return ens.expect_with_vector(ref_vec) / total
