"""Exact engine for states spanned by qubit ⊗ coherent components.

States are finite superpositions of basis terms |bits⟩ ⊗ |β₁⟩|β₂⟩…, density
operators are coefficient tables over (ket component, bra component) pairs.
Every gate, channel, and metric used by the protection protocols has a closed
form in this non-orthogonal basis, so results are exact at any amplitude,
with cost set only by the number of components.

Conventions match :mod:`catbypass.fock` (standard Pauli matrices in the
(|g⟩, |e⟩) basis, X = (a+a†)/√2, D(δ) = exp(δa† - δ*a)) and

    D(δ)|β⟩ = exp[(δβ* - δ*β)/2] |β+δ⟩
    exp[i t σ_axis X_Φ] = controlled displacement D(i t s e^{iΦ}/√2)
                          on the σ_axis eigenvalue-s branch
    ⟨γ|β⟩ = exp(-|γ|²/2 - |β|²/2 + γ*β).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import fock
from .errors import DegenerateBasisError, LayoutError, ProjectionError

COEFF_TOL = 1e-12   # relative weight below which a component is dropped
MERGE_TOL = 1e-10   # amplitude distance below which components merge
RANK_TOL = 1e-12    # Gram singular values kept relative to the largest

_SQRT2 = math.sqrt(2.0)

# Eigenbasis columns for each Pauli axis, ordered (s=+1, s=-1).
_EIGENBASIS = {
    "x": np.array([[1, 1], [1, -1]], dtype=complex) / _SQRT2,
    "y": np.array([[1, 1], [1j, -1j]], dtype=complex) / _SQRT2,
    "z": np.array([[1, 0], [0, 1]], dtype=complex),
}


@dataclass(frozen=True)
class DyadLayout:
    n_modes: int
    n_ancillas: int

    def check_mode(self, mode: int) -> None:
        if not 0 <= mode < self.n_modes:
            raise LayoutError(f"mode {mode} out of range for {self}")

    def check_ancilla(self, ancilla: int) -> None:
        if not 0 <= ancilla < self.n_ancillas:
            raise LayoutError(f"ancilla {ancilla} out of range for {self}")


@dataclass(frozen=True)
class HybridComponent:
    """One basis term: per-ancilla σ_z bit (0=|g⟩, 1=|e⟩) and per-mode amplitude."""

    bits: tuple[int, ...]
    amps: tuple[complex, ...]

    def merge_key(self, tol: float = MERGE_TOL) -> tuple:
        rounded = tuple((round(a.real / tol), round(a.imag / tol)) for a in self.amps)
        return self.bits, rounded


def coherent_overlap(bra: complex, ket: complex) -> complex:
    """⟨bra|ket⟩ for two coherent amplitudes."""
    return np.exp(-0.5 * abs(bra) ** 2 - 0.5 * abs(ket) ** 2 + np.conj(bra) * ket)


def overlap(a: HybridComponent, b: HybridComponent) -> complex:
    """⟨a|b⟩: qubit-bit Kronecker delta times the product of coherent overlaps."""
    if len(a.amps) != len(b.amps) or len(a.bits) != len(b.bits):
        raise LayoutError("components live on different layouts")
    if a.bits != b.bits:
        return 0.0
    out = 1.0 + 0.0j
    for x, y in zip(a.amps, b.amps):
        out *= coherent_overlap(x, y)
    return complex(out)


def _amps_matrix(components: Sequence[HybridComponent]) -> np.ndarray:
    if not components:
        return np.zeros((0, 0), dtype=complex)
    return np.array([c.amps for c in components], dtype=complex)


def _bits_matrix(components: Sequence[HybridComponent]) -> np.ndarray:
    if not components:
        return np.zeros((0, 0), dtype=np.int8)
    return np.array([c.bits for c in components], dtype=np.int8)


def gram_matrix(components: Sequence[HybridComponent]) -> np.ndarray:
    """G[j, k] = ⟨component_j | component_k⟩."""
    n = len(components)
    a = _amps_matrix(components)
    g = np.ones((n, n), dtype=complex)
    if a.size:
        sq = np.sum(np.abs(a) ** 2, axis=1)
        g = np.exp(-0.5 * sq[:, None] - 0.5 * sq[None, :] + a.conj() @ a.T)
    bits = _bits_matrix(components)
    if bits.size:
        same = (bits[:, None, :] == bits[None, :, :]).all(axis=2)
        g = g * same
    return g


def _pair_overlap_factors(components: Sequence[HybridComponent],
                          modes: Sequence[int],
                          ancillas: Sequence[int]) -> np.ndarray:
    """F[j, k] = ⟨bra side of k | ket side of j⟩ restricted to the given
    modes/ancillas, i.e. the factor produced by tracing them out of
    |c_j⟩⟨c_k|."""
    n = len(components)
    f = np.ones((n, n), dtype=complex)
    a = _amps_matrix(components)
    for m in modes:
        col = a[:, m]
        sq = np.abs(col) ** 2
        # tr_m |β_j⟩⟨γ_k| = ⟨γ_k|β_j⟩
        f = f * np.exp(-0.5 * sq[:, None] - 0.5 * sq[None, :]
                       + col[:, None] * col.conj()[None, :])
    bits = _bits_matrix(components)
    for anc in ancillas:
        same = bits[:, anc][:, None] == bits[:, anc][None, :]
        f = f * same
    return f


# ---------------------------------------------------------------------------
# component expansions (shared by ket and density application)
# ---------------------------------------------------------------------------

Expansion = Callable[[HybridComponent], list[tuple[HybridComponent, complex]]]


def _displace_amp(amp: complex, delta: complex) -> tuple[complex, complex]:
    phase = np.exp(0.5 * (delta * np.conj(amp) - np.conj(delta) * amp))
    return amp + delta, complex(phase)


def displacement_expansion(layout: DyadLayout, mode: int, delta: complex) -> Expansion:
    layout.check_mode(mode)

    def fn(c: HybridComponent):
        new_amp, phase = _displace_amp(c.amps[mode], delta)
        amps = c.amps[:mode] + (complex(new_amp),) + c.amps[mode + 1:]
        return [(HybridComponent(c.bits, amps), phase)]

    return fn


def phase_rotation_expansion(layout: DyadLayout, mode: int, theta: float) -> Expansion:
    layout.check_mode(mode)
    factor = complex(np.exp(1j * theta))

    def fn(c: HybridComponent):
        amps = c.amps[:mode] + (c.amps[mode] * factor,) + c.amps[mode + 1:]
        return [(HybridComponent(c.bits, amps), 1.0 + 0.0j)]

    return fn


def qubit_rotation_expansion(layout: DyadLayout, ancilla: int, axis: str,
                             angle: float) -> Expansion:
    """exp[iθ σ_axis] on one ancilla."""
    layout.check_ancilla(ancilla)
    u = math.cos(angle) * np.eye(2, dtype=complex) + 1j * math.sin(angle) * fock.pauli(axis)

    def fn(c: HybridComponent):
        b = c.bits[ancilla]
        out = []
        for b2 in (0, 1):
            w = u[b2, b]
            if w != 0:
                bits = c.bits[:ancilla] + (b2,) + c.bits[ancilla + 1:]
                out.append((HybridComponent(bits, c.amps), complex(w)))
        return out

    return fn


def rabi_expansion(layout: DyadLayout, ancilla: int, pauli_axis: str, mode: int,
                   quad_angle: float, strength: float) -> Expansion:
    """exp[i t σ_axis X_Φ]: expand the qubit in the σ_axis eigenbasis and give
    the eigenvalue-s branch the controlled displacement D(i t s e^{iΦ}/√2)."""
    layout.check_mode(mode)
    layout.check_ancilla(ancilla)
    if pauli_axis not in _EIGENBASIS:
        raise LayoutError(f"unknown Pauli axis {pauli_axis!r}")
    v = _EIGENBASIS[pauli_axis]
    deltas = [1j * strength * s * np.exp(1j * quad_angle) / _SQRT2 for s in (1.0, -1.0)]

    def fn(c: HybridComponent):
        b = c.bits[ancilla]
        out = []
        for k, delta in enumerate(deltas):
            branch = np.conj(v[b, k])  # ⟨s_k|b⟩
            if branch == 0:
                continue
            new_amp, phase = _displace_amp(c.amps[mode], delta)
            amps = c.amps[:mode] + (complex(new_amp),) + c.amps[mode + 1:]
            for b2 in (0, 1):
                w = branch * v[b2, k] * phase
                if w != 0:
                    bits = c.bits[:ancilla] + (b2,) + c.bits[ancilla + 1:]
                    out.append((HybridComponent(bits, amps), complex(w)))
        return out

    return fn


def beam_splitter_expansion(layout: DyadLayout, mode1: int, mode2: int) -> Expansion:
    """Balanced beam splitter: (β₁, β₂) → ((β₁+β₂)/√2, (β₁-β₂)/√2)."""
    layout.check_mode(mode1)
    layout.check_mode(mode2)

    def fn(c: HybridComponent):
        b1, b2 = c.amps[mode1], c.amps[mode2]
        amps = list(c.amps)
        amps[mode1] = (b1 + b2) / _SQRT2
        amps[mode2] = (b1 - b2) / _SQRT2
        return [(HybridComponent(c.bits, tuple(amps)), 1.0 + 0.0j)]

    return fn


def vacuum_projection_expansion(layout: DyadLayout, mode: int) -> Expansion:
    """|0⟩⟨0| on one mode (not trace preserving)."""
    layout.check_mode(mode)

    def fn(c: HybridComponent):
        w = complex(np.exp(-0.5 * abs(c.amps[mode]) ** 2))  # ⟨0|β⟩
        amps = c.amps[:mode] + (0.0 + 0.0j,) + c.amps[mode + 1:]
        return [(HybridComponent(c.bits, amps), w)]

    return fn


def parity_projection_expansion(layout: DyadLayout, mode: int, even: bool) -> Expansion:
    """(1 ± Π)/2 on one mode, using Π|β⟩ = |-β⟩."""
    layout.check_mode(mode)
    sign = 1.0 if even else -1.0

    def fn(c: HybridComponent):
        flipped = c.amps[:mode] + (-c.amps[mode],) + c.amps[mode + 1:]
        return [(c, 0.5 + 0.0j),
                (HybridComponent(c.bits, flipped), complex(0.5 * sign))]

    return fn


def coherent_subspace_projection_expansion(layout: DyadLayout, mode: int,
                                           basis_amps: Sequence[complex]) -> Expansion:
    """Projector onto the span of a few coherent states on one mode.

    With Gram matrix M of the basis, P|β⟩ = Σ_i c_i |v_i⟩ where
    c = M⁻¹ (⟨v_j|β⟩)_j, so the result stays inside the component algebra.
    """
    layout.check_mode(mode)
    basis = [complex(v) for v in basis_amps]
    m = np.array([[coherent_overlap(a, b) for b in basis] for a in basis])
    m_inv = np.linalg.inv(m)

    def fn(c: HybridComponent):
        beta = c.amps[mode]
        g = np.array([coherent_overlap(v, beta) for v in basis])
        weights = m_inv @ g
        out = []
        for v, w in zip(basis, weights):
            if w == 0:
                continue
            amps = c.amps[:mode] + (v,) + c.amps[mode + 1:]
            out.append((HybridComponent(c.bits, amps), complex(w)))
        return out

    return fn


def even_nonvacuum_projection_expansion(layout: DyadLayout, mode: int) -> Expansion:
    """Projector onto even photon numbers ≥ 2 (the even subspace minus the
    vacuum); a genuine projector since |0⟩ lies inside the even subspace."""
    layout.check_mode(mode)

    def fn(c: HybridComponent):
        beta = c.amps[mode]
        flipped = c.amps[:mode] + (-beta,) + c.amps[mode + 1:]
        zeroed = c.amps[:mode] + (0.0 + 0.0j,) + c.amps[mode + 1:]
        return [(c, 0.5 + 0.0j),
                (HybridComponent(c.bits, flipped), 0.5 + 0.0j),
                (HybridComponent(c.bits, zeroed),
                 complex(-np.exp(-0.5 * abs(beta) ** 2)))]

    return fn


def qubit_projection_expansion(layout: DyadLayout, ancilla: int,
                               target: Sequence[complex]) -> Expansion:
    """|φ⟩⟨φ| on one ancilla, with φ given in the (|g⟩, |e⟩) basis."""
    layout.check_ancilla(ancilla)
    phi = np.asarray(target, dtype=complex)
    phi = phi / np.linalg.norm(phi)

    def fn(c: HybridComponent):
        b = c.bits[ancilla]
        out = []
        for b2 in (0, 1):
            w = phi[b2] * np.conj(phi[b])
            if w != 0:
                bits = c.bits[:ancilla] + (b2,) + c.bits[ancilla + 1:]
                out.append((HybridComponent(bits, c.amps), complex(w)))
        return out

    return fn


def _expand(components: Sequence[HybridComponent], fn: Expansion,
            merge_tol: float = MERGE_TOL):
    """Apply a component expansion; returns merged children and the sparse
    transfer matrix W with new coefficients = W @ old coefficients."""
    from scipy import sparse

    index: dict[tuple, int] = {}
    children: list[HybridComponent] = []
    rows: list[int] = []
    cols: list[int] = []
    vals: list[complex] = []
    for j, comp in enumerate(components):
        for child, w in fn(comp):
            key = child.merge_key(merge_tol)
            i = index.get(key)
            if i is None:
                i = len(children)
                index[key] = i
                children.append(child)
            rows.append(i)
            cols.append(j)
            vals.append(w)
    w_mat = sparse.csr_matrix((vals, (rows, cols)),
                              shape=(len(children), len(components)),
                              dtype=complex)
    return children, w_mat


def _merge_components(components: Sequence[HybridComponent],
                      merge_tol: float = MERGE_TOL):
    """Identity expansion: collapses components that coincide within tolerance."""
    return _expand(components, lambda c: [(c, 1.0 + 0.0j)], merge_tol)


def _sandwich(w_mat, coeffs: np.ndarray) -> np.ndarray:
    """W C W† for sparse W and Hermitian-ish dense C."""
    a = w_mat @ coeffs                       # (new, old)
    return (w_mat @ a.conj().T).conj().T     # (new, new)


# ---------------------------------------------------------------------------
# pure states
# ---------------------------------------------------------------------------

class HybridKet:
    """Finite superposition of hybrid components."""

    def __init__(self, layout: DyadLayout, components: Sequence[HybridComponent],
                 coeffs: Sequence[complex]):
        if len(components) != len(coeffs):
            raise LayoutError("component/coefficient length mismatch")
        for c in components:
            if len(c.amps) != layout.n_modes or len(c.bits) != layout.n_ancillas:
                raise LayoutError("component does not match layout")
        self.layout = layout
        self.components = list(components)
        self.coeffs = np.asarray(coeffs, dtype=complex)

    # -- norm and overlaps --------------------------------------------------
    def gram(self) -> np.ndarray:
        return gram_matrix(self.components)

    def norm_squared(self) -> float:
        g = self.gram()
        val = np.real(self.coeffs.conj() @ g @ self.coeffs)
        return float(val)

    def normalized(self) -> "HybridKet":
        n2 = self.norm_squared()
        if n2 <= 0:
            raise ProjectionError("state has zero norm")
        return HybridKet(self.layout, self.components, self.coeffs / math.sqrt(n2))

    def inner(self, other: "HybridKet") -> complex:
        """⟨self|other⟩."""
        if self.layout != other.layout:
            raise LayoutError("layout mismatch")
        cross = _cross_gram(self.components, other.components)
        return complex(self.coeffs.conj() @ cross @ other.coeffs)

    def fidelity(self, other: "HybridKet") -> float:
        return float(abs(self.inner(other)) ** 2)

    # -- transformations ----------------------------------------------------
    def apply_expansion(self, fn: Expansion) -> "HybridKet":
        comps, w = _expand(self.components, fn)
        return HybridKet(self.layout, comps, np.asarray(w @ self.coeffs)).pruned()

    def pruned(self, coeff_tol: float = COEFF_TOL,
               merge_tol: float = MERGE_TOL) -> "HybridKet":
        comps, w = _merge_components(self.components, merge_tol)
        coeffs = np.asarray(w @ self.coeffs)
        scale = float(np.max(np.abs(coeffs))) if coeffs.size else 0.0
        keep = np.abs(coeffs) > coeff_tol * scale
        comps = [c for c, k in zip(comps, keep) if k]
        coeffs = coeffs[keep]
        return HybridKet(self.layout, comps, coeffs)

    def to_density(self) -> "DyadDensity":
        c = np.outer(self.coeffs, self.coeffs.conj())
        return DyadDensity(self.layout, list(self.components), c)

    def to_fock(self, mode_dims: Sequence[int]) -> fock.FockStateVector:
        """Expand into a truncated Fock-space vector (oracle bridge)."""
        if len(mode_dims) != self.layout.n_modes:
            raise LayoutError("mode_dims does not match layout")
        fl = fock.HilbertLayout(tuple(mode_dims), self.layout.n_ancillas)
        vec = np.zeros(fl.total_dim, dtype=complex)
        for comp, w in zip(self.components, self.coeffs):
            factors = [fock.coherent_vec(a, d) for a, d in zip(comp.amps, mode_dims)]
            vec += w * fock.product_state(fl, factors, comp.bits).entries
        return fock.FockStateVector(fl, vec)

    # -- mode expectations ---------------------------------------------------
    def mean_photon(self, mode: int) -> float:
        return self.to_density().mean_photon(mode)


def hybrid_ket(layout: DyadLayout,
               terms: Iterable[tuple[complex, Sequence[int], Sequence[complex]]],
               normalize: bool = True) -> HybridKet:
    """Build a ket from (coefficient, bits, amps) terms."""
    comps, coeffs = [], []
    for w, bits, amps in terms:
        comps.append(HybridComponent(tuple(int(b) for b in bits),
                                     tuple(complex(a) for a in amps)))
        coeffs.append(complex(w))
    ket = HybridKet(layout, comps, coeffs).pruned()
    return ket.normalized() if normalize else ket


# ---------------------------------------------------------------------------
# density operators
# ---------------------------------------------------------------------------

class DyadDensity:
    """ρ = Σ_{jk} C[j,k] |c_j⟩⟨c_k| over a shared component list."""

    def __init__(self, layout: DyadLayout, components: Sequence[HybridComponent],
                 coeffs: np.ndarray):
        coeffs = np.asarray(coeffs, dtype=complex)
        n = len(components)
        if coeffs.shape != (n, n):
            raise LayoutError("coefficient table shape mismatch")
        for c in components:
            if len(c.amps) != layout.n_modes or len(c.bits) != layout.n_ancillas:
                raise LayoutError("component does not match layout")
        self.layout = layout
        self.components = list(components)
        self.coeffs = coeffs

    # -- basic functionals ----------------------------------------------------
    def gram(self) -> np.ndarray:
        return gram_matrix(self.components)

    def trace(self) -> float:
        g = self.gram()
        val = np.einsum("jk,kj->", self.coeffs, g)
        return float(np.real(val))

    def normalized(self) -> "DyadDensity":
        t = self.trace()
        if abs(t) < 1e-300:
            raise ProjectionError("density has zero trace")
        return DyadDensity(self.layout, self.components, self.coeffs / t)

    def expect_with_ket(self, psi: HybridKet) -> float:
        """⟨ψ|ρ|ψ⟩ via Gram contraction."""
        if psi.layout != self.layout:
            raise LayoutError("layout mismatch")
        cross = _cross_gram(psi.components, self.components)
        v = psi.coeffs.conj() @ cross  # v_j = ⟨ψ|c_j⟩
        return float(np.real(v @ self.coeffs @ v.conj()))

    def dyad_coefficient(self, ket: HybridComponent, bra: HybridComponent,
                         tol: float = 1e-9) -> complex:
        """Look up C[j,k] for the dyad |ket⟩⟨bra| (0 if absent)."""
        total = 0.0 + 0.0j
        for j, cj in enumerate(self.components):
            if cj.bits != ket.bits or any(abs(x - y) > tol
                                          for x, y in zip(cj.amps, ket.amps)):
                continue
            for k, ck in enumerate(self.components):
                if ck.bits == bra.bits and all(abs(x - y) <= tol
                                               for x, y in zip(ck.amps, bra.amps)):
                    total += self.coeffs[j, k]
        return complex(total)

    # -- spectra ---------------------------------------------------------------
    def eigenvalues(self, rank_tol: float = RANK_TOL) -> np.ndarray:
        """Eigenvalues of ρ restricted to the component span.

        The non-orthogonal basis is orthonormalized through the Gram matrix:
        with G = V S V† (keeping singular values above rank_tol), the matrix
        S^{1/2} V† C V S^{1/2} is Hermitian and shares ρ's nonzero spectrum.
        """
        g = self.gram()
        vals, vecs = np.linalg.eigh(g)
        keep = vals > rank_tol * max(float(vals[-1]), 0.0)
        if not np.any(keep):
            raise DegenerateBasisError("Gram matrix has no usable singular values")
        b = (vecs[:, keep] * np.sqrt(vals[keep])).conj().T
        m = b @ self.coeffs @ b.conj().T
        m = 0.5 * (m + m.conj().T)
        return np.linalg.eigvalsh(m)

    def trace_norm(self) -> float:
        return float(np.sum(np.abs(self.eigenvalues())))

    # -- transformations --------------------------------------------------------
    def apply_expansion(self, fn: Expansion) -> "DyadDensity":
        comps, w = _expand(self.components, fn)
        return DyadDensity(self.layout, comps,
                           _sandwich(w, self.coeffs)).pruned()

    def pruned(self, coeff_tol: float = COEFF_TOL,
               merge_tol: float = MERGE_TOL) -> "DyadDensity":
        comps, w = _merge_components(self.components, merge_tol)
        if len(comps) == len(self.components):
            c = self.coeffs          # nothing merged: W is the identity
        else:
            c = _sandwich(w, self.coeffs)
        if c.size:
            weight = np.abs(c).sum(axis=0) + np.abs(c).sum(axis=1)
            keep = weight > coeff_tol * float(np.max(weight))
            comps = [x for x, k in zip(comps, keep) if k]
            c = c[np.ix_(keep, keep)]
        return DyadDensity(self.layout, comps, c)

    def trace_out(self, modes: Sequence[int] = (),
                  ancillas: Sequence[int] = ()) -> "DyadDensity":
        """Discard the listed subsystems."""
        for m in modes:
            self.layout.check_mode(m)
        for a in ancillas:
            self.layout.check_ancilla(a)
        f = _pair_overlap_factors(self.components, modes, ancillas)
        keep_modes = [m for m in range(self.layout.n_modes) if m not in set(modes)]
        keep_anc = [a for a in range(self.layout.n_ancillas) if a not in set(ancillas)]
        comps = [HybridComponent(tuple(c.bits[a] for a in keep_anc),
                                 tuple(c.amps[m] for m in keep_modes))
                 for c in self.components]
        layout = DyadLayout(len(keep_modes), len(keep_anc))
        out = DyadDensity(layout, comps, self.coeffs * f)
        return out.pruned()

    def partial_transpose(self, modes: Sequence[int] = (),
                          ancillas: Sequence[int] = ()) -> "DyadDensity":
        """Transpose the listed subsystems.

        On a transposed mode |β⟩⟨γ| ↦ |γ*⟩⟨β*|; on a transposed ancilla the
        bra/ket bits swap.  The shared component list generally does not
        survive, so new components are formed from (ket, bra) pairs.
        """
        t_modes = set(modes)
        t_anc = set(ancillas)
        for m in t_modes:
            self.layout.check_mode(m)
        for a in t_anc:
            self.layout.check_ancilla(a)
        n = len(self.components)

        # every new component pairs the untouched half of one old component
        # with the transposed half of another, so label the halves once and
        # index pairs of labels instead of looping over n² dyads
        def untouched_key(c: HybridComponent) -> tuple:
            amps = tuple(a for m, a in enumerate(c.amps) if m not in t_modes)
            bits = tuple(b for a, b in enumerate(c.bits) if a not in t_anc)
            return HybridComponent(bits, amps).merge_key()

        def transposed_key(c: HybridComponent) -> tuple:
            amps = tuple(complex(np.conj(c.amps[m])) for m in sorted(t_modes))
            bits = tuple(c.bits[a] for a in sorted(t_anc))
            return HybridComponent(bits, amps).merge_key()

        def combined(keep: HybridComponent, swap: HybridComponent) -> HybridComponent:
            amps = tuple(complex(np.conj(swap.amps[m])) if m in t_modes
                         else keep.amps[m] for m in range(self.layout.n_modes))
            bits = tuple(swap.bits[a] if a in t_anc else keep.bits[a]
                         for a in range(self.layout.n_ancillas))
            return HybridComponent(bits, amps)

        u_ids = np.zeros(n, dtype=np.int64)
        t_ids = np.zeros(n, dtype=np.int64)
        u_index: dict[tuple, int] = {}
        t_index: dict[tuple, int] = {}
        for i, c in enumerate(self.components):
            u_ids[i] = u_index.setdefault(untouched_key(c), len(u_index))
            t_ids[i] = t_index.setdefault(transposed_key(c), len(t_index))

        pair = u_ids[:, None] * max(len(t_index), 1) + t_ids[None, :]
        uniq, inv_flat = np.unique(pair, return_inverse=True)
        inv = inv_flat.reshape(n, n)
        comps: list = [None] * len(uniq)
        for flat, i in enumerate(inv.flat):
            if comps[i] is None:
                comps[i] = combined(self.components[flat // n],
                                    self.components[flat % n])
        c = np.zeros((len(uniq), len(uniq)), dtype=complex)
        np.add.at(c, (inv, inv.T), self.coeffs)
        return DyadDensity(self.layout, comps, c).pruned()

    # -- phase space ----------------------------------------------------------
    def _reduced_pairs(self, mode: int) -> tuple[np.ndarray, np.ndarray]:
        """Contract all subsystems except `mode`; returns (amps, weight table)."""
        self.layout.check_mode(mode)
        other_modes = [m for m in range(self.layout.n_modes) if m != mode]
        f = _pair_overlap_factors(self.components, other_modes,
                                  range(self.layout.n_ancillas))
        amps = _amps_matrix(self.components)[:, mode]
        return amps, self.coeffs * f

    def wigner(self, mode: int, zetas) -> np.ndarray:
        """Wigner function of the reduced state of `mode` at complex points ζ.

        Closed form per dyad:
        W_{|β⟩⟨γ|}(ζ) = (2/π) e^{-2|ζ|²} e^{2ζ*β - |β|²/2} e^{2ζγ* - |γ|²/2} e^{-γ*β}.
        """
        z = np.atleast_1d(np.asarray(zetas, dtype=complex))
        amps, table = self._reduced_pairs(mode)
        sq = np.abs(amps) ** 2
        m = table * np.exp(-(amps.conj()[None, :] * amps[:, None])
                           - 0.5 * sq[:, None] - 0.5 * sq[None, :])
        u = np.exp(2.0 * z.conj()[:, None] * amps[None, :])       # (nz, n) ket side
        v = np.exp(2.0 * z[:, None] * amps.conj()[None, :])       # (nz, n) bra side
        w = np.einsum("zj,jk,zk->z", u, m, v, optimize=True)
        w = (2.0 / math.pi) * np.exp(-2.0 * np.abs(z) ** 2) * w
        out = np.real(w)
        if np.asarray(zetas).ndim == 0:
            return float(out[0])
        return out

    def parity_expectation(self, mode: int) -> float:
        """⟨Π⟩ on the reduced mode, via ⟨γ|(-1)^n|β⟩ = e^{-|γ|²/2-|β|²/2-γ*β}."""
        amps, table = self._reduced_pairs(mode)
        sq = np.abs(amps) ** 2
        kern = np.exp(-0.5 * sq[:, None] - 0.5 * sq[None, :]
                      - amps.conj()[None, :] * amps[:, None])
        return float(np.real(np.einsum("jk,jk->", table, kern)))

    # -- mode moments -----------------------------------------------------------
    def _mode_moment(self, mode: int, fn) -> complex:
        """tr(ρ Ô) for Ô with ⟨γ|Ô|β⟩ = fn(β, γ*)·⟨γ|β⟩ on one mode."""
        self.layout.check_mode(mode)
        g = self.gram()
        amps = _amps_matrix(self.components)[:, mode]
        # tr contribution of |c_j⟩⟨c_k| is ⟨c_k|Ô|c_j⟩ = fn(β_j, γ_k*) G[k, j]
        factors = fn(amps[None, :].T * np.ones_like(amps)[None, :].T.T,  # unused guard
                     None) if False else None
        vals = fn(amps[:, None] * np.ones((1, len(amps))),
                  np.conj(amps)[None, :] * np.ones((len(amps), 1)))
        return complex(np.einsum("jk,kj,jk->", self.coeffs, g, vals.T * 0 + vals))

    def mean_photon(self, mode: int) -> float:
        g = self.gram()
        amps = _amps_matrix(self.components)[:, mode]
        vals = amps[:, None] * np.conj(amps)[None, :]  # β_j γ_k*
        tot = np.einsum("jk,kj,jk->", self.coeffs, g, vals)
        return float(np.real(tot))

    def mean_a_squared(self, mode: int) -> complex:
        g = self.gram()
        amps = _amps_matrix(self.components)[:, mode]
        vals = (amps ** 2)[:, None] * np.ones((1, len(amps)))
        return complex(np.einsum("jk,kj,jk->", self.coeffs, g, vals))

    # -- algebra -----------------------------------------------------------------
    def scaled(self, factor: float) -> "DyadDensity":
        return DyadDensity(self.layout, list(self.components), self.coeffs * factor)

    # -- oracle bridge -----------------------------------------------------------
    def to_fock(self, mode_dims: Sequence[int]) -> fock.FockOperator:
        fl = fock.HilbertLayout(tuple(mode_dims), self.layout.n_ancillas)
        vecs = []
        for comp in self.components:
            factors = [fock.coherent_vec(a, d) for a, d in zip(comp.amps, mode_dims)]
            vecs.append(fock.product_state(fl, factors, comp.bits).entries)
        v = np.array(vecs)
        rho = v.T @ self.coeffs @ v.conj()
        return fock.FockOperator(fl, rho)


def density_sum(parts: Sequence[DyadDensity]) -> DyadDensity:
    """Sum of density operators (used for measurement ensembles)."""
    if not parts:
        raise LayoutError("nothing to sum")
    layout = parts[0].layout
    index: dict[tuple, int] = {}
    comps: list[HybridComponent] = []
    maps = []
    for part in parts:
        if part.layout != layout:
            raise LayoutError("layout mismatch in density sum")
        local = []
        for c in part.components:
            key = c.merge_key()
            i = index.get(key)
            if i is None:
                i = len(comps)
                index[key] = i
                comps.append(c)
            local.append(i)
        maps.append(local)
    c_tot = np.zeros((len(comps), len(comps)), dtype=complex)
    for part, local in zip(parts, maps):
        ix = np.asarray(local)
        c_tot[np.ix_(ix, ix)] += part.coeffs
    return DyadDensity(layout, comps, c_tot).pruned()


def _cross_gram(a_components: Sequence[HybridComponent],
                b_components: Sequence[HybridComponent]) -> np.ndarray:
    """M[j, l] = ⟨a_j | b_l⟩, vectorized."""
    na, nb = len(a_components), len(b_components)
    amps_a, amps_b = _amps_matrix(a_components), _amps_matrix(b_components)
    m = np.ones((na, nb), dtype=complex)
    if amps_a.size or amps_b.size:
        sq_a = np.sum(np.abs(amps_a) ** 2, axis=1)
        sq_b = np.sum(np.abs(amps_b) ** 2, axis=1)
        m = np.exp(-0.5 * sq_a[:, None] - 0.5 * sq_b[None, :]
                   + amps_a.conj() @ amps_b.T)
    bits_a, bits_b = _bits_matrix(a_components), _bits_matrix(b_components)
    if bits_a.size or bits_b.size:
        same = (bits_a[:, None, :] == bits_b[None, :, :]).all(axis=2)
        m = m * same
    return m


def hs_overlap(a: DyadDensity, b: DyadDensity) -> complex:
    """Hilbert-Schmidt inner product tr(a† b)."""
    if a.layout != b.layout:
        raise LayoutError("layout mismatch")
    m = _cross_gram(a.components, b.components)
    # tr(a† b) = Σ conj(A_jk) (M B M†)_jk
    return complex(np.vdot(a.coeffs, m @ b.coeffs @ m.conj().T))


def hs_distance(a: DyadDensity, b: DyadDensity) -> float:
    """‖a - b‖₂, robust to differing component lists."""
    d2 = np.real(hs_overlap(a, a) + hs_overlap(b, b) - 2.0 * hs_overlap(a, b))
    return float(math.sqrt(max(d2, 0.0)))
