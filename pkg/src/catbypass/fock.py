"""Truncated Fock-space backend.

Dense-matrix states and operators on a multi-oscillator ⊗ multi-qubit Hilbert
space.  Everything here is brute force on purpose: gates are matrix
exponentials of Hermitian generators, channels are explicit Kraus sums.  This
module is the independent oracle against which the closed-form coherent-dyad
engine is validated, so it deliberately shares no formulas with that engine.

Conventions (used consistently across the package):
    X = (a + a†)/√2,  P = X rotated by π/2,  [X, P] = i
    σ_x = [[0,1],[1,0]], σ_y = [[0,-i],[i,0]], σ_z = [[1,0],[0,-1]]
    in the ordered qubit basis (|g⟩, |e⟩), i.e. σ_z|g⟩ = +|g⟩.
    D(δ) = exp(δ a† - δ* a),  S(r) = exp[(r/2)(a² - a†²)]  (X → e^{-r} X).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ContractError, LayoutError, TruncationError

# Weight allowed in the top Fock levels of any intermediate state before the
# truncation is declared inadequate.
TOP_LEVEL_TOL = 1e-8
TOP_LEVEL_COUNT = 5


@dataclass(frozen=True)
class HilbertLayout:
    """Fixed subsystem ordering: oscillators first, then two-level ancillas."""

    mode_dims: tuple[int, ...]
    ancilla_count: int = 0

    def __post_init__(self):
        if any(d < 2 for d in self.mode_dims):
            raise LayoutError(f"mode dimensions must be >= 2, got {self.mode_dims}")
        if self.ancilla_count < 0:
            raise LayoutError("ancilla_count must be non-negative")

    @property
    def n_modes(self) -> int:
        return len(self.mode_dims)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.mode_dims + (2,) * self.ancilla_count

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64))

    def mode_axis(self, mode: int) -> int:
        if not 0 <= mode < self.n_modes:
            raise LayoutError(f"mode index {mode} out of range for {self}")
        return mode

    def ancilla_axis(self, ancilla: int) -> int:
        if not 0 <= ancilla < self.ancilla_count:
            raise LayoutError(f"ancilla index {ancilla} out of range for {self}")
        return self.n_modes + ancilla


@dataclass(frozen=True)
class FockStateVector:
    layout: HilbertLayout
    entries: np.ndarray

    def norm(self) -> float:
        return float(np.linalg.norm(self.entries))

    def dagger_apply(self, other: "FockStateVector") -> complex:
        """⟨self|other⟩."""
        return complex(np.vdot(self.entries, other.entries))


@dataclass(frozen=True)
class FockOperator:
    layout: HilbertLayout
    entries: np.ndarray

    def dag(self) -> "FockOperator":
        return FockOperator(self.layout, self.entries.conj().T)

    def trace(self) -> complex:
        return complex(np.trace(self.entries))


# ---------------------------------------------------------------------------
# single-subsystem building blocks
# ---------------------------------------------------------------------------

def destroy(dim: int) -> np.ndarray:
    """Annihilation operator: ⟨n-1|a|n⟩ = √n."""
    if dim < 2:
        raise LayoutError(f"dimension must be >= 2, got {dim}")
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)


def build_ladder(dim: int) -> FockOperator:
    """Single-mode annihilation operator wrapped with its own layout."""
    return FockOperator(HilbertLayout((dim,)), destroy(dim))


def number(dim: int) -> np.ndarray:
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


def quadrature(dim: int, phi: float = 0.0) -> np.ndarray:
    """Generalized quadrature (a e^{-iφ} + a† e^{iφ})/√2; φ=0 gives X, φ=π/2 gives P."""
    a = destroy(dim)
    return (a * np.exp(-1j * phi) + a.conj().T * np.exp(1j * phi)) / np.sqrt(2.0)


def parity(dim: int) -> np.ndarray:
    return np.diag((-1.0) ** np.arange(dim)).astype(complex)


_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli(axis: str) -> np.ndarray:
    try:
        return _PAULI[axis].copy()
    except KeyError:
        raise LayoutError(f"unknown Pauli axis {axis!r}") from None


def qubit_basis(bit: int) -> np.ndarray:
    v = np.zeros(2, dtype=complex)
    v[bit] = 1.0
    return v


def required_dim(alpha_max: float) -> int:
    """Smallest truncation dimension considered adequate for amplitude α.

    A Poisson photon-number tail at |α|² keeps the leaked weight beyond
    |α|² + 6|α| + 10 levels under 1e-8.
    """
    a = abs(alpha_max)
    return int(math.ceil(a * a + 6.0 * a + 10.0))


def coherent_vec(alpha: complex, dim: int) -> np.ndarray:
    """Truncated coherent state, renormalized to unit norm."""
    if required_dim(alpha) > dim:
        raise TruncationError(
            f"dim={dim} inadequate for coherent amplitude |α|={abs(alpha):.3f}; "
            f"need at least {required_dim(alpha)}"
        )
    v = np.zeros(dim, dtype=complex)
    v[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, dim):
        v[n] = v[n - 1] * alpha / math.sqrt(n)
    return v / np.linalg.norm(v)


def coherent_fock(alpha: complex, dim: int) -> FockStateVector:
    return FockStateVector(HilbertLayout((dim,)), coherent_vec(alpha, dim))


# ---------------------------------------------------------------------------
# matrix exponentials and named unitaries
# ---------------------------------------------------------------------------

def _check_hermitian(h: np.ndarray, tol: float = 1e-10) -> None:
    scale = max(1.0, float(np.max(np.abs(h))))
    dev = float(np.max(np.abs(h - h.conj().T)))
    if dev > tol * scale:
        raise ContractError(f"generator not Hermitian: max deviation {dev:.3e}")


def expm_hermitian(h: np.ndarray, strength: float = 1.0) -> np.ndarray:
    """exp(i·strength·h) for Hermitian h via eigendecomposition."""
    _check_hermitian(h)
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * strength * w)) @ v.conj().T


def unitary_from_hamiltonian(h: FockOperator, strength: float) -> FockOperator:
    return FockOperator(h.layout, expm_hermitian(h.entries, strength))


def displacement(delta: complex, dim: int) -> np.ndarray:
    """D(δ) = exp(δ a† - δ* a)."""
    a = destroy(dim)
    gen = -1j * (delta * a.conj().T - np.conj(delta) * a)
    return expm_hermitian(gen)


def squeeze(r: float, dim: int) -> np.ndarray:
    """S(r) = exp[(r/2)(a² - a†²)]; scales X by e^{-r} and P by e^{+r}."""
    a = destroy(dim)
    gen = -0.5j * (a @ a - a.conj().T @ a.conj().T)
    return expm_hermitian(gen, r)


def phase_rotation(theta: float, dim: int) -> np.ndarray:
    """exp(iθ n̂): maps |β⟩ to |e^{iθ}β⟩."""
    return np.diag(np.exp(1j * theta * np.arange(dim)))


def beam_splitter(dim1: int, dim2: int) -> np.ndarray:
    """Balanced beam splitter exp[(π/4)(a₁†a₂ - a₁a₂†)] on two modes."""
    a1 = np.kron(destroy(dim1), np.eye(dim2))
    a2 = np.kron(np.eye(dim1), destroy(dim2))
    gen = -1j * (a1.conj().T @ a2 - a1 @ a2.conj().T)
    return expm_hermitian(gen, math.pi / 4.0)


# ---------------------------------------------------------------------------
# composition, embedding, reduction
# ---------------------------------------------------------------------------

def _canonical_perm(layout_a: HilbertLayout, layout_b: HilbertLayout) -> list[int]:
    """Axis permutation from kron order (a-modes, a-anc, b-modes, b-anc) to
    canonical order (a-modes, b-modes, a-anc, b-anc)."""
    na_m, na_a = layout_a.n_modes, layout_a.ancilla_count
    nb_m, nb_a = layout_b.n_modes, layout_b.ancilla_count
    a_modes = list(range(na_m))
    a_anc = list(range(na_m, na_m + na_a))
    b_modes = list(range(na_m + na_a, na_m + na_a + nb_m))
    b_anc = list(range(na_m + na_a + nb_m, na_m + na_a + nb_m + nb_a))
    return a_modes + b_modes + a_anc + b_anc


def tensor(a, b):
    """Kronecker composition of two states or two operators.

    The combined layout keeps the canonical subsystem order (all oscillators
    first), so axes are permuted after the raw kron when both factors carry
    ancillas.
    """
    layout = HilbertLayout(a.layout.mode_dims + b.layout.mode_dims,
                           a.layout.ancilla_count + b.layout.ancilla_count)
    perm = _canonical_perm(a.layout, b.layout)
    raw_dims = a.layout.dims + b.layout.dims
    if isinstance(a, FockStateVector) and isinstance(b, FockStateVector):
        raw = np.kron(a.entries, b.entries)
        out = raw.reshape(raw_dims).transpose(perm).reshape(-1)
        return FockStateVector(layout, out)
    if isinstance(a, FockOperator) and isinstance(b, FockOperator):
        raw = np.kron(a.entries, b.entries)
        n = len(raw_dims)
        perm2 = perm + [p + n for p in perm]
        out = raw.reshape(raw_dims + raw_dims).transpose(perm2)
        return FockOperator(layout, out.reshape(layout.total_dim, layout.total_dim))
    raise LayoutError("tensor requires two states or two operators")


def product_state(layout: HilbertLayout, mode_vecs: Sequence[np.ndarray],
                  ancilla_bits: Sequence[int]) -> FockStateVector:
    """⊗ modes ⊗ ancilla basis states, in canonical order."""
    if len(mode_vecs) != layout.n_modes or len(ancilla_bits) != layout.ancilla_count:
        raise LayoutError("factor count does not match layout")
    vec = np.ones(1, dtype=complex)
    for mv in mode_vecs:
        vec = np.kron(vec, mv)
    for bit in ancilla_bits:
        vec = np.kron(vec, qubit_basis(bit))
    return FockStateVector(layout, vec)


def embed(layout: HilbertLayout, axis: int, small: np.ndarray) -> np.ndarray:
    """Operator acting as `small` on one subsystem axis and identity elsewhere."""
    dims = layout.dims
    if not 0 <= axis < len(dims):
        raise LayoutError(f"axis {axis} out of range")
    if small.shape != (dims[axis], dims[axis]):
        raise LayoutError("embedded operator has wrong dimension")
    out = np.ones((1, 1), dtype=complex)
    for i, d in enumerate(dims):
        out = np.kron(out, small if i == axis else np.eye(d))
    return out


def apply_one_site(vec: np.ndarray, layout: HilbertLayout, small: np.ndarray,
                   axis: int) -> np.ndarray:
    """Apply a single-subsystem operator to a state vector without building
    the full-dimension matrix."""
    dims = layout.dims
    t = vec.reshape(dims)
    t = np.tensordot(small, t, axes=([1], [axis]))
    return np.moveaxis(t, 0, axis).reshape(-1)


def apply_two_site(vec: np.ndarray, layout: HilbertLayout, small: np.ndarray,
                   axis1: int, axis2: int) -> np.ndarray:
    """Apply an operator on the joint space of two subsystem axes."""
    dims = layout.dims
    d1, d2 = dims[axis1], dims[axis2]
    if small.shape != (d1 * d2, d1 * d2):
        raise LayoutError("two-site operator has wrong dimension")
    t = np.moveaxis(vec.reshape(dims), (axis1, axis2), (0, 1))
    rest = t.shape[2:]
    t = small @ t.reshape(d1 * d2, -1)
    t = t.reshape((d1, d2) + rest)
    return np.moveaxis(t, (0, 1), (axis1, axis2)).reshape(-1)


def apply_one_site_density(rho: np.ndarray, layout: HilbertLayout,
                           small: np.ndarray, axis: int) -> np.ndarray:
    """K ρ K† with K acting on one subsystem axis."""
    dims = layout.dims
    n = len(dims)
    t = rho.reshape(dims + dims)
    t = np.tensordot(small, t, axes=([1], [axis]))
    t = np.moveaxis(t, 0, axis)
    t = np.tensordot(t, small.conj(), axes=([n + axis], [1]))
    t = np.moveaxis(t, -1, n + axis)
    d = layout.total_dim
    return t.reshape(d, d)


def apply_two_site_density(rho: np.ndarray, layout: HilbertLayout,
                           small: np.ndarray, axis1: int, axis2: int) -> np.ndarray:
    dims = layout.dims
    n = len(dims)
    d1, d2 = dims[axis1], dims[axis2]
    t = np.moveaxis(rho.reshape(dims + dims),
                    (axis1, axis2, n + axis1, n + axis2), (0, 1, 2, 3))
    rest = t.shape[4:]
    m = t.reshape(d1 * d2, d1 * d2, -1)
    m = np.einsum("ab,bcx,dc->adx", small, m, small.conj(), optimize=True)
    t = m.reshape((d1, d2, d1, d2) + rest)
    t = np.moveaxis(t, (0, 1, 2, 3), (axis1, axis2, n + axis1, n + axis2))
    d = layout.total_dim
    return t.reshape(d, d)


def partial_trace(rho: FockOperator, keep: Iterable[int]) -> FockOperator:
    """Trace out every subsystem whose global axis index is not in `keep`.

    Axis indices: 0..n_modes-1 are oscillators, then ancillas.
    """
    layout = rho.layout
    dims = layout.dims
    n = len(dims)
    keep = sorted(set(keep))
    if any(k < 0 or k >= n for k in keep):
        raise LayoutError(f"keep set {keep} out of range for {n} subsystems")
    drop = [i for i in range(n) if i not in keep]
    perm = keep + drop
    t = rho.entries.reshape(dims + dims)
    t = t.transpose(perm + [n + p for p in perm])
    d_keep = int(np.prod([dims[k] for k in keep], dtype=np.int64))
    d_drop = int(np.prod([dims[k] for k in drop], dtype=np.int64))
    t = t.reshape(d_keep, d_drop, d_keep, d_drop)
    red = np.einsum("arbr->ab", t)
    kept_modes = tuple(dims[k] for k in keep if k < layout.n_modes)
    kept_anc = sum(1 for k in keep if k >= layout.n_modes)
    return FockOperator(HilbertLayout(kept_modes, kept_anc), red)


# ---------------------------------------------------------------------------
# named composite unitaries
# ---------------------------------------------------------------------------

def rabi_generator(layout: HilbertLayout, ancilla: int, axis: str, mode: int,
                   quad_angle: float) -> np.ndarray:
    """Joint (mode ⊗ ancilla) generator σ_axis · X_φ, on the two-site space."""
    d = layout.mode_dims[layout.mode_axis(mode)]
    layout.ancilla_axis(ancilla)
    return np.kron(quadrature(d, quad_angle), pauli(axis))


def rabi_unitary_small(layout: HilbertLayout, ancilla: int, axis: str, mode: int,
                       quad_angle: float, strength: float) -> np.ndarray:
    """exp[i t σ_axis X_φ] as a (mode ⊗ ancilla) block."""
    return expm_hermitian(rabi_generator(layout, ancilla, axis, mode, quad_angle),
                          strength)


def jc_unitary(layout: HilbertLayout, coupling: float, mode: int = 0,
               ancilla: int = 0) -> FockOperator:
    """exp[iκ(σ₊ a + σ₋ a†)], the excitation-preserving qubit-oscillator gate."""
    d = layout.mode_dims[layout.mode_axis(mode)]
    a = embed(layout, layout.mode_axis(mode), destroy(d))
    sp = embed(layout, layout.ancilla_axis(ancilla),
               np.array([[0, 0], [1, 0]], dtype=complex))  # σ₊ = |e⟩⟨g|
    gen = a @ sp + a.conj().T @ sp.conj().T
    return FockOperator(layout, expm_hermitian(gen, coupling))


# ---------------------------------------------------------------------------
# channels as Kraus families
# ---------------------------------------------------------------------------

def loss_kraus(eta: float, dim: int, weight_tol: float = 1e-12) -> list[np.ndarray]:
    """Kraus family of the photon-loss channel with transmissivity η.

    K_l = √((1-η)^l / l!) · η^{n̂/2} · a^l.  Terms are added until the channel
    completeness deficit max_n (1 - Σ_l ⟨n|K_l†K_l|n⟩) drops below weight_tol,
    which gives uniform accuracy across η instead of a fixed l cutoff.
    """
    if not 0.0 <= eta <= 1.0:
        raise ContractError(f"loss parameter η={eta} outside [0, 1]")
    if eta == 1.0:
        return [np.eye(dim, dtype=complex)]
    a = destroy(dim)
    # η^{n/2} handles η=0 as the vacuum projector (0^0 = 1).
    half = np.diag(np.power(eta, 0.5 * np.arange(dim)))
    ops = []
    a_pow = np.eye(dim, dtype=complex)
    completeness = np.zeros(dim)
    for l in range(dim):
        log_c = 0.5 * (l * math.log1p(-eta) - math.lgamma(l + 1))
        k = math.exp(log_c) * (half @ a_pow)
        ops.append(k)
        completeness += np.einsum("ij,ij->j", k.conj(), k).real
        if np.max(1.0 - completeness) < weight_tol:
            break
        a_pow = a_pow @ a
    return ops


def dephasing_kraus(p: float) -> list[np.ndarray]:
    """Qubit phase damping: ρ → (1-p/2)ρ + (p/2)σ_z ρ σ_z."""
    if not 0.0 <= p <= 1.0:
        raise ContractError(f"dephasing parameter p={p} outside [0, 1]")
    return [math.sqrt(1.0 - p / 2.0) * np.eye(2, dtype=complex),
            math.sqrt(p / 2.0) * pauli("z")]


# ---------------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------------

def mode_level_weights(vec_or_rho: np.ndarray, layout: HilbertLayout,
                       mode: int) -> np.ndarray:
    """Photon-number distribution of one oscillator."""
    ax = layout.mode_axis(mode)
    dims = layout.dims
    n = len(dims)
    if vec_or_rho.ndim == 1:
        t = np.abs(vec_or_rho.reshape(dims)) ** 2
        return t.sum(axis=tuple(i for i in range(n) if i != ax))
    perm = [ax] + [i for i in range(n) if i != ax]
    t = vec_or_rho.reshape(dims + dims).transpose(perm + [n + p for p in perm])
    d = dims[ax]
    rest = layout.total_dim // d
    red = np.einsum("arbr->ab", t.reshape(d, rest, d, rest))
    return np.real(np.diag(red))


def check_truncation(vec_or_rho: np.ndarray, layout: HilbertLayout,
                     top: int = TOP_LEVEL_COUNT, tol: float = TOP_LEVEL_TOL) -> None:
    """Raise if any oscillator puts more than `tol` weight in its top levels."""
    for m in range(layout.n_modes):
        w = mode_level_weights(vec_or_rho, layout, m)
        total = float(np.sum(w))
        if total <= 0:
            continue
        leak = float(np.sum(w[-top:])) / total
        if leak > tol:
            raise TruncationError(
                f"mode {m}: top-{top} Fock levels carry weight {leak:.3e} > {tol:.1e}"
            )


def check_unitary(u: np.ndarray, tol: float = 1e-10) -> None:
    dev = float(np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0]))))
    if dev > tol:
        raise ContractError(f"operator not unitary within {tol}: deviation {dev:.3e}")


def fidelity_pure(psi: np.ndarray, phi: np.ndarray) -> float:
    return float(abs(np.vdot(psi, phi)) ** 2)


def displacement_closed(delta: complex, dim: int) -> np.ndarray:
    """D(δ) from the Laguerre-polynomial matrix elements
    ⟨m|D(δ)|n⟩ = √(n!/m!) δ^{m-n} e^{-|δ|²/2} L_n^{(m-n)}(|δ|²) for m ≥ n;
    O(d²) instead of an eigendecomposition.  Used only where many
    displacements are needed (Wigner scans); agreement with the exponential
    route is covered by tests."""
    from scipy.special import eval_genlaguerre

    x = abs(delta) ** 2
    d = np.zeros((dim, dim), dtype=complex)
    log_fact = np.concatenate(([0.0], np.cumsum(np.log(np.arange(1, dim)))))
    pref = math.exp(-0.5 * x)
    for m in range(dim):
        for n in range(m + 1):
            k = m - n
            amp = math.exp(0.5 * (log_fact[n] - log_fact[m]))
            val = pref * amp * (delta ** k) * eval_genlaguerre(n, k, x)
            d[m, n] = val
            if k:
                d[n, m] = pref * amp * ((-np.conj(delta)) ** k) \
                    * eval_genlaguerre(n, k, x)
    return d


def wigner_point(rho_mode: np.ndarray, zeta: complex) -> float:
    """Displaced-parity Wigner value (2/π)·tr[ρ D(2ζ) Π] for one mode."""
    dim = rho_mode.shape[0]
    op = displacement_closed(2.0 * zeta, dim) @ parity(dim)
    return float(np.real(np.trace(rho_mode @ op)) * 2.0 / math.pi)


def wigner_grid(rho_mode: np.ndarray, zetas: np.ndarray) -> np.ndarray:
    """Wigner values on many phase-space points at once.

    Expands tr[ρ D(2ζ) Π] over the number basis,
        W = (2/π) e^{-2|ζ|²} Σ_k Σ_a (-1)^a √(a!/(a+k)!) L_a^k(4|ζ|²)
            · (k=0 ? ρ_aa : 2 Re[ρ_{a+k,a} (2ζ)^k]),
    with the associated Laguerre polynomials built by their three-term
    recurrence, vectorized over the grid."""
    z = np.asarray(zetas, dtype=complex).ravel()
    d = rho_mode.shape[0]
    x = 4.0 * np.abs(z) ** 2
    out = np.zeros_like(x)
    log_fact = np.concatenate(([0.0], np.cumsum(np.log(np.arange(1, d)))))
    beta_pow = np.ones_like(z)
    for k in range(d):
        if k > 0:
            beta_pow = beta_pow * 2.0 * z
        l_prev = None
        l_curr = np.ones_like(x)  # L_0^k
        for a in range(d - k):
            if a == 1:
                l_prev, l_curr = l_curr, 1.0 + k - x
            elif a >= 2:
                l_next = ((2.0 * a - 1.0 + k - x) * l_curr
                          - (a - 1.0 + k) * l_prev) / a
                l_prev, l_curr = l_curr, l_next
            amp = math.exp(0.5 * (log_fact[a] - log_fact[a + k]))
            sign = -1.0 if a % 2 else 1.0
            if k == 0:
                weight = float(np.real(rho_mode[a, a]))
                out += (sign * amp * weight) * l_curr
            else:
                weight = 2.0 * np.real(rho_mode[a, a + k] * beta_pow)
                out += sign * amp * weight * l_curr
    return (2.0 / math.pi) * np.exp(-2.0 * np.abs(z) ** 2) * out
