"""Liouville-Fock space: operators live as vectors over Majorana monomials.

A density matrix (or any operator) A on N spins expands uniquely as
A = sum_a c_a w^{a} over the 4^N canonical Majorana monomials. The amplitude
vector c indexes monomials by their occupation bitstring: component index
int(a) = sum_j a_j 2^{j-1}, i.e. the least-significant bit is a_1. This
"majorana-canonical" convention is fixed everywhere.

Fermionic ladder operators act on the basis by left-prepending a mode and
normal-ordering:

    c_j^dag |w^{a}> = delta_{a_j,0} (-1)^{sum_{k<j} a_k} |w^{a + e_j}>
    c_j     |w^{a}> = delta_{a_j,1} (-1)^{sum_{k<j} a_k} |w^{a - e_j}>

which satisfy the canonical anticommutation relations by construction.

Left and right multiplication by a Majorana monomial are signed permutations
of the basis and are assembled here as sparse matrices; every Lindblad
superoperator in this package is built from them.

The inner product is <<A|B>> = tr(A^dag B), under which the basis monomials
are orthogonal with squared norm 2^N; the factor is carried explicitly in
`liouville_inner` rather than normalizing the basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .pauli import (
    MajoranaMonomial,
    OperatorSum,
    PauliString,
    operator_to_majorana_terms,
    spin_to_majorana,
)

BASIS_CONVENTION = "majorana-canonical"

_SITE_MATS = np.stack(
    [
        np.eye(2, dtype=complex),
        np.array([[0, 1], [1, 0]], dtype=complex),
        np.array([[0, -1j], [1j, 0]], dtype=complex),
        np.array([[1, 0], [0, -1]], dtype=complex),
    ]
)  # order I, X, Y, Z


@dataclass
class LiouvilleVector:
    """Amplitudes of an operator over the canonical Majorana-monomial basis."""

    n_sites: int
    amplitudes: np.ndarray
    basis_convention: str = BASIS_CONVENTION

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (4 ** self.n_sites,):
            raise ValueError(
                f"amplitude vector must have length 4^{self.n_sites}, "
                f"got {self.amplitudes.shape}"
            )

    def copy(self) -> "LiouvilleVector":
        return LiouvilleVector(self.n_sites, self.amplitudes.copy())


def _as_amplitudes(state, n_sites=None):
    if isinstance(state, LiouvilleVector):
        return state.amplitudes, state.n_sites
    v = np.asarray(state, dtype=complex)
    if n_sites is None:
        n = round(np.log(v.size) / np.log(4))
        if 4 ** n != v.size:
            raise ValueError("amplitude length is not a power of 4")
        n_sites = n
    return v, n_sites


# ---------------------------------------------------------------------------
# bit utilities over the whole index range
# ---------------------------------------------------------------------------


def _bitcount(values: np.ndarray) -> np.ndarray:
    return np.bitwise_count(values.astype(np.uint64)).astype(np.int64)


@lru_cache(maxsize=None)
def _index_range(n_modes: int) -> np.ndarray:
    return np.arange(1 << n_modes, dtype=np.int64)


def _parity_below(indices: np.ndarray, mode: int) -> np.ndarray:
    """(-1)^{number of occupied modes strictly below `mode` (1-based)}."""
    below = indices & ((1 << (mode - 1)) - 1)
    return 1 - 2 * (_bitcount(below) & 1)


# ---------------------------------------------------------------------------
# ladder operators
# ---------------------------------------------------------------------------


def _check_mode(j: int, n_sites: int) -> None:
    if not 1 <= j <= 2 * n_sites:
        raise ValueError(f"mode index {j} out of range [1, {2 * n_sites}]")


def apply_c_dagger(j: int, state, n_sites=None):
    """Create mode j; annihilates components with a_j = 1."""
    v, n = _as_amplitudes(state, n_sites)
    _check_mode(j, n)
    idx = _index_range(2 * n)
    bit = np.int64(1) << (j - 1)
    src = (idx & bit) == 0
    out = np.zeros_like(v)
    out[idx[src] | bit] = _parity_below(idx[src], j) * v[src]
    return LiouvilleVector(n, out) if isinstance(state, LiouvilleVector) else out


def apply_c(j: int, state, n_sites=None):
    """Annihilate mode j; kills components with a_j = 0."""
    v, n = _as_amplitudes(state, n_sites)
    _check_mode(j, n)
    idx = _index_range(2 * n)
    bit = np.int64(1) << (j - 1)
    src = (idx & bit) != 0
    out = np.zeros_like(v)
    out[idx[src] & ~bit] = _parity_below(idx[src], j) * v[src]
    return LiouvilleVector(n, out) if isinstance(state, LiouvilleVector) else out


def _signed_permutation(rows, cols, signs, dim) -> sp.csr_matrix:
    return sp.csr_matrix(
        (np.asarray(signs, dtype=complex), (rows, cols)), shape=(dim, dim)
    )


def c_dagger_matrix(j: int, n_sites: int) -> sp.csr_matrix:
    _check_mode(j, n_sites)
    dim = 4 ** n_sites
    idx = _index_range(2 * n_sites)
    bit = np.int64(1) << (j - 1)
    cols = idx[(idx & bit) == 0]
    return _signed_permutation(cols | bit, cols, _parity_below(cols, j), dim)


def c_matrix(j: int, n_sites: int) -> sp.csr_matrix:
    return c_dagger_matrix(j, n_sites).conj().T.tocsr()


def number_values(j: int, n_sites: int) -> np.ndarray:
    """Diagonal of the mode-j number operator over the whole basis."""
    _check_mode(j, n_sites)
    idx = _index_range(2 * n_sites)
    return ((idx >> (j - 1)) & 1).astype(np.int64)


# ---------------------------------------------------------------------------
# left / right multiplication superoperators
# ---------------------------------------------------------------------------


def _masked_parity(indices: np.ndarray, mask: int) -> np.ndarray:
    """Parity (0/1) of the transposition count for prepending w^{mask}."""
    count = np.zeros_like(indices)
    m = mask
    while m:
        low = m & -m
        j = low.bit_length()  # 1-based mode index
        count += _bitcount(indices & ((1 << (j - 1)) - 1))
        m ^= low
    return count & 1


def left_mult_monomial(mono: MajoranaMonomial, n_sites: int) -> sp.csr_matrix:
    """Superoperator of A -> (coeff * w^{mask}) A on amplitude vectors."""
    if mono.n_modes != 2 * n_sites:
        raise ValueError("monomial mode count does not match n_sites")
    dim = 4 ** n_sites
    idx = _index_range(2 * n_sites)
    signs = (1 - 2 * _masked_parity(idx, mono.mask)) * mono.coeff
    return _signed_permutation(idx ^ mono.mask, idx, signs, dim)


def right_mult_monomial(mono: MajoranaMonomial, n_sites: int) -> sp.csr_matrix:
    """Superoperator of A -> A * (coeff * w^{mask}) on amplitude vectors."""
    if mono.n_modes != 2 * n_sites:
        raise ValueError("monomial mode count does not match n_sites")
    dim = 4 ** n_sites
    idx = _index_range(2 * n_sites)
    # appending w_j from the right crosses every occupied mode above j; with
    # the mask appended in ascending mode order, earlier-appended modes sit
    # below j and never add crossings, so the original occupations suffice
    count = np.zeros_like(idx)
    total = _bitcount(idx)
    m = mono.mask
    while m:
        low = m & -m
        j = low.bit_length()
        below = _bitcount(idx & ((1 << (j - 1)) - 1))
        has = (idx >> (j - 1)) & 1
        count += total - below - has
        m ^= low
    signs = (1 - 2 * (count & 1)) * mono.coeff
    return _signed_permutation(idx ^ mono.mask, idx, signs, dim)


def left_mult_operator(op: OperatorSum, n_sites: int) -> sp.csr_matrix:
    dim = 4 ** n_sites
    out = sp.csr_matrix((dim, dim), dtype=complex)
    for mask, coeff in operator_to_majorana_terms(op).items():
        out = out + left_mult_monomial(
            MajoranaMonomial(2 * n_sites, mask, coeff), n_sites
        )
    return out


def right_mult_operator(op: OperatorSum, n_sites: int) -> sp.csr_matrix:
    dim = 4 ** n_sites
    out = sp.csr_matrix((dim, dim), dtype=complex)
    for mask, coeff in operator_to_majorana_terms(op).items():
        out = out + right_mult_monomial(
            MajoranaMonomial(2 * n_sites, mask, coeff), n_sites
        )
    return out


# ---------------------------------------------------------------------------
# Pauli <-> Majorana amplitude transforms
# ---------------------------------------------------------------------------


@lru_cache(maxsize=8)
def pauli_word_table(n_sites: int):
    """For each Pauli word index W = sum mu_j 4^{N-j}: its monomial mask and
    the phase with word = phase * w^{mask}. Returns (masks, phases, word_of_mask).
    """
    dim = 4 ** n_sites
    masks = np.empty(dim, dtype=np.int64)
    phases = np.empty(dim, dtype=complex)
    codes = "IXYZ"
    for w in range(dim):
        digits = []
        rem = w
        for _ in range(n_sites):
            digits.append(rem % 4)
            rem //= 4
        digits.reverse()  # site 1 is the most significant digit
        word = PauliString.from_codes("".join(codes[d] for d in digits))
        mono = spin_to_majorana(word)
        masks[w] = mono.mask
        phases[w] = mono.coeff
    word_of_mask = np.empty(dim, dtype=np.int64)
    word_of_mask[masks] = np.arange(dim)
    return masks, phases, word_of_mask


def pauli_coefficients(rho: np.ndarray, n_sites: int) -> np.ndarray:
    """All tr(P rho)/2^N for tensor-product Pauli words P, shape (4,)*N.

    Index order matches `pauli_word_table`: axis j is the symbol on site j+1
    in IXYZ order.
    """
    dim = 2 ** n_sites
    if rho.shape != (dim, dim):
        raise ValueError(f"expected a {dim} x {dim} matrix, got {rho.shape}")
    t = np.asarray(rho, dtype=complex).reshape((2,) * (2 * n_sites))
    for k in range(n_sites):
        # contract row axis k and the matching column axis with the site
        # matrices; tensordot prepends the new mu axis
        t = np.tensordot(_SITE_MATS, t, axes=([2, 1], [k, n_sites]))
    # axes are now (mu_N, ..., mu_1); flip to (mu_1, ..., mu_N)
    t = np.transpose(t, axes=tuple(range(n_sites - 1, -1, -1)))
    return t / dim


def matrix_from_pauli_coefficients(coeffs: np.ndarray, n_sites: int) -> np.ndarray:
    """Inverse of `pauli_coefficients`."""
    t = np.asarray(coeffs, dtype=complex).reshape((4,) * n_sites)
    for _ in range(n_sites):
        # consume the leading mu axis, appending (row, col) axes at the end
        t = np.tensordot(t, _SITE_MATS, axes=([0], [0]))
    order = [2 * k for k in range(n_sites)] + [2 * k + 1 for k in range(n_sites)]
    t = np.transpose(t, axes=order)
    dim = 2 ** n_sites
    return t.reshape(dim, dim)


def vectorize(rho: np.ndarray, n_sites: int | None = None) -> LiouvilleVector:
    """Expand a 2^N x 2^N matrix over Majorana monomials.

    Amplitudes are c_a = tr((w^{a})^dag rho) / 2^N, so rho = sum_a c_a w^{a}.
    """
    rho = np.asarray(rho, dtype=complex)
    if n_sites is None:
        n_sites = rho.shape[0].bit_length() - 1
    if rho.shape != (2 ** n_sites, 2 ** n_sites):
        raise ValueError(f"expected 2^{n_sites} square matrix, got {rho.shape}")
    coeffs = pauli_coefficients(rho, n_sites).reshape(-1)
    masks, phases, _ = pauli_word_table(n_sites)
    amps = np.zeros(4 ** n_sites, dtype=complex)
    # rho = sum_W t_W P_W with P_W = phase_W w^{mask_W}
    amps[masks] = coeffs * phases
    return LiouvilleVector(n_sites, amps)


def devectorize(state, n_sites: int | None = None) -> np.ndarray:
    """Rebuild the dense matrix from Majorana amplitudes."""
    v, n = _as_amplitudes(state, n_sites)
    masks, phases, _ = pauli_word_table(n)
    coeffs = v[masks] / phases
    return matrix_from_pauli_coefficients(coeffs.reshape((4,) * n), n)


def vectorize_operator(op: OperatorSum) -> LiouvilleVector:
    """Symbolic expansion of an OperatorSum, no dense matrix required."""
    n = op.n_sites
    amps = np.zeros(4 ** n, dtype=complex)
    for mask, coeff in operator_to_majorana_terms(op).items():
        amps[mask] += coeff
    return LiouvilleVector(n, amps)


# ---------------------------------------------------------------------------
# inner products and structure checks
# ---------------------------------------------------------------------------


def liouville_inner(a, b, n_sites=None) -> complex:
    """<<A|B>> = tr(A^dag B) = 2^N (conj(a) . b)."""
    va, na = _as_amplitudes(a, n_sites)
    vb, nb = _as_amplitudes(b, n_sites)
    if na != nb:
        raise ValueError("site-count mismatch in inner product")
    return 2 ** na * np.vdot(va, vb)


def vector_trace(state, n_sites=None) -> complex:
    """tr(A) = 2^N c_0 (only the empty monomial has trace)."""
    v, n = _as_amplitudes(state, n_sites)
    return 2 ** n * v[0]


def vector_purity(state, n_sites=None) -> float:
    """tr(A^dag A) = 2^N sum |c_a|^2; equals tr(rho^2) for Hermitian rho."""
    v, n = _as_amplitudes(state, n_sites)
    return float(2 ** n * np.vdot(v, v).real)


@lru_cache(maxsize=8)
def reversal_signs(n_sites: int) -> np.ndarray:
    """s_a with (w^{a})^dag = s_a w^{a}: (-1)^{k(k-1)/2} for degree k."""
    k = _bitcount(_index_range(2 * n_sites))
    return 1 - 2 * (((k * (k - 1)) // 2) % 2)


def conjugate_vector(state, n_sites=None):
    """Amplitudes of A^dag given those of A."""
    v, n = _as_amplitudes(state, n_sites)
    out = reversal_signs(n) * np.conj(v)
    return LiouvilleVector(n, out) if isinstance(state, LiouvilleVector) else out


def hermiticity_defect(state, n_sites=None) -> float:
    """max |c_a - s_a conj(c_a)|; zero iff the operator is Hermitian."""
    v, n = _as_amplitudes(state, n_sites)
    return float(np.abs(v - reversal_signs(n) * np.conj(v)).max())


def parity_values(n_sites: int) -> np.ndarray:
    """Diagonal of the conjugation superoperator A -> M A M: (-1)^{degree}."""
    return 1 - 2 * (_bitcount(_index_range(2 * n_sites)) & 1)
