"""Lindblad generators as sparse matrices on the Majorana-monomial basis.

The master equation is taken in the form

    i d rho / dt = [H, rho] + i sum_k ( L_k rho L_k^dag - (1/2){L_k^dag L_k, rho} )

so that i d|rho>/dt = L |rho> and stationary states solve L |rho> = 0.

Two independent constructions are provided and must agree entrywise:

* `build_liouvillian_direct` vectorizes the right-hand side term by term
  using the exact left/right multiplication superoperators of `fock`. It
  accepts arbitrary Pauli-word Hamiltonians and dissipators, so every
  perturbed model goes through this path.

* `build_liouvillian_thirdq` assembles the closed third-quantized form of
  the unperturbed chain,

      L = -2i sum_j J_j (c_{2j}^dag c_{2j+1} + c_{2j} c_{2j+1}^dag)
          + i sum_j gamma_j [ (2 n_{2j-1} - 1)(2 n_{2j} - 1) - 1 ],

  from the fermionic ladder matrices.

A third, deliberately pedestrian route (`colstack_superoperator` plus the
basis change `majorana_basis_matrix`) builds the superoperator by Kronecker
products in the column-stacking convention and conjugates it into the
Majorana basis; it is the brute-force oracle the tests compare against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .fock import (
    c_dagger_matrix,
    c_matrix,
    left_mult_operator,
    number_values,
    right_mult_operator,
)
from .model import ModelParams, build_dissipators, build_hamiltonian
from .pauli import OperatorSum, _check_dense, majorana_to_spin, MajoranaMonomial


class UnsupportedModelError(ValueError):
    """Raised when the third-quantized closed form does not cover the model."""


@dataclass
class Superoperator:
    """A Lindblad generator with its provenance tag."""

    n_sites: int
    matrix: sp.spmatrix
    source_tag: str  # "third-quantized" or "direct-vectorized"

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


def _dissipator_superoperator(L_op: OperatorSum, n_sites: int) -> sp.csr_matrix:
    """i ( L rho L^dag - 1/2 {L^dag L, rho} ) as a sparse matrix."""
    Ld = L_op.dagger()
    jump = left_mult_operator(L_op, n_sites) @ right_mult_operator(Ld, n_sites)
    ldl = Ld @ L_op
    anti = left_mult_operator(ldl, n_sites) + right_mult_operator(ldl, n_sites)
    return (1j * (jump - 0.5 * anti)).tocsr()


def build_liouvillian_direct(
    params_or_h, dissipators=None, n_sites: int | None = None
) -> Superoperator:
    """Assemble L for an arbitrary Pauli-word model, term by term.

    Either pass ModelParams, or an explicit (OperatorSum hamiltonian,
    list of OperatorSum dissipators, n_sites).
    """
    if isinstance(params_or_h, ModelParams):
        params = params_or_h
        h = build_hamiltonian(params)
        dissipators = build_dissipators(params)
        n_sites = params.n_sites
    else:
        h = params_or_h
        if n_sites is None:
            n_sites = h.n_sites
        dissipators = list(dissipators or [])
    mat = left_mult_operator(h, n_sites) - right_mult_operator(h, n_sites)
    for L_op in dissipators:
        mat = mat + _dissipator_superoperator(L_op, n_sites)
    return Superoperator(n_sites, mat.tocsr(), "direct-vectorized")


def build_liouvillian_thirdq(params: ModelParams) -> Superoperator:
    """Closed third-quantized form; unperturbed models only."""
    if not params.is_unperturbed():
        raise UnsupportedModelError(
            "third-quantized closed form covers only the unperturbed chain "
            "(transverse_u = 0, field_b = 0, bond_dissipation = 0)"
        )
    n = params.n_sites
    dim = 4 ** n
    mat = sp.csr_matrix((dim, dim), dtype=complex)
    for j in range(1, n):
        Jj = params.couplings[j - 1]
        if Jj != 0:
            hop = (
                c_dagger_matrix(2 * j, n) @ c_matrix(2 * j + 1, n)
                + c_matrix(2 * j, n) @ c_dagger_matrix(2 * j + 1, n)
            )
            mat = mat + (-2j * Jj) * hop
    diag = np.zeros(dim, dtype=complex)
    for j in range(1, n + 1):
        gj = params.dephasing_rates[j - 1]
        if gj != 0:
            pair = (2 * number_values(2 * j - 1, n) - 1) * (
                2 * number_values(2 * j, n) - 1
            )
            diag += 1j * gj * (pair - 1)
    mat = mat + sp.diags(diag)
    return Superoperator(n, mat.tocsr(), "third-quantized")


def identity_left_vector(n_sites: int) -> np.ndarray:
    """Amplitudes of <<I|; trace preservation reads <<I| L = 0."""
    v = np.zeros(4 ** n_sites, dtype=complex)
    v[0] = 2 ** n_sites  # <<I| = tr(I . ), basis norm 2^N on the empty word
    return v


def trace_preservation_defect(superop: Superoperator) -> float:
    """max |<<I| L| over columns; zero for any Lindblad generator."""
    left = identity_left_vector(superop.n_sites)
    row = superop.matrix.T @ left.conj()
    return float(np.abs(row).max())


# ---------------------------------------------------------------------------
# brute-force column-stacking oracle
# ---------------------------------------------------------------------------


def colstack_superoperator(H: np.ndarray, Ls, n_sites: int) -> np.ndarray:
    """Dense generator in the column-stacking convention vec(A rho B) =
    (B^T kron A) vec(rho)."""
    _check_dense(n_sites)
    dim = 2 ** n_sites
    eye = np.eye(dim)
    out = np.kron(eye, H) - np.kron(H.T, eye)
    for L in Ls:
        ldl = L.conj().T @ L
        out = out + 1j * (
            np.kron(L.conj(), L)
            - 0.5 * np.kron(eye, ldl)
            - 0.5 * np.kron(ldl.T, eye)
        )
    return out


def majorana_basis_matrix(n_sites: int) -> np.ndarray:
    """Columns are column-stacked Majorana monomials; W^dag W = 2^N I."""
    _check_dense(n_sites)
    dim = 4 ** n_sites
    W = np.empty((dim, dim), dtype=complex)
    for mask in range(dim):
        m = majorana_to_spin(MajoranaMonomial(2 * n_sites, mask)).to_matrix()
        W[:, mask] = m.reshape(-1, order="F")
    return W


def build_liouvillian_colstack_oracle(params: ModelParams) -> Superoperator:
    """Dense kron-built generator conjugated into the Majorana basis.

    Test oracle only: O(16^N) memory.
    """
    n = params.n_sites
    H = build_hamiltonian(params).to_matrix()
    Ls = [d.to_matrix() for d in build_dissipators(params)]
    W = majorana_basis_matrix(n)
    Lcol = colstack_superoperator(H, Ls, n)
    mat = (W.conj().T @ Lcol @ W) / 2 ** n
    return Superoperator(n, sp.csr_matrix(mat), "direct-vectorized")


# ---------------------------------------------------------------------------
# sparse triplet export
# ---------------------------------------------------------------------------


def write_triplets(superop: Superoperator, path) -> None:
    """Text export, one entry per line: row col re im (0-based indices)."""
    coo = superop.matrix.tocoo()
    with open(path, "w") as fh:
        fh.write(f"# dimension {superop.dimension} source {superop.source_tag}\n")
        for r, c, v in zip(coo.row, coo.col, coo.data):
            fh.write(f"{r} {c} {v.real:.16e} {v.imag:.16e}\n")


def read_triplets(path) -> sp.csr_matrix:
    rows, cols, vals = [], [], []
    dim = None
    with open(path) as fh:
        for line in fh:
            if line.startswith("#"):
                dim = int(line.split()[2])
                continue
            r, c, re_part, im_part = line.split()
            rows.append(int(r))
            cols.append(int(c))
            vals.append(float(re_part) + 1j * float(im_part))
    if dim is None:
        raise ValueError("triplet file missing dimension header")
    return sp.csr_matrix((vals, (rows, cols)), shape=(dim, dim))
