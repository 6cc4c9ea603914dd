"""Time evolution, expectation values, and spectral analysis.

States are carried as Liouville amplitude vectors and evolve under
i d|rho>/dt = L |rho>. Two methods are provided and cross-validated:

* "integrator": adaptive Runge-Kutta 5(4) on the amplitude vector (default
  tolerances rtol 1e-8 / atol 1e-10). When the model commutes with every
  parity pair, the vector is split into its sector components and each
  block is integrated independently with purely relative error control;
  this keeps deeply decaying components relatively accurate and is the
  fast path for large chains.

* "eigen": dense eigendecomposition with biorthogonal left/right pairs,
  |rho(t)> = R exp(-i diag(lambda) t) R^{-1} |rho(0)>. Useful for long-time
  queries; unreliable exactly at defective (exceptional) points.

Spectral reports check the structural facts every Lindblad generator obeys:
eigenvalues in the closed lower half plane, anti-conjugate pairing
{lambda, -conj(lambda)}, and tracelessness of decaying eigenmatrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.integrate import solve_ivp

from .fock import (
    LiouvilleVector,
    devectorize,
    hermiticity_defect,
    liouville_inner,
    vector_trace,
    vectorize,
    vectorize_operator,
)
from .liouvillian import Superoperator, build_liouvillian_direct, build_liouvillian_thirdq
from .model import ModelParams
from .pauli import OperatorSum, PauliString
from .sectors import SectorLabel, enumerate_sector_basis, sector_eigenvalues


@dataclass
class EvolutionResult:
    """Sampled trajectory of Liouville amplitude vectors."""

    n_sites: int
    times: np.ndarray  # in the tagged unit
    amplitudes: np.ndarray  # shape (len(times), 4^N)
    method_tag: str
    time_unit: str  # "1/gamma" or "absolute"

    def state(self, k: int) -> LiouvilleVector:
        return LiouvilleVector(self.n_sites, self.amplitudes[k])

    def density_matrix(self, k: int) -> np.ndarray:
        return devectorize(self.amplitudes[k], self.n_sites)

    def __len__(self):
        return len(self.times)


def _liouvillian_for(params: ModelParams) -> Superoperator:
    if params.is_unperturbed():
        return build_liouvillian_thirdq(params)
    return build_liouvillian_direct(params)


def _initial_amplitudes(rho0, n_sites) -> np.ndarray:
    if isinstance(rho0, LiouvilleVector):
        return rho0.amplitudes.copy()
    if isinstance(rho0, OperatorSum):
        return vectorize_operator(rho0).amplitudes
    return vectorize(np.asarray(rho0, dtype=complex), n_sites).amplitudes


def check_physical_initial_state(rho: np.ndarray, tol: float = 1e-10) -> None:
    """Unit trace, Hermiticity, positive semidefiniteness."""
    tr = np.trace(rho)
    if abs(tr - 1) > tol:
        raise ValueError(f"initial state trace {tr} is not 1")
    if np.abs(rho - rho.conj().T).max() > tol:
        raise ValueError("initial state is not Hermitian")
    lam = np.linalg.eigvalsh(rho)
    if lam.min() < -tol:
        raise ValueError(f"initial state has negative eigenvalue {lam.min():.3e}")


def _operator_inf_norm(matrix) -> float:
    if sp.issparse(matrix):
        return float(abs(matrix).sum(axis=1).max())
    return float(np.abs(matrix).sum(axis=1).max())


def _integrate(matrix, v0, t_phys, rtol, atol) -> np.ndarray:
    """RK45 on i dv/dt = M v, sampled at t_phys (t_phys[0] may be > 0)."""
    if sp.issparse(matrix):
        rhs = lambda t, v: -1j * (matrix @ v)
    else:
        rhs = lambda t, v: -1j * matrix.dot(v)
    t0, t1 = 0.0, float(t_phys[-1])
    if t1 == t0:
        return np.tile(v0, (len(t_phys), 1))
    # an explicit first step keeps the step selector away from components
    # that are exactly zero when atol is effectively zero
    scale = _operator_inf_norm(matrix)
    first = min(t1 - t0, 0.1 / scale) if scale > 0 else t1 - t0
    sol = solve_ivp(
        rhs,
        (t0, t1),
        v0.astype(complex),
        t_eval=t_phys,
        method="RK45",
        rtol=rtol,
        atol=atol,
        first_step=first,
    )
    if not sol.success:
        raise RuntimeError(f"integrator failed: {sol.message}")
    return sol.y.T


def _eigen_evolve(matrix, v0, t_phys) -> np.ndarray:
    dense = matrix.toarray() if sp.issparse(matrix) else np.asarray(matrix)
    lam, R = np.linalg.eig(dense)
    g = np.linalg.solve(R, v0)
    phases = np.exp(-1j * np.outer(t_phys, lam))
    return (phases * g) @ R.T


def _expm_step_evolve(block: np.ndarray, v0: np.ndarray, t_phys: np.ndarray) -> np.ndarray:
    """Exact exponential stepping on a uniform grid.

    Diagonal blocks (broken-coupling sectors) evolve in closed form; other
    blocks step with one Pade exponential of the grid spacing.
    """
    from scipy.linalg import expm

    off = block - np.diag(np.diag(block))
    if np.abs(off).max() == 0.0:
        return np.exp(-1j * np.outer(t_phys, np.diag(block))) * v0
    steps = np.diff(t_phys)
    if steps.size and np.abs(steps - steps[0]).max() > 1e-12 * max(steps.max(), 1e-300):
        raise ValueError("expm evolution requires a uniform time grid")
    out = np.empty((len(t_phys), v0.size), dtype=complex)
    v = v0.astype(complex)
    if t_phys[0] != 0.0:
        v = expm(-1j * block * t_phys[0]) @ v
    out[0] = v
    if steps.size:
        E = expm(-1j * block * steps[0])
        for k in range(1, len(t_phys)):
            v = E @ v
            out[k] = v
    return out


def _occupied_sectors(v0: np.ndarray, n_sites: int):
    """Sector labels carrying weight, with their basis index arrays."""
    nz = np.flatnonzero(np.abs(v0) > 0)
    if nz.size == 0:
        nz = np.array([0])
    patterns = sector_eigenvalues(nz, n_sites)
    out = []
    seen = set()
    for row in patterns:
        key = tuple(int(x) for x in row)
        if key not in seen:
            seen.add(key)
            label = SectorLabel(key)
            out.append((label, enumerate_sector_basis(label, n_sites)))
    return out


def evolve(
    rho0,
    params: ModelParams,
    t_grid,
    method: str = "integrator",
    use_sectors: bool | None = None,
    rtol: float = 1e-8,
    atol: float = 1e-10,
    check_initial: bool = False,
) -> EvolutionResult:
    """Evolve an initial state over t_grid.

    t_grid is in units of 1/gamma when the dephasing rates are homogeneous
    and positive, absolute otherwise. rho0 may be a dense matrix, a
    LiouvilleVector, or an OperatorSum. With use_sectors (default: on
    whenever the model preserves the parity pairs and method is
    "integrator"), each occupied sector is integrated separately with
    purely relative error control.
    """
    n = params.n_sites
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 1 or np.any(np.diff(t_grid) < 0):
        raise ValueError("t_grid must be a nondecreasing 1-D array")
    if check_initial and not isinstance(rho0, (LiouvilleVector, OperatorSum)):
        check_physical_initial_state(np.asarray(rho0, dtype=complex))
    v0 = _initial_amplitudes(rho0, n)

    gamma = params.homogeneous_gamma()
    if gamma is not None:
        t_phys = t_grid / gamma
        unit = "1/gamma"
    else:
        t_phys = t_grid
        unit = "absolute"

    superop = _liouvillian_for(params)
    if use_sectors is None:
        use_sectors = params.preserves_sectors() and method == "integrator"

    if method == "eigen":
        amps = _eigen_evolve(superop.matrix, v0, t_phys)
        tag = "eigen-expansion"
    elif method == "expm":
        if not params.preserves_sectors():
            raise ValueError("expm sector evolution requires a sector-preserving model")
        amps = np.zeros((len(t_phys), 4 ** n), dtype=complex)
        csc = sp.csc_matrix(superop.matrix)
        for label, idx in _occupied_sectors(v0, n):
            block = csc[:, idx][idx, :].toarray()
            amps[:, idx] = _expm_step_evolve(block, v0[idx], t_phys)
        tag = "expm-sector"
    elif method == "integrator":
        if use_sectors and params.preserves_sectors():
            amps = np.zeros((len(t_phys), 4 ** n), dtype=complex)
            csc = sp.csc_matrix(superop.matrix)
            for label, idx in _occupied_sectors(v0, n):
                block = csc[:, idx][idx, :].toarray()
                seg = _integrate(block, v0[idx], t_phys, rtol=rtol, atol=1e-300)
                amps[:, idx] = seg
            tag = "integrator-sector"
        else:
            amps = _integrate(superop.matrix, v0, t_phys, rtol=rtol, atol=atol)
            tag = "integrator"
    else:
        raise ValueError(f"unknown evolution method {method!r}")
    return EvolutionResult(n, t_grid.copy(), amps, tag, unit)


# ---------------------------------------------------------------------------
# observables
# ---------------------------------------------------------------------------


def _observable_vector(X, n_sites) -> np.ndarray:
    if isinstance(X, LiouvilleVector):
        return X.amplitudes
    if isinstance(X, PauliString):
        X = OperatorSum.from_pauli(X)
    if isinstance(X, OperatorSum):
        return vectorize_operator(X).amplitudes
    return vectorize(np.asarray(X, dtype=complex), n_sites).amplitudes


def expectation(X, state, n_sites: int | None = None) -> complex:
    """tr(X rho), evaluated as the Liouville inner product <<X|rho>>.

    X must be Hermitian for the inner-product form to equal tr(X rho);
    both dense matrices and symbolic operators are accepted for X and rho.
    """
    if n_sites is None:
        if isinstance(state, LiouvilleVector):
            n_sites = state.n_sites
        elif isinstance(X, (OperatorSum, PauliString)):
            n_sites = X.n_sites
        else:
            n_sites = int(round(np.log2(np.asarray(state).shape[0])))
    xv = _observable_vector(X, n_sites)
    sv = _initial_amplitudes(state, n_sites)
    return liouville_inner(xv, sv, n_sites)


def expectation_series(X, result: EvolutionResult) -> np.ndarray:
    xv = _observable_vector(X, result.n_sites)
    return 2 ** result.n_sites * (result.amplitudes @ np.conj(xv))


def physicality_report(result: EvolutionResult) -> dict:
    """Worst-case trace, Hermiticity, and positivity deviations on a trajectory."""
    worst_trace = 0.0
    worst_herm = 0.0
    worst_neg = 0.0
    for k in range(len(result)):
        v = result.amplitudes[k]
        worst_trace = max(worst_trace, abs(vector_trace(v, result.n_sites) - 1.0))
        worst_herm = max(worst_herm, hermiticity_defect(v, result.n_sites))
        rho = result.density_matrix(k)
        lam_min = np.linalg.eigvalsh((rho + rho.conj().T) / 2).min()
        worst_neg = max(worst_neg, max(0.0, -float(lam_min)))
    return {
        "max_trace_deviation": worst_trace,
        "max_hermiticity_defect": worst_herm,
        "max_negative_eigenvalue": worst_neg,
    }


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------


@dataclass
class SpectrumReport:
    eigenvalues: np.ndarray
    pairing: list  # index pairs (i, j) with lambda_j ~ -conj(lambda_i)
    unpaired: list
    max_imag: float
    defect_flags: np.ndarray  # per-eigenvalue near-degeneracy indicator
    trace_defects: np.ndarray | None = None  # |tr rho_m| for decaying modes


def spectrum_analysis(
    matrix,
    n_sites: int | None = None,
    pair_tol: float = 1e-9,
    check_traces: bool = True,
    basis_indices: np.ndarray | None = None,
) -> SpectrumReport:
    """Eigenvalues with anti-conjugate pairing and structural checks.

    For a sector block pass basis_indices so eigenvectors embed into the
    full space for the trace check.
    """
    dense = matrix.toarray() if sp.issparse(matrix) else np.asarray(matrix)
    lam, R = np.linalg.eig(dense)
    order = np.lexsort((lam.real, lam.imag))
    lam, R = lam[order], R[:, order]

    target = -np.conj(lam)
    used = np.zeros(lam.size, dtype=bool)
    pairing, unpaired = [], []
    from scipy.spatial import cKDTree

    tree = cKDTree(np.column_stack([lam.real, lam.imag]))
    for i in range(lam.size):
        if used[i]:
            continue
        hits = tree.query_ball_point([target[i].real, target[i].imag], r=pair_tol)
        # a purely imaginary eigenvalue may pair with itself
        free = [h for h in hits if h == i or not used[h]]
        if free:
            j = min(free, key=lambda h: abs(lam[h] - target[i]))
            pairing.append((i, j))
            used[i] = used[j] = True
        else:
            unpaired.append(i)
            used[i] = True

    gaps = np.full(lam.size, np.inf)
    if lam.size > 1:
        dists, _ = tree.query(np.column_stack([lam.real, lam.imag]), k=2)
        gaps = dists[:, 1]
    defect_flags = gaps < 1e-6

    trace_defects = None
    if check_traces:
        if n_sites is None and basis_indices is None:
            n_sites = round(np.log(dense.shape[0]) / np.log(4))
        decaying = lam.imag < -1e-9
        vals = np.zeros(lam.size)
        if basis_indices is None:
            # trace of the eigenmatrix is 2^N times its empty-word amplitude
            vals[decaying] = np.abs(
                2 ** n_sites * R[0, decaying] / np.linalg.norm(R[:, decaying], axis=0)
            )
        else:
            if n_sites is None:
                raise ValueError("n_sites required with basis_indices")
            pos = np.flatnonzero(basis_indices == 0)
            if pos.size:
                vals[decaying] = np.abs(
                    2 ** n_sites
                    * R[pos[0], decaying]
                    / np.linalg.norm(R[:, decaying], axis=0)
                )
        trace_defects = vals

    return SpectrumReport(
        eigenvalues=lam,
        pairing=pairing,
        unpaired=unpaired,
        max_imag=float(lam.imag.max()) if lam.size else 0.0,
        defect_flags=defect_flags,
        trace_defects=trace_defects,
    )


# ---------------------------------------------------------------------------
# exceptional-point scan
# ---------------------------------------------------------------------------


@dataclass
class ScanPoint:
    gamma: float
    eigenvalues: np.ndarray
    min_gap: float
    condition_number: float
    exceptional: bool


def exceptional_point_scan(
    params_base: ModelParams,
    gamma_values,
    sector: SectorLabel,
    gap_tol: float = 1e-6,
    cond_threshold: float = 1e6,
) -> list[ScanPoint]:
    """Sector-block spectra across a dissipation scan.

    A point is flagged exceptional when two eigenvalues coalesce within
    gap_tol and the eigenvector matrix condition number exceeds
    cond_threshold; the condition number distinguishes a defective
    coalescence from an ordinary degeneracy.
    """
    from .sectors import restrict_liouvillian

    out = []
    for g in np.asarray(gamma_values, dtype=float):
        p = ModelParams(
            n_sites=params_base.n_sites,
            couplings=params_base.couplings.copy(),
            dephasing_rates=np.full(params_base.n_sites, g),
            rng_seed=params_base.rng_seed,
        )
        block = restrict_liouvillian(build_liouvillian_thirdq(p), sector)
        lam, R = np.linalg.eig(block.matrix)
        if lam.size > 1:
            from scipy.spatial import cKDTree

            tree = cKDTree(np.column_stack([lam.real, lam.imag]))
            dists, _ = tree.query(np.column_stack([lam.real, lam.imag]), k=2)
            min_gap = float(dists[:, 1].min())
        else:
            min_gap = np.inf
        cond = float(np.linalg.cond(R))
        out.append(
            ScanPoint(
                gamma=float(g),
                eigenvalues=lam,
                min_gap=min_gap,
                condition_number=cond,
                exceptional=bool(min_gap < gap_tol and cond > cond_threshold),
            )
        )
    return out


def isolated_pair_branches(J: float, gamma: float) -> np.ndarray:
    """Closed-form eigenvalues of one coupled Majorana pair inside a broken
    chain: -2i gamma +/- 2 sqrt(J^2 - gamma^2) and -2i gamma +/- 2J.

    The first branch pair merges at gamma = J, the exceptional point.
    """
    root = np.sqrt(complex(J * J - gamma * gamma))
    return np.array(
        [
            -2j * gamma + 2 * root,
            -2j * gamma - 2 * root,
            -2j * gamma + 2 * J,
            -2j * gamma - 2 * J,
        ]
    )
