import numpy as np
import pytest

from lmem.dynamics import (
    evolve,
    exceptional_point_scan,
    expectation,
    expectation_series,
    isolated_pair_branches,
    physicality_report,
    spectrum_analysis,
)
from lmem.fock import vector_purity, vectorize
from lmem.liouvillian import build_liouvillian_thirdq
from lmem.model import ModelParams
from lmem.pauli import OperatorSum, PauliString, parity_word
from lmem.sectors import SectorLabel, restrict_liouvillian


def params(n, J=1.0, gamma=0.5):
    return ModelParams(
        n_sites=n, couplings=np.full(n - 1, float(J)), dephasing_rates=np.full(n, float(gamma))
    )


def up_state(n):
    rho = np.zeros((2 ** n, 2 ** n), dtype=complex)
    rho[0, 0] = 1.0
    return rho


class TestEvolve:
    def test_unitary_case_preserves_purity(self):
        n = 2
        p = params(n, J=1.0, gamma=0.0)
        t = np.linspace(0, 3, 7)
        res = evolve(up_state(n), p, t)
        assert res.time_unit == "absolute"
        purities = [vector_purity(res.amplitudes[k], n) for k in range(len(res))]
        np.testing.assert_allclose(purities, 1.0, atol=1e-7)

    def test_stationary_state_is_fixed(self):
        n = 3
        p = params(n, J=1.3, gamma=0.8)
        zeta = 0.5
        rho_s = (np.eye(2 ** n) + zeta * parity_word(n).to_matrix()) / 2 ** n
        res = evolve(rho_s, p, np.linspace(0, 5, 6))
        for k in range(len(res)):
            np.testing.assert_allclose(
                res.density_matrix(k), rho_s, atol=1e-9
            )

    def test_integrator_matches_eigen_expansion(self):
        n = 2
        p = params(n, J=1.0, gamma=0.5)
        t = np.linspace(0, 4, 9)
        res_i = evolve(up_state(n), p, t, method="integrator")
        res_e = evolve(up_state(n), p, t, method="eigen")
        x = PauliString.single(n, 1, "Z")
        np.testing.assert_allclose(
            expectation_series(x, res_i).real,
            expectation_series(x, res_e).real,
            atol=1e-6,
        )

    def test_sector_and_full_integrations_agree(self):
        n = 3
        p = params(n, J=0.9, gamma=0.6)
        rho0 = up_state(n)
        t = np.linspace(0, 3, 5)
        res_s = evolve(rho0, p, t, use_sectors=True)
        res_f = evolve(rho0, p, t, use_sectors=False)
        assert res_s.method_tag == "integrator-sector"
        np.testing.assert_allclose(res_s.amplitudes, res_f.amplitudes, atol=1e-7)

    def test_expm_stepping_matches_integrator(self):
        n = 3
        p = params(n, J=1.1, gamma=0.7)
        rho0 = up_state(n)
        t = np.linspace(0, 4, 9)
        res_e = evolve(rho0, p, t, method="expm")
        res_i = evolve(rho0, p, t, method="integrator", rtol=1e-11)
        assert res_e.method_tag == "expm-sector"
        np.testing.assert_allclose(res_e.amplitudes, res_i.amplitudes, atol=1e-8)

    def test_expm_requires_sector_preserving_model(self):
        from lmem.model import random_perturbed_params

        p = random_perturbed_params(3, u=2.0, rng_seed=1)
        with pytest.raises(ValueError, match="sector-preserving"):
            evolve(up_state(3), p, np.linspace(0, 1, 3), method="expm")

    def test_expm_rejects_nonuniform_grid(self):
        n = 2
        p = params(n, J=1.0, gamma=0.5)
        with pytest.raises(ValueError, match="uniform"):
            evolve(up_state(n), p, np.array([0.0, 0.5, 2.0]), method="expm")

    def test_time_unit_tagging(self):
        n = 2
        p = params(n, gamma=2.0)
        res = evolve(up_state(n), p, np.array([0.0, 2.0]))
        assert res.time_unit == "1/gamma"
        # gamma t = 2 at gamma = 2 is physical time 1: verify against the
        # eigen-expansion propagator of the same model at absolute time
        from lmem.liouvillian import build_liouvillian_thirdq
        from scipy.linalg import expm

        L = build_liouvillian_thirdq(p).toarray()
        v0 = vectorize(up_state(n), n).amplitudes
        expected = expm(-1j * L * 1.0) @ v0
        np.testing.assert_allclose(res.amplitudes[-1], expected, atol=1e-7)
        # heterogeneous rates fall back to absolute time
        p_het = ModelParams(
            n_sites=n, couplings=[1.0], dephasing_rates=[0.3, 0.9]
        )
        assert evolve(up_state(n), p_het, np.array([0.0, 1.0])).time_unit == "absolute"

    def test_nonphysical_initial_state_rejected(self):
        n = 2
        bad = np.eye(4, dtype=complex)  # trace 4
        with pytest.raises(ValueError, match="trace"):
            evolve(bad, params(n), np.array([0.0, 1.0]), check_initial=True)
        indefinite = np.diag([1.5, -0.5, 0, 0]).astype(complex)
        with pytest.raises(ValueError, match="negative eigenvalue"):
            evolve(indefinite, params(n), np.array([0.0, 1.0]), check_initial=True)

    def test_parity_conservation_sets_long_time_state(self):
        n = 2
        p = params(n, J=1.0, gamma=1.0)
        rho0 = up_state(n)
        zeta0 = expectation(parity_word(n), vectorize(rho0, n)).real
        res = evolve(rho0, p, np.array([0.0, 20.0]))
        rho_inf = res.density_matrix(-1)
        expected = (np.eye(2 ** n) + zeta0 * parity_word(n).to_matrix()) / 2 ** n
        np.testing.assert_allclose(rho_inf, expected, atol=1e-7)

    def test_physicality_report(self):
        n = 2
        p = params(n, J=1.0, gamma=0.7)
        res = evolve(up_state(n), p, np.linspace(0, 6, 13))
        rep = physicality_report(res)
        assert rep["max_trace_deviation"] < 1e-8
        assert rep["max_hermiticity_defect"] < 1e-8
        assert rep["max_negative_eigenvalue"] < 1e-8


class TestExpectation:
    def test_identity_expectation(self):
        n = 2
        rho = up_state(n)
        assert expectation(OperatorSum.identity(n), rho, n) == pytest.approx(1.0)

    def test_parity_expectation_on_stationary_family(self):
        n = 3
        for zeta in (-0.7, 0.0, 0.4):
            rho = (np.eye(8) + zeta * parity_word(n).to_matrix()) / 8
            assert expectation(parity_word(n), rho, n).real == pytest.approx(zeta, abs=1e-12)

    def test_matrix_trace_path_agrees(self):
        rng = np.random.default_rng(5)
        n = 3
        m = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        rho = m @ m.conj().T
        rho /= np.trace(rho).real
        codes = "".join(rng.choice(list("IXYZ")) for _ in range(n))
        X = PauliString.from_codes(codes)
        via_inner = expectation(X, rho, n)
        via_trace = np.trace(X.to_matrix() @ rho)
        assert via_inner == pytest.approx(via_trace, abs=1e-12)


class TestSpectrum:
    def test_zero_coupling_dissipative_ladder(self):
        n = 2
        gamma = 0.8
        p = params(n, J=0.0, gamma=gamma)
        L = build_liouvillian_thirdq(p)
        rep = spectrum_analysis(L.matrix, n_sites=n)
        steps = np.round(rep.eigenvalues.imag / (2 * gamma), 9)
        assert set(np.unique(steps)) <= {0.0, -1.0, -2.0}
        assert np.abs(rep.eigenvalues.real).max() < 1e-12

    def test_structure_full_space(self):
        n = 2
        p = params(n, J=1.0, gamma=0.5)
        rep = spectrum_analysis(build_liouvillian_thirdq(p).matrix, n_sites=n)
        assert rep.max_imag <= 1e-9
        assert not rep.unpaired
        covered = {i for pair in rep.pairing for i in pair}
        assert covered == set(range(4 ** n))
        assert rep.trace_defects.max() < 1e-8
        # stationary eigenvalue exists
        assert np.abs(rep.eigenvalues).min() < 1e-12

    def test_sector_block_structure(self):
        n = 3
        p = params(n, J=1.0, gamma=0.5)
        L = build_liouvillian_thirdq(p)
        lab = SectorLabel((-1, 1))
        block = restrict_liouvillian(L, lab)
        rep = spectrum_analysis(
            block.matrix, n_sites=n, basis_indices=block.basis_indices
        )
        assert rep.max_imag <= 1e-9
        assert not rep.unpaired

    def test_stationary_eigenmatrix_in_parity_span(self):
        n = 2
        p = params(n, J=1.0, gamma=0.5)
        L = build_liouvillian_thirdq(p).toarray()
        lam, R = np.linalg.eig(L)
        zero_modes = R[:, np.abs(lam) < 1e-10]
        assert zero_modes.shape[1] == 2
        # span{I, parity} = span of amplitude indices {0, last}
        support = np.abs(zero_modes).max(axis=1) > 1e-10
        assert set(np.flatnonzero(support)) == {0, 4 ** n - 1}


class TestExceptionalPoints:
    def test_isolated_pair_branch_merge(self):
        J = 2.0
        at_ep = isolated_pair_branches(J, J)
        assert abs(at_ep[0] - at_ep[1]) < 1e-12
        below = isolated_pair_branches(J, 0.5 * J)
        assert abs(below[0] - below[1]) > 1.0

    def test_pair_branches_appear_in_sector_block(self):
        n = 3
        J, gamma = 2.0, 1.2
        p = params(n, J=J, gamma=gamma)
        L = build_liouvillian_thirdq(p)
        lab = SectorLabel((-1, 1))
        ev = np.linalg.eigvals(restrict_liouvillian(L, lab).matrix)
        for branch in isolated_pair_branches(J, gamma):
            assert np.abs(ev - (branch - 2j * gamma)).min() < 1e-9

    def test_scan_flags_ep_at_gamma_equals_J(self):
        n = 3
        J = 2.0
        base = params(n, J=J, gamma=1.0)
        gammas = np.linspace(1.0, 3.0, 21)  # hits 2.0 exactly
        points = exceptional_point_scan(base, gammas, SectorLabel((-1, 1)))
        flagged = [pt.gamma for pt in points if pt.exceptional]
        assert any(abs(g - J) <= 0.1 + 1e-12 for g in flagged)
        # away from the EP the block diagonalizes well
        far = [pt for pt in points if abs(pt.gamma - J) > 0.5]
        assert all(pt.condition_number < 1e6 for pt in far)

    def test_smooth_limit_at_small_gamma(self):
        n = 3
        base = params(n, J=1.0, gamma=0.1)
        pts = exceptional_point_scan(base, [1e-4], SectorLabel((-1, 1)))
        assert np.abs(pts[0].eigenvalues.imag).max() < 1e-3

    def test_slow_modes_of_first_broken_bond_sector(self):
        # the span {sz1, sy1 sx2} is invariant; above the exceptional point
        # its eigenmatrices are sz1 + r sx2 sy1 with the real mixing ratios
        # r = -(gamma -/+ sqrt(gamma^2 - J^2)) / J and eigenvalues
        # -2i gamma +/- 2i sqrt(gamma^2 - J^2); the parity partners mirror it
        from lmem.pauli import PauliString, parity_word

        n, J, gamma = 4, 2.0, 3.0
        p = params(n, J=J, gamma=gamma)
        L = build_liouvillian_thirdq(p).matrix
        sz1 = PauliString.single(n, 1, "Z").to_matrix()
        syx = (
            PauliString.single(n, 1, "Y").mul(PauliString.single(n, 2, "X"))
        ).to_matrix()
        root = np.sqrt(gamma ** 2 - J ** 2)
        m = parity_word(n).to_matrix()
        for partner in (np.eye(2 ** n), m):
            for sign in (+1, -1):
                lam = -2j * gamma + sign * 2j * root
                r = -(gamma - sign * root) / J
                mat = (sz1 + r * syx) @ partner
                v = vectorize(mat, n).amplitudes
                resid = np.abs(L @ v - lam * v).max() / np.abs(v).max()
                assert resid < 1e-12

    def test_slow_branch_becomes_quasi_stable_at_large_gamma(self):
        # decay rate of the slowest broken-bond mode falls like J^2 / gamma
        J = 1.0
        rates = []
        for gamma in (5.0, 50.0):
            lam = isolated_pair_branches(J, gamma)
            rates.append(min(-lam.imag[np.abs(lam.real) < 1e-12]))
        assert rates[1] < rates[0] / 5
        assert rates[1] == pytest.approx(J ** 2 / 50.0, rel=0.01)
