import numpy as np
import pytest

from lmem.fock import (
    LiouvilleVector,
    apply_c,
    apply_c_dagger,
    c_dagger_matrix,
    c_matrix,
    conjugate_vector,
    devectorize,
    hermiticity_defect,
    left_mult_monomial,
    left_mult_operator,
    liouville_inner,
    number_values,
    parity_values,
    pauli_coefficients,
    right_mult_monomial,
    right_mult_operator,
    vector_purity,
    vector_trace,
    vectorize,
    vectorize_operator,
)
from lmem.pauli import (
    MajoranaMonomial,
    OperatorSum,
    PauliString,
    majorana_to_spin,
    parity_word,
)


def monomial_matrix(mask, n, coeff=1.0):
    op = majorana_to_spin(MajoranaMonomial(2 * n, mask, coeff))
    return op.to_matrix()


def random_matrix(rng, n, hermitian=False):
    d = 2 ** n
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (m + m.conj().T) / 2 if hermitian else m


def basis_vector(mask, n):
    v = np.zeros(4 ** n, dtype=complex)
    v[mask] = 1.0
    return v


class TestLadderOperators:
    def test_create_on_vacuum(self):
        n = 2
        out = apply_c_dagger(1, basis_vector(0, n), n)
        np.testing.assert_array_equal(out, basis_vector(0b0001, n))

    def test_car_on_vacuum(self):
        n = 2
        vac = basis_vector(0, n)
        cc = apply_c(1, apply_c_dagger(1, vac, n), n)
        np.testing.assert_array_equal(cc, vac)
        assert np.all(apply_c_dagger(1, apply_c(1, vac, n), n) == 0)

    def test_ordering_sign(self):
        # c_2^dag |w_1> = |w_2 w_1> = -|w_1 w_2>
        n = 2
        out = apply_c_dagger(2, basis_vector(0b01, n), n)
        np.testing.assert_array_equal(out, -basis_vector(0b11, n))

    def test_matrices_match_apply(self):
        rng = np.random.default_rng(2)
        n = 2
        v = rng.normal(size=16) + 1j * rng.normal(size=16)
        for j in range(1, 5):
            np.testing.assert_allclose(
                c_dagger_matrix(j, n) @ v, apply_c_dagger(j, v, n), atol=1e-14
            )
            np.testing.assert_allclose(c_matrix(j, n) @ v, apply_c(j, v, n), atol=1e-14)

    def test_car_full(self):
        for n in (2, 3):
            dim = 4 ** n
            C = [c_matrix(j, n) for j in range(1, 2 * n + 1)]
            Cd = [c_dagger_matrix(j, n) for j in range(1, 2 * n + 1)]
            zeros = np.zeros((dim, dim))
            for i in range(2 * n):
                for j in range(2 * n):
                    anti = (C[i] @ Cd[j] + Cd[j] @ C[i]).toarray()
                    target = np.eye(dim) if i == j else zeros
                    np.testing.assert_allclose(anti, target, atol=1e-14)
                    anti2 = (C[i] @ C[j] + C[j] @ C[i]).toarray()
                    np.testing.assert_allclose(anti2, zeros, atol=1e-14)

    def test_mode_index_range(self):
        with pytest.raises(ValueError):
            apply_c(0, basis_vector(0, 2), 2)
        with pytest.raises(ValueError):
            c_dagger_matrix(5, 2)

    def test_number_values(self):
        n = 2
        nv = number_values(3, n)
        assert nv[0b0100] == 1 and nv[0b0011] == 0


class TestVectorize:
    def test_maximally_mixed(self):
        n = 3
        v = vectorize(np.eye(8) / 8, n)
        assert v.amplitudes[0] == pytest.approx(2.0 ** -n)
        assert np.abs(v.amplitudes[1:]).max() == 0

    def test_round_trip_random(self):
        rng = np.random.default_rng(4)
        for n in (1, 2, 3):
            rho = random_matrix(rng, n, hermitian=True)
            v = vectorize(rho, n)
            np.testing.assert_allclose(devectorize(v), rho, atol=1e-13)

    def test_amplitudes_match_trace_formula(self):
        rng = np.random.default_rng(8)
        n = 2
        rho = random_matrix(rng, n)
        v = vectorize(rho, n)
        for mask in range(16):
            w = monomial_matrix(mask, n)
            expected = np.trace(w.conj().T @ rho) / 2 ** n
            assert v.amplitudes[mask] == pytest.approx(expected, abs=1e-13)

    def test_stationary_family_two_amplitudes(self):
        n = 3
        m = parity_word(n).to_matrix()
        for zeta in (0.5, -1.0):
            rho = (np.eye(8) + zeta * m) / 8
            v = vectorize(rho, n)
            nonzero = np.flatnonzero(np.abs(v.amplitudes) > 1e-14)
            assert set(nonzero) == {0, 4 ** n - 1}

    def test_vectorize_operator_matches_dense(self):
        rng = np.random.default_rng(12)
        n = 3
        words = [
            PauliString.from_codes("".join(rng.choice(list("IXYZ")) for _ in range(n)))
            for _ in range(5)
        ]
        op = OperatorSum(n, [(rng.normal(), w) for w in words])
        np.testing.assert_allclose(
            vectorize_operator(op).amplitudes,
            vectorize(op.to_matrix(), n).amplitudes,
            atol=1e-13,
        )

    def test_pauli_coefficients_against_traces(self):
        rng = np.random.default_rng(21)
        n = 3
        rho = random_matrix(rng, n)
        coeffs = pauli_coefficients(rho, n)
        codes = "IXYZ"
        for _ in range(20):
            mu = tuple(rng.integers(0, 4, size=n))
            word = PauliString.from_codes("".join(codes[d] for d in mu))
            expected = np.trace(word.to_matrix() @ rho) / 2 ** n
            assert coeffs[mu] == pytest.approx(expected, abs=1e-13)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            vectorize(np.eye(6), 2)


class TestMultiplicationSuperoperators:
    def test_left_right_match_dense(self):
        rng = np.random.default_rng(7)
        for n in (1, 2, 3):
            rho = random_matrix(rng, n)
            v = vectorize(rho, n).amplitudes
            for _ in range(8):
                mask = int(rng.integers(0, 4 ** n))
                coeff = complex(rng.normal(), rng.normal())
                w = monomial_matrix(mask, n, coeff)
                np.testing.assert_allclose(
                    devectorize(left_mult_monomial(MajoranaMonomial(2 * n, mask, coeff), n) @ v, n),
                    w @ rho,
                    atol=1e-12,
                )
                np.testing.assert_allclose(
                    devectorize(right_mult_monomial(MajoranaMonomial(2 * n, mask, coeff), n) @ v, n),
                    rho @ w,
                    atol=1e-12,
                )

    def test_operator_superoperators(self):
        rng = np.random.default_rng(9)
        n = 2
        words = [
            PauliString.from_codes("".join(rng.choice(list("IXYZ")) for _ in range(n)))
            for _ in range(3)
        ]
        op = OperatorSum(n, [(complex(rng.normal(), rng.normal()), w) for w in words])
        rho = random_matrix(rng, n)
        v = vectorize(rho, n).amplitudes
        np.testing.assert_allclose(
            devectorize(left_mult_operator(op, n) @ v, n), op.to_matrix() @ rho, atol=1e-12
        )
        np.testing.assert_allclose(
            devectorize(right_mult_operator(op, n) @ v, n), rho @ op.to_matrix(), atol=1e-12
        )

    def test_left_multiplication_equals_ladder_sum(self):
        # prepending a single mode w_j is exactly c_j + c_j^dag
        n = 2
        for j in range(1, 5):
            mono = MajoranaMonomial(2 * n, 1 << (j - 1))
            lm = left_mult_monomial(mono, n).toarray()
            ladder = (c_matrix(j, n) + c_dagger_matrix(j, n)).toarray()
            np.testing.assert_allclose(lm, ladder, atol=1e-14)


class TestStructure:
    def test_inner_product_is_trace(self):
        rng = np.random.default_rng(14)
        n = 3
        a, b = random_matrix(rng, n), random_matrix(rng, n)
        lhs = liouville_inner(vectorize(a, n), vectorize(b, n))
        rhs = np.trace(a.conj().T @ b)
        assert lhs == pytest.approx(rhs, abs=1e-11)

    def test_basis_norm(self):
        n = 3
        v = LiouvilleVector(n, basis_vector(5, n))
        assert liouville_inner(v, v) == pytest.approx(2 ** n)

    def test_trace_and_purity(self):
        rng = np.random.default_rng(16)
        n = 2
        rho = random_matrix(rng, n, hermitian=True)
        rho = rho @ rho.conj().T
        rho /= np.trace(rho).real
        v = vectorize(rho, n)
        assert vector_trace(v) == pytest.approx(1.0, abs=1e-12)
        assert vector_purity(v) == pytest.approx(np.trace(rho @ rho).real, abs=1e-12)

    def test_conjugation_structure(self):
        rng = np.random.default_rng(18)
        n = 3
        rho = random_matrix(rng, n)
        np.testing.assert_allclose(
            conjugate_vector(vectorize(rho, n)).amplitudes,
            vectorize(rho.conj().T, n).amplitudes,
            atol=1e-13,
        )
        herm = random_matrix(rng, n, hermitian=True)
        assert hermiticity_defect(vectorize(herm, n)) < 1e-13
        assert hermiticity_defect(vectorize(rho, n)) > 1e-3

    def test_parity_values_match_conjugation_by_parity_word(self):
        n = 2
        m = parity_word(n).to_matrix()
        rng = np.random.default_rng(20)
        rho = random_matrix(rng, n)
        v = vectorize(rho, n).amplitudes
        np.testing.assert_allclose(
            parity_values(n) * v, vectorize(m @ rho @ m, n).amplitudes, atol=1e-13
        )
