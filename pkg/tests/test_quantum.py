import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qcoherence import quantum as qc
from qcoherence.quantum import QuantumState, StateValidationError
from qcoherence.states import bell_state, dephased_bell, ghz_state

from oracles import BELL_J, h2, plus_zero_j

seeds = st.integers(0, 2 ** 32 - 1)
KET0 = QuantumState.from_vector([1, 0], (2,))
KET1 = QuantumState.from_vector([0, 1], (2,))
PLUS = QuantumState.from_vector([1, 1], (2,))


def rand(seed, dims=(2,), rank=None):
    return qc.random_state(dims, np.random.default_rng(seed), rank)


class TestValidation:
    def test_rejects_non_hermitian(self):
        with pytest.raises(StateValidationError):
            QuantumState((2,), np.array([[0.5, 0.1], [0.0, 0.5]]))

    def test_rejects_bad_trace(self):
        with pytest.raises(StateValidationError):
            QuantumState((2,), np.eye(2))

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(StateValidationError):
            QuantumState((2,), np.diag([1.1, -0.1]))

    def test_rejects_shape_mismatch(self):
        with pytest.raises(StateValidationError):
            QuantumState((2, 2), np.eye(2) / 2)

    def test_hermitizes_within_tolerance(self):
        m = np.array([[0.5, 0.25 + 1e-12], [0.25, 0.5]])
        rho = QuantumState((2,), m)
        assert np.array_equal(rho.matrix, rho.matrix.conj().T)

    def test_matrix_is_read_only(self):
        with pytest.raises(ValueError):
            KET0.matrix[0, 0] = 0

    @given(seeds)
    def test_spectrum_reconstructs(self, seed):
        rho = rand(seed, (2, 2), rank=2)
        sd = rho.spectrum()
        assert np.max(np.abs(sd.reconstruct() - rho.matrix)) <= 1e-9
        assert np.all(sd.eigenvalues >= 0) and np.all(sd.eigenvalues <= 1)
        assert sd.eigenvalues.sum() == pytest.approx(1, abs=1e-12)


class TestTensor:
    def test_basis_product(self):
        out = qc.tensor(KET0, KET0)
        expected = np.zeros((4, 4))
        expected[0, 0] = 1
        assert out.dims == (2, 2)
        np.testing.assert_allclose(out.matrix, expected)

    def test_identity(self):
        half = QuantumState((2,), np.eye(2) / 2)
        np.testing.assert_allclose(qc.tensor(half, half).matrix, np.eye(4) / 4)

    def test_plus_plus_all_quarter(self):
        np.testing.assert_allclose(qc.tensor(PLUS, PLUS).matrix, np.full((4, 4), 0.25), atol=1e-15)

    def test_first_factor_most_significant(self):
        out = qc.tensor(KET1, KET0)  # |10>
        assert out.matrix[2, 2] == pytest.approx(1)


class TestPartialTrace:
    def test_bell_reduces_to_identity(self):
        np.testing.assert_allclose(qc.partial_trace(bell_state(-1), [1]).matrix, np.eye(2) / 2, atol=1e-15)

    @pytest.mark.parametrize("phi", [0.0, 0.3, math.pi / 4, 2.0])
    def test_ghz_reduction_diagonal(self, phi):
        red = qc.partial_trace(ghz_state(phi), [1]).matrix
        np.testing.assert_allclose(red, np.diag([math.cos(phi) ** 2, math.sin(phi) ** 2]), atol=1e-14)

    @given(seeds, seeds)
    def test_product_factorization(self, s1, s2):
        a, b = rand(s1), rand(s2, (2, 2))
        prod = qc.tensor(a, b)
        np.testing.assert_allclose(qc.partial_trace(prod, [1]).matrix, a.matrix, atol=1e-12)
        np.testing.assert_allclose(qc.partial_trace(prod, [2, 3]).matrix, b.matrix, atol=1e-12)
        assert np.trace(qc.partial_trace(prod, [2]).matrix).real == pytest.approx(1, abs=1e-12)

    def test_keep_all_is_identity(self, rng):
        rho = qc.random_state((2, 2, 2), rng)
        np.testing.assert_allclose(qc.partial_trace(rho, [1, 2, 3]).matrix, rho.matrix)

    def test_middle_site(self):
        rho = qc.tensor(qc.tensor(KET0, KET1), PLUS)
        np.testing.assert_allclose(qc.partial_trace(rho, [2]).matrix, KET1.matrix, atol=1e-15)
        np.testing.assert_allclose(qc.partial_trace(rho, [1, 3]).matrix, qc.tensor(KET0, PLUS).matrix, atol=1e-15)

    @pytest.mark.parametrize("keep", [[], [0], [4], [2, 1], [1, 1]])
    def test_bad_indices(self, keep):
        with pytest.raises(ValueError):
            qc.partial_trace(ghz_state(0.1), keep)


class TestEntropy:
    def test_pure_is_zero(self, rng):
        assert qc.vn_entropy(qc.random_state((2, 2), rng, rank=1)) == pytest.approx(0, abs=1e-10)

    def test_maximally_mixed_qubit(self):
        assert qc.vn_entropy(QuantumState((2,), np.eye(2) / 2)) == pytest.approx(1, abs=1e-14)

    def test_three_quarter(self):
        value = qc.vn_entropy(QuantumState((2,), np.diag([0.75, 0.25])))
        assert value == pytest.approx(h2([0.75, 0.25]), abs=1e-14)
        assert value == pytest.approx(0.81128, abs=5e-6)

    @given(seeds, seeds)
    def test_additive_on_products(self, s1, s2):
        a, b = rand(s1), rand(s2, (2, 2))
        assert qc.vn_entropy(qc.tensor(a, b)) == pytest.approx(qc.vn_entropy(a) + qc.vn_entropy(b), abs=1e-9)

    @given(seeds)
    def test_bounds(self, seed):
        rho = rand(seed, (2, 2))
        assert -1e-12 <= qc.vn_entropy(rho) <= 2 + 1e-12


class TestQJSD:
    @given(seeds)
    def test_identical_is_zero(self, seed):
        rho = rand(seed, (2, 2))
        assert qc.qjsd(rho, rho) == pytest.approx(0, abs=1e-12)
        assert qc.qjsd_distance(rho, rho) <= 1e-6

    def test_orthogonal_is_one(self):
        assert qc.qjsd(KET0, KET1) == pytest.approx(1, abs=1e-14)
        assert qc.qjsd_distance(KET0, KET1) == pytest.approx(1, abs=1e-14)

    def test_zero_plus(self):
        assert qc.qjsd(KET0, PLUS) == pytest.approx(plus_zero_j(), abs=1e-12)
        assert qc.qjsd(KET0, PLUS) == pytest.approx(0.600876, abs=1e-6)

    def test_bell_to_dephased(self):
        d = qc.qjsd_distance(bell_state(-1), dephased_bell())
        assert d == pytest.approx(math.sqrt(BELL_J), abs=1e-12)
        assert d == pytest.approx(0.55792, abs=5e-6)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            qc.qjsd(KET0, bell_state(1))

    @given(seeds, seeds)
    def test_symmetric_and_bounded(self, s1, s2):
        a, b = rand(s1, (2, 2)), rand(s2, (2, 2))
        assert qc.qjsd(a, b) == qc.qjsd(b, a)
        assert 0 <= qc.qjsd(a, b) <= 1 + 1e-12

    @given(seeds, seeds)
    def test_positive_for_distinct(self, s1, s2):
        a, b = rand(s1), rand(s2)
        if np.max(np.abs(a.matrix - b.matrix)) > 1e-3:
            assert qc.qjsd(a, b) > 0

    @given(seeds, seeds, seeds)
    def test_unitary_invariance(self, s1, s2, s3):
        a, b = rand(s1, (2, 2)), rand(s2, (2, 2))
        u = qc.random_unitary(4, np.random.default_rng(s3))
        assert qc.qjsd(qc.apply_unitary(a, u), qc.apply_unitary(b, u)) == pytest.approx(qc.qjsd(a, b), abs=1e-9)

    @given(seeds)
    def test_triangle_inequality(self, seed):
        rng = np.random.default_rng(seed)
        dims = (2,) if seed % 2 else (2, 2)
        a, b, c = (qc.random_state(dims, rng, rank=int(rng.integers(1, 2 ** len(dims) + 1))) for _ in range(3))
        assert qc.qjsd_distance(a, c) <= qc.qjsd_distance(a, b) + qc.qjsd_distance(b, c) + 1e-9


class TestPermute:
    def test_swap_sites(self):
        rho = qc.tensor(KET0, PLUS)
        swapped = qc.permute_sites(rho, [2, 1])
        np.testing.assert_allclose(swapped.matrix, qc.tensor(PLUS, KET0).matrix, atol=1e-15)

    def test_not_a_permutation(self):
        with pytest.raises(ValueError):
            qc.permute_sites(bell_state(1), [1, 1])


class TestStateFile:
    def test_round_trip_exact(self, rng, tmp_path):
        rho = qc.random_state((2, 2), rng)
        path = tmp_path / "rho.json"
        qc.save_state(rho, path)
        back = qc.load_state(path)
        assert back.dims == rho.dims
        assert np.array_equal(back.matrix, rho.matrix)

    def test_seventeen_digits(self):
        text = qc.dumps_state(QuantumState((2,), np.diag([1 / 3, 2 / 3])))
        assert "0.33333333333333331" in text

    def test_reader_validates(self):
        bad = '{"dims": [2], "matrix": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]}'
        with pytest.raises(StateValidationError):
            qc.loads_state(bad)

    @pytest.mark.parametrize("text", ["not json", '{"dims": [2]}', '{"dims": [2], "matrix": [[1, 2]]}'])
    def test_malformed(self, text):
        with pytest.raises(StateValidationError):
            qc.loads_state(text)
