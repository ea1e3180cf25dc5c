import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import brute_partial_trace, random_density, sqrtm_fidelity
from qbc.qcore import (
    DensityOperator,
    RejectedInput,
    StateVector,
    UnitaryOperator,
    apply_local,
    derive_rng,
    fidelity,
    haar_random_state,
    haar_random_unitary,
    measure_projective,
    overlap,
    partial_trace,
    purify,
    schmidt_decompose,
    tensor_product,
    trace_distance,
)

S = 1 / np.sqrt(2)
KET0 = StateVector([1, 0])
KET1 = StateVector([0, 1])
PLUS = StateVector([S, S])
X = UnitaryOperator([[0, 1], [1, 0]])
SINGLET = StateVector([0, S, -S, 0], (2, 2))
BELL = StateVector([S, 0, 0, S], (2, 2))


class TestTypes:
    def test_state_rejects_bad_norm(self):
        with pytest.raises(RejectedInput):
            StateVector([1, 1])

    def test_state_rejects_bad_dims(self):
        with pytest.raises(RejectedInput):
            StateVector([1, 0, 0], (2, 2))

    def test_density_rejects_non_psd(self):
        with pytest.raises(RejectedInput):
            DensityOperator(np.diag([1.5, -0.5]))

    def test_density_rejects_bad_trace(self):
        with pytest.raises(RejectedInput):
            DensityOperator(np.eye(2))

    def test_unitary_rejects_non_unitary(self):
        with pytest.raises(RejectedInput):
            UnitaryOperator([[1, 1], [0, 1]])

    def test_amplitudes_are_read_only(self):
        with pytest.raises(ValueError):
            KET0.amplitudes[0] = 2


class TestTensorProduct:
    def test_basis_states(self):
        out = tensor_product(KET0, KET1)
        assert out.dims == (2, 2)
        np.testing.assert_allclose(out.amplitudes, [0, 1, 0, 0])

    def test_identities(self):
        out = tensor_product(UnitaryOperator.identity(2), UnitaryOperator.identity(2))
        np.testing.assert_allclose(out.matrix, np.eye(4))

    def test_plus_zero(self):
        np.testing.assert_allclose(tensor_product(PLUS, KET0).amplitudes, [S, 0, S, 0], atol=1e-15)

    def test_mixed_kinds_rejected(self):
        with pytest.raises(RejectedInput):
            tensor_product(KET0, X)


class TestPartialTrace:
    def test_product_state(self):
        rho = StateVector([1, 0, 0, 0], (2, 2)).density()
        np.testing.assert_allclose(partial_trace(rho, (2, 2), "second").matrix, np.diag([1, 0]))

    def test_singlet_is_maximally_mixed(self):
        red = partial_trace(SINGLET.density(), (2, 2), "second")
        np.testing.assert_allclose(red.matrix, np.eye(2) / 2, atol=1e-15)

    def test_bell_keep_first(self):
        red = partial_trace(BELL.density(), (2, 2), "first")
        np.testing.assert_allclose(red.matrix, np.eye(2) / 2, atol=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(RejectedInput):
            partial_trace(BELL.density(), (2, 3))

    @pytest.mark.parametrize("d1,d2", [(2, 2), (2, 3), (3, 2), (4, 3)])
    @pytest.mark.parametrize("keep", ["first", "second"])
    def test_matches_elementwise_oracle(self, rng, d1, d2, keep):
        for _ in range(10):
            rho = random_density(rng, d1 * d2, rank=3)
            red = partial_trace(rho, (d1, d2), keep)
            np.testing.assert_allclose(red.matrix, brute_partial_trace(rho.matrix, d1, d2, keep), atol=1e-13)
            assert abs(np.trace(red.matrix) - 1) <= 1e-10


class TestFidelity:
    def test_identical(self, rng):
        rho = random_density(rng, 3)
        assert fidelity(rho, rho) == pytest.approx(1, abs=1e-10)

    def test_orthogonal(self):
        assert fidelity(KET0.density(), KET1.density()) == pytest.approx(0, abs=1e-12)

    def test_pure_vs_mixed(self):
        assert fidelity(KET0.density(), DensityOperator(np.eye(2) / 2)) == pytest.approx(S, abs=1e-12)

    def test_pure_pair_is_overlap(self, rng):
        for _ in range(20):
            a, b = haar_random_state(3, rng), haar_random_state(3, rng)
            assert fidelity(a.density(), b.density()) == pytest.approx(overlap(a, b), abs=1e-10)

    @pytest.mark.parametrize("dim", [2, 3, 4])
    def test_matches_sqrtm_oracle(self, rng, dim):
        for _ in range(20):
            rho, sigma = random_density(rng, dim), random_density(rng, dim)
            assert fidelity(rho, sigma) == pytest.approx(sqrtm_fidelity(rho.matrix, sigma.matrix), abs=1e-9)

    def test_symmetric(self, rng):
        for _ in range(50):
            rho, sigma = random_density(rng, 3, rank=2), random_density(rng, 3)
            assert abs(fidelity(rho, sigma) - fidelity(sigma, rho)) <= 1e-10

    def test_one_only_for_equal_states(self, rng):
        for _ in range(50):
            rho, sigma = random_density(rng, 3), random_density(rng, 3)
            f = fidelity(rho, sigma)
            assert 0 <= f <= 1
            assert f < 1 - 1e-6
            assert np.max(np.abs(rho.matrix - sigma.matrix)) > 1e-6

    def test_dimension_mismatch(self):
        with pytest.raises(RejectedInput):
            fidelity(KET0.density(), BELL.density())


class TestTraceDistance:
    def test_identical(self):
        assert trace_distance(KET0.density(), KET0.density()) == 0

    def test_orthogonal(self):
        assert trace_distance(KET0.density(), KET1.density()) == pytest.approx(1)

    def test_pure_vs_mixed(self):
        assert trace_distance(KET0.density(), DensityOperator(np.eye(2) / 2)) == pytest.approx(0.5)

    def test_matches_nuclear_norm(self, rng):
        for _ in range(20):
            rho, sigma = random_density(rng, 4), random_density(rng, 4)
            expected = 0.5 * np.linalg.norm(rho.matrix - sigma.matrix, "nuc")
            assert trace_distance(rho, sigma) == pytest.approx(expected, abs=1e-12)

    def test_fuchs_van_de_graaf(self, rng):
        for k in range(100):
            rank = 1 + k % 3
            rho, sigma = random_density(rng, 3, rank), random_density(rng, 3)
            f, d = fidelity(rho, sigma), trace_distance(rho, sigma)
            assert 1 - f <= d + 1e-9
            assert d <= np.sqrt(1 - f * f) + 1e-9


class TestSchmidt:
    def test_product(self):
        sd = schmidt_decompose(StateVector([1, 0, 0, 0], (2, 2)))
        np.testing.assert_allclose(sd.coefficients, [1])

    def test_bell(self):
        sd = schmidt_decompose(BELL)
        np.testing.assert_allclose(sd.coefficients, [S, S])

    def test_rank_one_right_vector(self):
        sd = schmidt_decompose(StateVector([S, S, 0, 0], (2, 2)))
        np.testing.assert_allclose(sd.coefficients, [1])
        assert overlap(StateVector(sd.right_basis[0]), PLUS) == pytest.approx(1, abs=1e-12)
        assert overlap(StateVector(sd.left_basis[0]), KET0) == pytest.approx(1, abs=1e-12)

    @pytest.mark.parametrize("dims", [(2, 2), (2, 3), (4, 3), (3, 5)])
    def test_reconstruction_and_orthonormality(self, rng, dims):
        for _ in range(25):
            psi = haar_random_state(dims[0] * dims[1], rng, dims)
            sd = schmidt_decompose(psi)
            assert np.all(np.diff(sd.coefficients) <= 0)
            assert abs(np.sum(sd.coefficients ** 2) - 1) <= 1e-10
            np.testing.assert_allclose(sd.reconstruct(), psi.amplitudes, atol=1e-10)
            for basis in (sd.left_basis, sd.right_basis):
                np.testing.assert_allclose(basis.conj() @ basis.T, np.eye(sd.rank), atol=1e-10)


class TestPurify:
    def test_pure_input(self):
        out = purify(KET0.density())
        assert overlap(out, StateVector([1, 0, 0, 0])) == pytest.approx(1, abs=1e-12)

    def test_maximally_mixed(self):
        sd = schmidt_decompose(purify(DensityOperator(np.eye(2) / 2)))
        np.testing.assert_allclose(sd.coefficients, [S, S], atol=1e-12)

    def test_diagonal(self):
        out = purify(DensityOperator(np.diag([0.9, 0.1])))
        np.testing.assert_allclose(out.amplitudes, [np.sqrt(0.9), 0, 0, np.sqrt(0.1)], atol=1e-12)

    @pytest.mark.parametrize("dim", [2, 3, 5])
    def test_round_trip(self, rng, dim):
        for k in range(34):
            rho = random_density(rng, dim, rank=1 + k % dim)
            back = partial_trace(purify(rho).density(), (dim, dim), "first")
            np.testing.assert_allclose(back.matrix, rho.matrix, atol=1e-10)


class TestHaar:
    def test_unitarity(self):
        for seed in range(20):
            u = haar_random_unitary(4, derive_rng(seed)).matrix
            assert np.max(np.abs(u.conj().T @ u - np.eye(4))) <= 1e-10

    def test_deterministic(self):
        a = haar_random_unitary(4, derive_rng(5)).matrix
        b = haar_random_unitary(4, derive_rng(5)).matrix
        assert np.array_equal(a, b)

    def test_first_moment(self):
        rng = derive_rng(11)
        vals = [abs(haar_random_unitary(2, rng).matrix[0, 0]) ** 2 for _ in range(10_000)]
        assert np.mean(vals) == pytest.approx(0.5, abs=0.02)

    def test_state_moments_dim3(self):
        # E|<0|psi>|^2 = 1/3 and E|<0|psi>|^4 = 2/(d(d+1)) = 1/6
        rng = derive_rng(12)
        p = np.array([abs(haar_random_state(3, rng).amplitudes[0]) ** 2 for _ in range(10_000)])
        assert p.mean() == pytest.approx(1 / 3, abs=0.01)
        assert (p ** 2).mean() == pytest.approx(1 / 6, abs=0.01)

    def test_derived_streams_depend_on_keys(self):
        a = derive_rng(0, 1).random()
        b = derive_rng(0, 2).random()
        assert a != b
        assert derive_rng(0, 1).random() == a


class TestApplyLocal:
    def test_identity(self):
        assert np.array_equal(apply_local(UnitaryOperator.identity(2), BELL).amplitudes, BELL.amplitudes)

    def test_flip_first_qubit(self):
        out = apply_local(X, StateVector([1, 0, 0, 0], (2, 2)), 0)
        np.testing.assert_allclose(out.amplitudes, [0, 0, 1, 0])

    def test_flip_bell(self):
        out = apply_local(X, BELL, 0)
        np.testing.assert_allclose(out.amplitudes, [0, S, S, 0])

    def test_matches_kron(self, rng):
        psi = haar_random_state(24, rng, (2, 3, 4))
        u = haar_random_unitary(3, rng)
        expected = np.kron(np.kron(np.eye(2), u.matrix), np.eye(4)) @ psi.amplitudes
        np.testing.assert_allclose(apply_local(u, psi, 1).amplitudes, expected, atol=1e-13)

    def test_dimension_mismatch(self):
        with pytest.raises(RejectedInput):
            apply_local(haar_random_unitary(3, derive_rng(0)), BELL, 0)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.sampled_from([(2, 2), (3, 2), (2, 4)]), st.integers(0, 1))
    def test_norm_preserved(self, seed, dims, target):
        rng = derive_rng(seed)
        psi = haar_random_state(dims[0] * dims[1], rng, dims)
        u = haar_random_unitary(dims[target], rng)
        out = apply_local(u, psi, target)
        assert abs(np.linalg.norm(out.amplitudes) - 1) <= 1e-12


class TestMeasure:
    def test_eigenstate(self, rng):
        for _ in range(20):
            k, post = measure_projective(KET0, np.eye(2), 0, rng)
            assert k == 0 and overlap(post, KET0) == pytest.approx(1)

    def test_born_frequency(self):
        rng = derive_rng(3)
        hits = sum(measure_projective(PLUS, np.eye(2), 0, rng)[0] == 0 for _ in range(10_000))
        assert hits / 10_000 == pytest.approx(0.5, abs=0.02)

    def test_singlet_anticorrelation(self, rng):
        for _ in range(50):
            basis = haar_random_unitary(2, rng).matrix.T
            k, post = measure_projective(SINGLET, basis, 1, rng)
            alice = post.coefficient_matrix() @ basis[k].conj()
            assert abs(np.vdot(basis[1 - k], alice)) == pytest.approx(1, abs=1e-12)

    def test_collapse_matches_projector(self, rng):
        psi = haar_random_state(12, rng, (3, 4))
        basis = haar_random_unitary(4, rng).matrix.T
        k, post = measure_projective(psi, basis, 1, rng)
        proj = np.kron(np.eye(3), np.outer(basis[k], basis[k].conj()))
        expected = proj @ psi.amplitudes
        assert overlap(post, StateVector.normalized(expected, (3, 4))) == pytest.approx(1, abs=1e-12)

    def test_deterministic(self):
        a = measure_projective(PLUS, np.eye(2), 0, derive_rng(9))
        b = measure_projective(PLUS, np.eye(2), 0, derive_rng(9))
        assert a[0] == b[0] and np.array_equal(a[1].amplitudes, b[1].amplitudes)

    def test_rejects_non_orthonormal(self, rng):
        with pytest.raises(RejectedInput):
            measure_projective(PLUS, [[1, 0], [1, 0]], 0, rng)
