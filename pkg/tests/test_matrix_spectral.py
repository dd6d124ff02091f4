import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectral_rv.matrix_spectral import (
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    DiscreteDistribution,
    HermitianOperator,
    IncompatibleObservablesError,
    NonHermitianError,
    StateVector,
    cdf_at,
    commutator,
    eigendecompose,
    expectation,
    joint_distribution,
    measurement_distribution,
    spectral_family_at,
)
from spectral_rv.verify import marginal_defect, random_commuting_pair, random_hermitian, random_state

EYE2 = np.eye(2)


def _rand_case(seed, dim):
    rng = np.random.default_rng(seed)
    return random_hermitian(rng, dim), random_state(rng, dim)


class TestOperators:
    def test_non_hermitian_rejected_with_defect(self):
        with pytest.raises(NonHermitianError) as exc:
            HermitianOperator([[0, 1], [0, 0]])
        assert exc.value.defect == 1.0

    def test_tiny_defect_accepted(self):
        HermitianOperator([[0, 1 + 1e-13], [1, 0]])

    @pytest.mark.parametrize("entries", [np.zeros((0, 0)), np.zeros((2, 3)), [[np.nan]]])
    def test_bad_shapes(self, entries):
        with pytest.raises(ValueError):
            HermitianOperator(entries)

    def test_json_round_trip(self):
        op = HermitianOperator(PAULI_Y)
        again = HermitianOperator.from_json(op.to_json())
        assert np.array_equal(again.entries, op.entries)

    def test_json_dim_mismatch(self):
        with pytest.raises(ValueError):
            HermitianOperator.from_json({"dim": 3, "re": [[1, 0], [0, 1]]})

    def test_state_normalization(self):
        with pytest.raises(ValueError):
            StateVector([1.0, 1.0])
        v = StateVector.normalized([1.0, 1.0j])
        assert abs(np.vdot(v.amplitudes, v.amplitudes) - 1) <= 1e-15
        assert StateVector.from_json({"re": [0, 1]}).dim == 2


class TestEigendecompose:
    def test_pauli_y(self):
        d = eigendecompose(PAULI_Y)
        assert d.eigenvalues.tolist() == [-1.0, 1.0]
        assert np.max(np.abs(d.projectors[0] - (EYE2 - PAULI_Y) / 2)) <= 1e-12
        assert np.max(np.abs(d.projectors[1] - (EYE2 + PAULI_Y) / 2)) <= 1e-12
        assert np.max(np.abs(d.reconstruct() - PAULI_Y)) <= 1e-12

    def test_identity_merges(self):
        d = eigendecompose(np.eye(2))
        assert d.eigenvalues.tolist() == [1.0]
        assert np.array_equal(d.projectors[0], np.eye(2))
        assert d.multiplicities() == [2]

    def test_random_4x4_reconstruction(self):
        A, _ = _rand_case(4, 4)
        assert np.max(np.abs(eigendecompose(A).reconstruct() - A)) <= 1e-10

    def test_degenerate_spectrum(self):
        rng = np.random.default_rng(0)
        A, _ = random_commuting_pair(rng, 5, "degenerate")
        d = eigendecompose(A)
        assert sum(d.multiplicities()) == 5
        assert len(d.eigenvalues) < 5 or np.all(np.diff(d.eigenvalues) > 0)

    def test_degeneracy_tol_argument(self):
        d = eigendecompose(np.diag([1.0, 1.0 + 1e-6, 2.0]), degeneracy_tol=1e-5)
        assert d.multiplicities() == [2, 1]

    def test_to_json(self):
        doc = eigendecompose(PAULI_Z).to_json()
        assert doc["eigenvalues"] == [-1.0, 1.0]
        assert doc["projectors"][0]["re"] == [[0.0, 0.0], [0.0, 1.0]]

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), dim=st.integers(1, 8))
    def test_projector_algebra(self, seed, dim):
        A, _ = _rand_case(seed, dim)
        d = eigendecompose(A)
        defects = d.check()
        assert max(defects.values()) <= 1e-10
        assert defects["hermiticity"] <= 1e-12
        assert np.max(np.abs(d.reconstruct() - A)) <= 1e-10
        assert np.all(np.diff(d.eigenvalues) > 0)


class TestSpectralFamily:
    def test_pauli_y_at_zero(self):
        d = eigendecompose(PAULI_Y)
        assert np.max(np.abs(spectral_family_at(d, 0.0) - (EYE2 - PAULI_Y) / 2)) <= 1e-12

    def test_limits(self):
        A, _ = _rand_case(1, 4)
        d = eigendecompose(A)
        assert np.array_equal(spectral_family_at(d, d.eigenvalues[0] - 1), np.zeros((4, 4)))
        assert np.max(np.abs(spectral_family_at(d, d.eigenvalues[-1] + 1) - np.eye(4))) <= 1e-10

    def test_right_continuous_at_eigenvalue(self):
        d = eigendecompose(PAULI_Y)
        # H(0) = 1: the eigenvalue itself is included
        assert np.max(np.abs(spectral_family_at(d, -1.0) - d.projectors[0])) == 0.0

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), dim=st.integers(1, 6),
           l1=st.floats(-4, 4), l2=st.floats(-4, 4))
    def test_nested(self, seed, dim, l1, l2):
        lo, hi = sorted((l1, l2))
        d = eigendecompose(_rand_case(seed, dim)[0])
        e1 = spectral_family_at(d, lo)
        e2 = spectral_family_at(d, hi)
        assert np.max(np.abs(e1 @ e2 - e1), initial=0.0) <= 1e-10


class TestMeasurement:
    def test_pauli_y_up(self):
        m = measurement_distribution(eigendecompose(PAULI_Y), [1.0, 0.0])
        assert m.points.tolist() == [-1.0, 1.0]
        assert np.allclose(m.masses, [0.5, 0.5], atol=1e-15)

    def test_eigenvector_state(self):
        d = eigendecompose(PAULI_Y)
        v = d.eigenvectors[1][:, 0]
        m = measurement_distribution(d, v)
        assert abs(m.masses[1] - 1) <= 1e-15 and m.masses[0] <= 1e-15

    def test_random_3x3_mean(self):
        A, v = _rand_case(33, 3)
        m = measurement_distribution(eigendecompose(A), v)
        direct = np.vdot(v.amplitudes, A @ v.amplitudes).real
        assert abs(m.mean() - direct) <= 1e-10
        assert abs(expectation(A, v) - direct) <= 1e-10

    def test_dim_mismatch(self):
        with pytest.raises(ValueError):
            measurement_distribution(eigendecompose(PAULI_Y), [1.0, 0.0, 0.0])

    def test_expectation_dual_route_100_pairs(self):
        rng = np.random.default_rng(100)
        worst = 0.0
        for _ in range(100):
            dim = int(rng.integers(1, 9))
            A = random_hermitian(rng, dim)
            v = random_state(rng, dim)
            m = measurement_distribution(eigendecompose(A), v)
            assert np.all(m.masses >= 0) and abs(m.masses.sum() - 1) <= 1e-12
            worst = max(worst, abs(m.mean() - expectation(A, v)))
        assert worst <= 1e-10

    def test_cdf(self):
        d = eigendecompose(PAULI_Y)
        assert abs(cdf_at(d, [1.0, 0.0], 0.0) - 0.5) <= 1e-12
        assert cdf_at(d, [1.0, 0.0], -2.0) == 0.0
        assert abs(cdf_at(d, [1.0, 0.0], 2.0) - 1.0) <= 1e-12

    def test_discrete_distribution_validation(self):
        with pytest.raises(ValueError):
            DiscreteDistribution([1.0, 0.0], [0.5, 0.5])
        with pytest.raises(ValueError):
            DiscreteDistribution([0.0, 1.0], [0.6, 0.6])
        with pytest.raises(ValueError):
            DiscreteDistribution([0.0, 1.0], [1.1, -0.1])
        d = DiscreteDistribution([0.0, 2.0], [0.5, 0.5])
        assert (d.mean(), d.variance(), d.cdf(0.0), d.cdf(1.9)) == (1.0, 1.0, 0.5, 0.5)


class TestCommutation:
    def test_pauli_commutator(self):
        assert np.max(np.abs(commutator(PAULI_X, PAULI_Y) - 2j * PAULI_Z)) == 0.0

    def test_self_and_diagonal(self):
        A, _ = _rand_case(2, 3)
        assert np.max(np.abs(commutator(A, A))) <= 1e-14
        assert np.array_equal(commutator(np.diag([1.0, 2]), np.diag([3.0, 4])), np.zeros((2, 2)))

    def test_dim_mismatch(self):
        with pytest.raises(ValueError):
            commutator(np.eye(2), np.eye(3))

    def test_joint_diagonal(self):
        j = joint_distribution(np.diag([1.0, 2.0]), np.diag([3.0, 4.0]), np.array([1, 1]) / np.sqrt(2))
        assert j.pairs.tolist() == [[1.0, 3.0], [2.0, 4.0]]
        assert np.allclose(j.masses, [0.5, 0.5], atol=1e-15)

    def test_joint_with_identity(self):
        A, v = _rand_case(8, 4)
        j = joint_distribution(A, np.eye(4), v)
        m = measurement_distribution(eigendecompose(A), v)
        assert np.all(j.pairs[:, 1] == 1.0)
        assert np.max(np.abs(j.pairs[:, 0] - m.points)) <= 1e-12
        assert np.max(np.abs(j.masses - m.masses)) <= 1e-12

    def test_pauli_xy_rejected(self):
        with pytest.raises(IncompatibleObservablesError) as exc:
            joint_distribution(PAULI_X, PAULI_Y, [1.0, 0.0])
        assert exc.value.commutator_norm == 2.0

    @pytest.mark.parametrize("kind", ["polynomial", "degenerate"])
    def test_commuting_pairs_marginals(self, kind):
        rng = np.random.default_rng(9)
        for _ in range(100):
            dim = int(rng.integers(2, 7))
            A, B = random_commuting_pair(rng, dim, kind)
            v = random_state(rng, dim)
            j = joint_distribution(A, B, v)
            assert abs(j.masses.sum() - 1) <= 1e-12
            assert marginal_defect(j, A, B, v) <= 1e-10

    def test_noncommuting_pairs_rejected(self):
        rng = np.random.default_rng(10)
        for _ in range(100):
            dim = int(rng.integers(2, 7))
            with pytest.raises(IncompatibleObservablesError):
                joint_distribution(random_hermitian(rng, dim), random_hermitian(rng, dim),
                                   random_state(rng, dim))
