import numpy as np
import pytest
from helpers import (
    I2,
    SX,
    SY,
    SZ,
    binary_entropy,
    branch_state,
    hidden_state,
    probe_reduction,
    random_density_matrix,
    random_hermitian,
)
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ndprobe.linalg import DimensionError, NonHermitianError, tensor_product, unitary_exp
from ndprobe.states import (
    InvalidDensityError,
    bloch_vector,
    measurement_sample,
    pauli_decompose,
    pauli_recompose,
    pauli_vector,
    projector,
    validate_density,
    von_neumann_entropy,
)


class TestValidateDensity:
    def test_maximally_mixed_accepted(self):
        rho = validate_density(I2 / 2.0)
        assert rho.dims == (2,)
        assert abs(np.trace(rho.matrix) - 1.0) < 1e-14

    def test_negative_eigenvalue_rejected(self):
        with pytest.raises(InvalidDensityError):
            validate_density(np.diag([1.001, -0.001]).astype(complex))

    def test_branch_state_is_pure(self):
        rho = validate_density(branch_state(0.4, +1.0))
        w = np.linalg.eigvalsh(rho.matrix)
        assert abs(w[-1] - 1.0) < 1e-12 and abs(w[0]) < 1e-12

    def test_non_hermitian_rejected(self):
        with pytest.raises(InvalidDensityError):
            validate_density(np.array([[0.5, 0.3], [0.0, 0.5]]))

    def test_wrong_trace_rejected(self):
        with pytest.raises(InvalidDensityError):
            validate_density(I2)

    def test_inconsistent_dims_rejected(self):
        with pytest.raises(InvalidDensityError):
            validate_density(np.eye(4) / 4.0, dims=(3, 2))

    def test_tiny_negative_eigenvalue_clamped(self):
        eps = 5e-11
        rho = validate_density(np.diag([1.0 + eps, -eps]).astype(complex))
        w = np.linalg.eigvalsh(rho.matrix)
        assert w[0] >= 0.0
        assert abs(np.trace(rho.matrix).real - 1.0) < 1e-14

    def test_matrix_is_read_only(self):
        rho = validate_density(I2 / 2.0)
        with pytest.raises(ValueError):
            rho.matrix[0, 0] = 0.0


class TestPauliDecomposition:
    def test_xx_coupling(self):
        d = pauli_decompose(0.9 * tensor_product(SX, SX))
        assert abs(d.T[0, 0] - 0.9) < 1e-14
        assert abs(d.c0) < 1e-14
        assert np.linalg.norm(d.r) < 1e-14 and np.linalg.norm(d.s) < 1e-14
        mask = np.ones((3, 3), dtype=bool)
        mask[0, 0] = False
        assert np.max(np.abs(d.T[mask])) < 1e-14

    def test_identity(self):
        d = pauli_decompose(np.eye(4, dtype=complex))
        assert abs(d.c0 - 1.0) < 1e-14
        assert np.linalg.norm(d.r) + np.linalg.norm(d.s) + np.linalg.norm(d.T) < 1e-13

    def test_structured_coupling_lands_in_x_row(self):
        r_x, t_row, s = 0.3, np.array([0.5, -0.2, 0.8]), np.array([0.1, 0.4, -0.6])
        a = r_x * I2 + t_row[0] * SX + t_row[1] * SY + t_row[2] * SZ
        b = s[0] * SX + s[1] * SY + s[2] * SZ
        h = tensor_product(SX, a) + tensor_product(I2, b)
        d = pauli_decompose(h)
        np.testing.assert_allclose(d.r, [r_x, 0.0, 0.0], atol=1e-14)
        np.testing.assert_allclose(d.s, s, atol=1e-14)
        np.testing.assert_allclose(d.T[0], t_row, atol=1e-14)
        assert np.max(np.abs(d.T[1:])) < 1e-14

    def test_recompose_zero(self):
        d = pauli_decompose(np.zeros((4, 4), dtype=complex))
        np.testing.assert_allclose(pauli_recompose(d), np.zeros((4, 4)))

    def test_recompose_xx_at_07(self):
        d = pauli_decompose(0.7 * tensor_product(SX, SX))
        np.testing.assert_allclose(pauli_recompose(d), 0.7 * np.kron(SX, SX), atol=1e-13)

    def test_roundtrip_on_random_hermitian(self):
        rng = np.random.default_rng(77)
        for _ in range(1000):
            m = random_hermitian(rng, 4)
            assert np.linalg.norm(pauli_recompose(pauli_decompose(m)) - m) < 1e-12

    @settings(max_examples=60, deadline=None, derandomize=True)
    @given(coeffs=arrays(np.float64, (16,), elements=st.floats(-3, 3)))
    def test_roundtrip_from_coefficients(self, coeffs):
        paulis = [I2, SX, SY, SZ]
        m = sum(
            coeffs[4 * j + k] * np.kron(paulis[j], paulis[k])
            for j in range(4)
            for k in range(4)
        )
        d = pauli_decompose(m)
        assert abs(d.c0 - coeffs[0]) < 1e-10
        assert np.linalg.norm(pauli_recompose(d) - m) < 1e-10

    def test_rejects_non_hermitian_and_bad_shape(self):
        with pytest.raises(NonHermitianError):
            pauli_decompose(1j * np.kron(SX, SX) + np.eye(4))
        with pytest.raises(DimensionError):
            pauli_decompose(np.eye(2, dtype=complex))


class TestBlochVector:
    def test_computational_basis(self):
        np.testing.assert_allclose(bloch_vector(projector(np.array([1.0, 0.0]))), [0, 0, 1])

    def test_hidden_state_points_along_x(self):
        for x in (0.0, 0.25, 0.8):
            np.testing.assert_allclose(bloch_vector(hidden_state(x)), [x, 0, 0], atol=1e-14)

    def test_maximally_mixed_is_origin(self):
        np.testing.assert_allclose(bloch_vector(I2 / 2.0), [0, 0, 0])

    def test_branch_states_trace_a_circle(self):
        for gt in np.linspace(0.0, np.pi, 13):
            expected = np.array([0.0, -np.sin(2 * gt), np.cos(2 * gt)])
            np.testing.assert_allclose(
                bloch_vector(branch_state(gt, +1.0)), expected, atol=1e-10
            )
            np.testing.assert_allclose(
                bloch_vector(branch_state(gt, -1.0)), -expected * [1, 1, -1], atol=1e-10
            )

    def test_pauli_vector_halves_bloch(self):
        rng = np.random.default_rng(12)
        rho = random_density_matrix(rng, 2)
        np.testing.assert_allclose(pauli_vector(rho), bloch_vector(rho) / 2.0, atol=1e-14)

    def test_wrong_dimension(self):
        with pytest.raises(DimensionError):
            bloch_vector(np.eye(3) / 3.0)


class TestVonNeumannEntropy:
    def test_pure_state_zero(self):
        assert von_neumann_entropy(projector(np.array([1.0, 0.0]))) == 0.0

    def test_hidden_state_binary_entropy(self):
        expected = binary_entropy(0.75)
        assert abs(expected - 0.8112781244591328) < 1e-15
        assert abs(von_neumann_entropy(hidden_state(0.5)) - expected) < 1e-12

    def test_maximally_mixed_qubit_is_one_bit(self):
        assert abs(von_neumann_entropy(I2 / 2.0) - 1.0) < 1e-12

    def test_additivity_on_products(self):
        rng = np.random.default_rng(31)
        for _ in range(10):
            a = random_density_matrix(rng, 2)
            b = random_density_matrix(rng, 3)
            total = von_neumann_entropy(tensor_product(a, b))
            assert abs(total - von_neumann_entropy(a) - von_neumann_entropy(b)) < 1e-9

    def test_unitary_invariance(self):
        rng = np.random.default_rng(32)
        for _ in range(10):
            rho = random_density_matrix(rng, 4)
            u = unitary_exp(random_hermitian(rng, 4), 1.0)
            rotated = u @ rho @ u.conj().T
            assert abs(von_neumann_entropy(rotated) - von_neumann_entropy(rho)) < 1e-9

    def test_negative_spectrum_rejected(self):
        with pytest.raises(InvalidDensityError):
            von_neumann_entropy(np.diag([1.001, -0.001]).astype(complex))


class TestMeasurementSample:
    def test_eigenstate_mean_is_exact(self):
        summary = measurement_sample(projector(np.array([1.0, 0.0])), SZ, 500, seed=3)
        assert summary.mean == 1.0
        np.testing.assert_array_equal(summary.counts, [0, 500])
        np.testing.assert_allclose(summary.values, [-1.0, 1.0])

    def test_probe_reduction_sigma_y_mean(self):
        rho = probe_reduction(0.3, np.pi / 8)
        expected = -0.3 * np.sin(np.pi / 4)
        assert abs(expected + 0.21213203435596426) < 1e-15
        summary = measurement_sample(rho, SY, 100_000, seed=42)
        assert abs(summary.mean - expected) < 3.0 / np.sqrt(100_000)

    def test_maximally_mixed_sigma_x(self):
        summary = measurement_sample(I2 / 2.0, SX, 10_000, seed=9)
        assert abs(summary.mean) < 3e-2

    def test_seed_reproducibility(self):
        rho = probe_reduction(0.5, 0.4)
        a = measurement_sample(rho, SY, 2000, seed=123)
        b = measurement_sample(rho, SY, 2000, seed=123)
        np.testing.assert_array_equal(a.counts, b.counts)
        c = measurement_sample(rho, SY, 2000, seed=124)
        assert not np.array_equal(a.counts, c.counts)

    def test_mean_converges_within_five_sigma(self):
        rho = probe_reduction(0.4, 0.6)
        exact = float(np.trace(SY @ rho).real)
        hits = 0
        shots = 4000
        for seed in range(100):
            summary = measurement_sample(rho, SY, shots, seed=seed)
            sigma = np.sqrt(max(1.0 - exact**2, 1e-12) / shots)
            if abs(summary.mean - exact) < 5.0 * sigma:
                hits += 1
        assert hits >= 99

    def test_degenerate_observable_groups_outcomes(self):
        observable = tensor_product(SZ, I2)
        rho = np.eye(4, dtype=complex) / 4.0
        summary = measurement_sample(rho, observable, 1000, seed=5)
        np.testing.assert_allclose(summary.values, [-1.0, 1.0], atol=1e-12)
        assert summary.counts.sum() == 1000

    def test_input_validation(self):
        with pytest.raises(ValueError):
            measurement_sample(I2 / 2.0, SZ, 0, seed=1)
        with pytest.raises(DimensionError):
            measurement_sample(I2 / 2.0, np.eye(4), 10, seed=1)
