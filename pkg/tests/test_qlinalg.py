"""Tests for dense qubit linear algebra"""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import bell, random_density, random_pure
from errors import DomainError
from noise_channels import ChannelKind, NoiseConfig, apply_local_noise
from projective_measurement import MeasurementSetting, PauliAxis, measurement_branches
from qlinalg import (
    IDENTITY,
    PAULI_X,
    PAULI_Z,
    DensityMatrix,
    PureState,
    embed_local,
    hermitian_eigenvalues,
    ket,
    partial_trace,
    partial_transpose,
    tensor_product,
)
from state_ensembles import gghz


class TestTensorProduct:
    def test_identity(self):
        assert_allclose(tensor_product(IDENTITY, IDENTITY), np.eye(4))

    def test_sigma_x_blocks(self):
        expected = np.block([[np.zeros((2, 2)), np.eye(2)], [np.eye(2), np.zeros((2, 2))]])
        assert_allclose(tensor_product(PAULI_X, IDENTITY), expected)

    def test_projector_product(self):
        p0 = np.diag([1, 0]).astype(complex)
        p1 = np.diag([0, 1]).astype(complex)
        assert_allclose(tensor_product(p0, p1), np.diag([0, 1, 0, 0]))

    def test_spectrum_is_pairwise_products(self):
        a, b = np.diag([1.0, -2.0]), np.diag([3.0, 0.5])
        spectrum = np.sort(np.diag(tensor_product(a, b)))
        assert_allclose(spectrum, np.sort([x * y for x in (1, -2) for y in (3, 0.5)]))


class TestEmbedLocal:
    def test_single_qubit(self):
        assert_allclose(embed_local(PAULI_Z, 0, 1), PAULI_Z)

    def test_second_of_two(self):
        assert_allclose(embed_local(PAULI_X, 1, 2), np.kron(IDENTITY, PAULI_X))

    def test_qubit_zero_is_most_significant(self):
        assert_allclose(embed_local(PAULI_Z, 2, 3) @ ket("001"), -ket("001"))
        assert_allclose(embed_local(PAULI_Z, 0, 3) @ ket("001"), ket("001"))

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            embed_local(PAULI_X, 3, 3)


class TestPartialTrace:
    def test_bell_marginal(self):
        assert_allclose(partial_trace(bell(), {1}).matrix, np.eye(2) / 2, atol=1e-15)

    def test_product_state(self):
        rho = PureState(ket("00")).density_matrix()
        assert_allclose(partial_trace(rho, {0}).matrix, np.diag([1, 0]))

    def test_gghz_spectrum(self):
        alpha = math.pi / 3
        reduced = partial_trace(gghz(alpha, 0.7).density_matrix(), {2})
        expected = sorted([math.cos(alpha / 2) ** 2, math.sin(alpha / 2) ** 2, 0, 0])
        assert_allclose(hermitian_eigenvalues(reduced.matrix), expected, atol=1e-12)

    def test_matches_index_contraction(self, rng):
        rho = random_density(rng, 3)
        tensor = rho.matrix.reshape([2] * 6)
        oracle = np.einsum("abcdbf->acdf", tensor).reshape(4, 4)
        assert_allclose(partial_trace(rho, {1}).matrix, oracle, atol=1e-14)

    def test_trace_preserved_after_noise(self, rng):
        rho = random_density(rng, 3)
        noisy = apply_local_noise(rho, NoiseConfig(kind="ad", strength=0.4, noisy_set=(0, 2)))
        reduced = partial_trace(noisy, {0})
        assert abs(np.trace(reduced.matrix) - 1) < 1e-10

    def test_cannot_remove_everything(self):
        with pytest.raises(DomainError):
            partial_trace(bell(), {0, 1})


class TestPartialTranspose:
    def test_bell_spectrum(self):
        spectrum = hermitian_eigenvalues(partial_transpose(bell(), "first"))
        assert_allclose(spectrum, [-0.5, 0.5, 0.5, 0.5], atol=1e-12)

    def test_maximally_mixed(self):
        assert_allclose(partial_transpose(np.eye(4) / 4, "first"), np.eye(4) / 4)

    def test_involution(self, rng):
        rho = random_density(rng, 2)
        twice = partial_transpose(partial_transpose(rho, "first"), "first")
        assert np.array_equal(twice, rho.matrix)

    def test_spectrum_independent_of_subsystem(self, rng):
        rho = random_density(rng, 2)
        first = hermitian_eigenvalues(partial_transpose(rho, "first"))
        second = hermitian_eigenvalues(partial_transpose(rho, "second"))
        assert_allclose(first, second, atol=1e-12)

    def test_ghz_branch_minimum_eigenvalue(self):
        setting = MeasurementSetting((2,), (PauliAxis.X,))
        branch = measurement_branches(gghz(math.pi / 2, 0).density_matrix(), setting)[0]
        assert hermitian_eigenvalues(partial_transpose(branch.state))[0] == pytest.approx(-0.5)

    def test_rejects_non_two_qubit(self):
        with pytest.raises(DomainError):
            partial_transpose(np.eye(8) / 8)


class TestHermitianEigenvalues:
    def test_diagonal(self):
        assert_allclose(hermitian_eigenvalues(np.diag([3.0, 1.0, 2.0, 0.0])), [0, 1, 2, 3])

    def test_sigma_x(self):
        assert_allclose(hermitian_eigenvalues(PAULI_X), [-1, 1])

    def test_rejects_non_hermitian(self):
        with pytest.raises(DomainError):
            hermitian_eigenvalues(np.array([[0, 1], [0, 0]]))

    def test_sum_is_trace(self, rng):
        rho = random_density(rng, 3)
        assert sum(hermitian_eigenvalues(rho.matrix)) == pytest.approx(1.0, abs=1e-10)

    def test_characteristic_polynomial_oracle(self, rng):
        for _ in range(20):
            a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
            h = (a + a.conj().T) / 2
            roots = np.sort(np.roots(np.poly(h)).real)
            assert_allclose(hermitian_eigenvalues(h), roots, atol=1e-9)

    def test_pf_noisy_branch_spectrum(self):
        alpha, p = math.pi / 3, 0.3
        rho = apply_local_noise(
            gghz(alpha, 0).density_matrix(),
            NoiseConfig(kind=ChannelKind.PHASE_FLIP, strength=p, noisy_set=(0, 1, 2)),
        )
        branch = measurement_branches(rho, MeasurementSetting((2,), (PauliAxis.X,)))[0]
        coherence = 0.5 * (1 - p) ** 3 * math.sin(alpha)
        expected = sorted(
            [0.5 * (1 + math.cos(alpha)), 0.5 * (1 - math.cos(alpha)), coherence, -coherence]
        )
        assert_allclose(hermitian_eigenvalues(partial_transpose(branch.state)), expected, atol=1e-12)


class TestStates:
    def test_pure_state_rejects_unnormalized(self):
        with pytest.raises(DomainError):
            PureState(np.array([1.0, 1.0]))

    def test_validate_rejects_negative_spectrum(self):
        with pytest.raises(DomainError):
            DensityMatrix(np.diag([1.5, -0.5])).validate()

    def test_random_states_validate(self, rng):
        random_pure(rng, 3).density_matrix().validate()
        random_density(rng, 4).validate()
