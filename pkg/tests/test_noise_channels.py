"""Tests for local noise channels and configuration enumeration"""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import bell, random_density
from errors import DomainError
from noise_channels import (
    ChannelKind,
    NoiseConfig,
    Scenario,
    apply_local_noise,
    apply_local_noise_multi_index,
    enumerate_noise_configs,
    kraus_operators,
    mask_qubits,
    scenario_of,
    subset_mask,
)
from qlinalg import PAULI_X, DensityMatrix, PureState, ket, partial_trace

KINDS = list(ChannelKind)
STRENGTHS = [0.0, 0.1, 0.37, 0.5, 0.9, 1.0]


def _noise(kind, p, *qubits):
    return NoiseConfig(kind=kind, strength=p, noisy_set=qubits)


class TestKraus:
    @pytest.mark.parametrize("kind", KINDS)
    @pytest.mark.parametrize("p", STRENGTHS)
    def test_completeness(self, kind, p):
        total = sum(k.conj().T @ k for k in kraus_operators(kind, p))
        assert_allclose(total, np.eye(2), atol=1e-12)

    def test_bit_flip_at_zero(self):
        ops = kraus_operators(ChannelKind.BIT_FLIP, 0.0)
        assert_allclose(ops[0], np.eye(2))
        assert_allclose(ops[1], 0 * PAULI_X)

    def test_depolarizing_half(self):
        ops = kraus_operators(ChannelKind.DEPOLARIZING, 0.5)
        assert ops[0][0, 0].real == pytest.approx(math.sqrt(5 / 8))
        assert len(ops) == 4
        for op in ops[1:]:
            assert np.max(np.abs(op)) == pytest.approx(math.sqrt(1 / 8))

    def test_full_damping_resets_excited_state(self):
        rho = PureState(ket("1")).density_matrix()
        out = apply_local_noise(rho, _noise(ChannelKind.AMPLITUDE_DAMPING, 1.0, 0))
        assert_allclose(out.matrix, np.diag([1, 0]), atol=1e-15)

    @pytest.mark.parametrize("p", [-0.01, 1.01])
    def test_strength_out_of_range(self, p):
        with pytest.raises(DomainError):
            kraus_operators(ChannelKind.PHASE_FLIP, p)


class TestApplyLocalNoise:
    @pytest.mark.parametrize("kind", KINDS)
    def test_zero_strength_is_identity(self, kind, rng):
        rho = random_density(rng, 3)
        out = apply_local_noise(rho, _noise(kind, 0.0, 0, 1, 2))
        assert_allclose(out.matrix, rho.matrix, atol=1e-15)

    def test_full_bit_flip_on_zero(self):
        rho = PureState(ket("0")).density_matrix()
        out = apply_local_noise(rho, _noise(ChannelKind.BIT_FLIP, 1.0, 0))
        assert_allclose(out.matrix, np.eye(2) / 2, atol=1e-15)

    def test_empty_set_returns_input(self, rng):
        rho = random_density(rng, 3)
        assert apply_local_noise(rho, _noise(ChannelKind.DEPOLARIZING, 0.4)) is rho

    def test_out_of_range_qubit(self, rng):
        with pytest.raises(DomainError):
            apply_local_noise(random_density(rng, 3), _noise(ChannelKind.BIT_FLIP, 0.2, 3))

    def test_duplicate_qubits_rejected(self):
        with pytest.raises(ValueError):
            _noise(ChannelKind.BIT_FLIP, 0.2, 1, 1)

    def test_strength_validated_by_model(self):
        with pytest.raises(ValueError):
            _noise(ChannelKind.BIT_FLIP, 1.5, 0)

    @pytest.mark.parametrize("kind", KINDS)
    def test_output_is_a_state(self, kind, rng):
        for _ in range(5):
            rho = random_density(rng, 3)
            apply_local_noise(rho, _noise(kind, rng.uniform(), 0, 2)).validate()

    @pytest.mark.parametrize("kind", KINDS)
    def test_commutes_with_partial_trace(self, kind, rng):
        rho = random_density(rng, 3)
        cfg = _noise(kind, 0.35, 0)
        left = partial_trace(apply_local_noise(rho, cfg), {2})
        right = apply_local_noise(partial_trace(rho, {2}), cfg)
        assert_allclose(left.matrix, right.matrix, atol=1e-12)

    @pytest.mark.parametrize("kind", KINDS)
    def test_disjoint_sets_compose(self, kind, rng):
        rho = random_density(rng, 3)
        both = apply_local_noise(rho, _noise(kind, 0.25, 0, 2))
        stepwise = apply_local_noise(apply_local_noise(rho, _noise(kind, 0.25, 0)), _noise(kind, 0.25, 2))
        assert_allclose(both.matrix, stepwise.matrix, atol=1e-12)

    @pytest.mark.parametrize("kind", [ChannelKind.BIT_FLIP, ChannelKind.PHASE_FLIP, ChannelKind.DEPOLARIZING])
    def test_unital_channels_fix_maximally_mixed(self, kind):
        rho = DensityMatrix(np.eye(8) / 8)
        out = apply_local_noise(rho, _noise(kind, 0.6, 0, 1, 2))
        assert_allclose(out.matrix, np.eye(8) / 8, atol=1e-15)

    def test_full_damping_maps_to_ground_state(self):
        rho = DensityMatrix(np.eye(8) / 8)
        out = apply_local_noise(rho, _noise(ChannelKind.AMPLITUDE_DAMPING, 1.0, 0, 1, 2))
        expected = np.zeros((8, 8))
        expected[0, 0] = 1
        assert_allclose(out.matrix, expected, atol=1e-15)

    def test_full_phase_flip_on_bell_dephases(self):
        out = apply_local_noise(bell(), _noise(ChannelKind.PHASE_FLIP, 1.0, 1))
        assert_allclose(out.matrix, np.diag([0.5, 0, 0, 0.5]), atol=1e-15)

    @pytest.mark.parametrize("kind", KINDS)
    @pytest.mark.parametrize("qubits", [(1,), (0, 2), (0, 1, 2)])
    def test_sequential_matches_multi_index(self, kind, qubits, rng):
        rho = random_density(rng, 3)
        cfg = _noise(kind, 0.42, *qubits)
        assert_allclose(
            apply_local_noise(rho, cfg).matrix,
            apply_local_noise_multi_index(rho, cfg).matrix,
            atol=1e-12,
        )


class TestEnumeration:
    def test_masks(self):
        assert subset_mask((0, 2)) == 0b101
        assert mask_qubits(0b1010) == (1, 3)
        assert subset_mask(()) == 0

    def test_scenarios(self):
        assert scenario_of((), (0, 1)) is None
        assert scenario_of((2,), (0, 1)) is Scenario.NEITHER
        assert scenario_of((1, 2), (0, 1)) is Scenario.ONE
        assert scenario_of((0, 1), (0, 1)) is Scenario.BOTH

    def test_three_qubits(self):
        configs = enumerate_noise_configs(3, (0, 1), ChannelKind.BIT_FLIP, 0.3)
        assert [c.mask for c in configs] == list(range(8))
        assert [c.m for c in configs] == [0, 1, 1, 2, 1, 2, 2, 3]
        by_scenario = {}
        for c in configs:
            by_scenario.setdefault(c.scenario, []).append(c.config.noisy_set)
        assert by_scenario[None] == [()]
        assert by_scenario[Scenario.NEITHER] == [(2,)]
        assert by_scenario[Scenario.ONE] == [(0,), (1,), (0, 2), (1, 2)]
        assert by_scenario[Scenario.BOTH] == [(0, 1), (0, 1, 2)]
        assert all(c.config.strength == 0.3 for c in configs)

    def test_four_qubit_scenario_counts(self):
        configs = enumerate_noise_configs(4, (0, 1), ChannelKind.PHASE_FLIP, 0.1)
        counts = {}
        for c in configs:
            counts[c.scenario] = counts.get(c.scenario, 0) + 1
        assert counts == {None: 1, Scenario.NEITHER: 3, Scenario.ONE: 8, Scenario.BOTH: 4}

    def test_other_pair(self):
        configs = enumerate_noise_configs(3, (1, 2), ChannelKind.PHASE_FLIP, 0.1)
        assert configs[0b001].scenario is Scenario.NEITHER

    @pytest.mark.parametrize("n", [2, 5])
    def test_register_size(self, n):
        with pytest.raises(DomainError):
            enumerate_noise_configs(n, (0, 1), ChannelKind.BIT_FLIP, 0.1)

    def test_invalid_pair(self):
        with pytest.raises(DomainError):
            enumerate_noise_configs(3, (1, 1), ChannelKind.BIT_FLIP, 0.1)
