"""Single-qubit Kraus channels and their uncorrelated application to qubit subsets"""

import itertools
from enum import Enum
from functools import reduce
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from errors import DomainError
from qlinalg import IDENTITY, PAULI_X, PAULI_Y, PAULI_Z, DensityMatrix, embed_local


class ChannelKind(str, Enum):
    BIT_FLIP = "bf"
    PHASE_FLIP = "pf"
    DEPOLARIZING = "dp"
    AMPLITUDE_DAMPING = "ad"


class Scenario(str, Enum):
    """How many qubits of the retained pair are noisy"""

    NEITHER = "i"
    ONE = "ii"
    BOTH = "iii"


class NoiseConfig(BaseModel):
    """Identical local noise of one kind and strength on the qubits in noisy_set"""

    model_config = ConfigDict(frozen=True)

    kind: ChannelKind
    strength: float = Field(ge=0.0, le=1.0)
    noisy_set: Tuple[int, ...] = ()

    @field_validator("noisy_set")
    @classmethod
    def _distinct_non_negative(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        if len(set(value)) != len(value):
            raise ValueError(f"duplicate qubit in noisy set {value}")
        if any(q < 0 for q in value):
            raise ValueError(f"negative qubit index in noisy set {value}")
        return value

    @property
    def mask(self) -> int:
        return subset_mask(self.noisy_set)

    @property
    def m(self) -> int:
        return len(self.noisy_set)


class TaggedNoiseConfig(BaseModel):
    """A noise configuration with its cardinality and scenario; the noiseless set has no scenario"""

    model_config = ConfigDict(frozen=True)

    config: NoiseConfig
    m: int
    scenario: Optional[Scenario]

    @property
    def mask(self) -> int:
        return self.config.mask


def subset_mask(qubits) -> int:
    """Bitmask with bit q set for each qubit q"""
    return reduce(lambda acc, q: acc | (1 << q), qubits, 0)


def mask_qubits(mask: int) -> Tuple[int, ...]:
    return tuple(q for q in range(mask.bit_length()) if mask >> q & 1)


def scenario_of(noisy_set, pair: Tuple[int, int]) -> Optional[Scenario]:
    """Scenario tag from membership of the retained pair in L; None for L = ∅"""
    noisy = set(noisy_set)
    if not noisy:
        return None
    hits = len(noisy & set(pair))
    return (Scenario.NEITHER, Scenario.ONE, Scenario.BOTH)[hits]


def kraus_operators(kind: ChannelKind, p: float) -> List[np.ndarray]:
    """Kraus operators of a single-qubit channel at strength p"""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"noise strength p={p!r} outside [0, 1]")
    kind = ChannelKind(kind)

    if kind is ChannelKind.BIT_FLIP:
        return [np.sqrt(1 - p / 2) * IDENTITY, np.sqrt(p / 2) * PAULI_X]
    if kind is ChannelKind.PHASE_FLIP:
        return [np.sqrt(1 - p / 2) * IDENTITY, np.sqrt(p / 2) * PAULI_Z]
    if kind is ChannelKind.DEPOLARIZING:
        return [
            np.sqrt(1 - 3 * p / 4) * IDENTITY,
            np.sqrt(p / 4) * PAULI_X,
            np.sqrt(p / 4) * PAULI_Y,
            np.sqrt(p / 4) * PAULI_Z,
        ]
    return [
        np.array([[1, 0], [0, np.sqrt(1 - p)]], dtype=complex),
        np.array([[0, np.sqrt(p)], [0, 0]], dtype=complex),
    ]


def _check_noisy_set(cfg: NoiseConfig, n: int) -> None:
    for q in cfg.noisy_set:
        if q >= n:
            raise DomainError(f"noisy qubit {q} out of range for {n} qubits")


def apply_channel_on_qubit(
    matrix: np.ndarray, kraus: List[np.ndarray], target: int, n: int
) -> np.ndarray:
    """Σ_μ K_μ ρ K_μ† with each K_μ acting on `target` only"""
    out = np.zeros_like(matrix)
    for k in kraus:
        full = embed_local(k, target, n)
        out += full @ matrix @ full.conj().T
    return out


def apply_local_noise(rho: DensityMatrix, cfg: NoiseConfig) -> DensityMatrix:
    """Apply the channel to each qubit of cfg.noisy_set in turn"""
    n = rho.num_qubits
    _check_noisy_set(cfg, n)
    if not cfg.noisy_set:
        return rho

    kraus = kraus_operators(cfg.kind, cfg.strength)
    matrix = rho.matrix
    for target in cfg.noisy_set:
        matrix = apply_channel_on_qubit(matrix, kraus, target, n)
    return DensityMatrix((matrix + matrix.conj().T) / 2)


def apply_local_noise_multi_index(rho: DensityMatrix, cfg: NoiseConfig) -> DensityMatrix:
    """Full operator sum over the d^m Kraus multi-indices"""
    n = rho.num_qubits
    _check_noisy_set(cfg, n)
    if not cfg.noisy_set:
        return rho

    kraus = kraus_operators(cfg.kind, cfg.strength)
    out = np.zeros_like(rho.matrix)
    for combo in itertools.product(kraus, repeat=cfg.m):
        full = np.eye(2**n, dtype=complex)
        for k, target in zip(combo, cfg.noisy_set):
            full = full @ embed_local(k, target, n)
        out += full @ rho.matrix @ full.conj().T
    return DensityMatrix(out)


def enumerate_noise_configs(
    n: int, unmeasured_pair: Tuple[int, int], kind: ChannelKind, p: float
) -> List[TaggedNoiseConfig]:
    """Every subset L of an n-qubit register, ordered by bitmask, tagged with m and scenario"""
    if n not in (3, 4):
        raise DomainError(f"register size {n} not supported (3 or 4 qubits)")
    a, b = unmeasured_pair
    if a == b or not (0 <= a < n and 0 <= b < n):
        raise DomainError(f"invalid retained pair {unmeasured_pair} for {n} qubits")

    configs = []
    for mask in range(2**n):
        noisy = mask_qubits(mask)
        configs.append(
            TaggedNoiseConfig(
                config=NoiseConfig(kind=kind, strength=p, noisy_set=noisy),
                m=len(noisy),
                scenario=scenario_of(noisy, unmeasured_pair),
            )
        )
    return configs
