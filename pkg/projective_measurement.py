"""Rank-1 single-qubit projectors and measurement branches on a subset of qubits"""

import itertools
import logging
import math
from dataclasses import dataclass
from enum import IntEnum
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from errors import DomainError
from qlinalg import IDENTITY, PAULI_X, PAULI_Y, PAULI_Z, DensityMatrix

logger = logging.getLogger(__name__)

ZERO_PROBABILITY = 1e-12
TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class AngleBasis:
    """Basis |0'> = cos(θ/2)|0> + e^{iφ} sin(θ/2)|1>, |1'> = sin(θ/2)|0> - e^{iφ} cos(θ/2)|1>"""

    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.theta < math.pi:
            raise DomainError(f"theta={self.theta!r} outside [0, π)")
        if not 0.0 <= self.phi <= TWO_PI:
            raise DomainError(f"phi={self.phi!r} outside [0, 2π]")

    @classmethod
    def canonical(cls, theta: float, phi: float) -> "AngleBasis":
        """Fold unconstrained angles into range without changing the projector pair

        θ = π is the Z basis with its outcomes swapped and folds to θ = 0.
        """
        theta = math.fmod(theta, TWO_PI)
        if theta < 0:
            theta += TWO_PI
        if theta > math.pi:
            # |0'> picks up a global sign only
            theta = TWO_PI - theta
            phi += math.pi
        if theta >= math.pi:
            return cls(0.0, 0.0)
        phi = math.fmod(phi, TWO_PI)
        if phi < 0:
            phi += TWO_PI
        return cls(theta, phi)


class PauliAxis(IntEnum):
    X = 0
    Y = 1
    Z = 2

    @property
    def basis(self) -> AngleBasis:
        return _PAULI_ANGLES[self]

    @property
    def matrix(self) -> np.ndarray:
        return (PAULI_X, PAULI_Y, PAULI_Z)[self]


_PAULI_ANGLES = {
    PauliAxis.X: AngleBasis(math.pi / 2, 0.0),
    PauliAxis.Y: AngleBasis(math.pi / 2, math.pi / 2),
    PauliAxis.Z: AngleBasis(0.0, 0.0),
}

Basis = Union[AngleBasis, PauliAxis]


def basis_vector(basis: Basis, outcome: int) -> np.ndarray:
    if isinstance(basis, PauliAxis):
        basis = basis.basis
    if outcome not in (0, 1):
        raise DomainError(f"outcome must be 0 or 1, got {outcome!r}")
    c, s = math.cos(basis.theta / 2), math.sin(basis.theta / 2)
    phase = complex(math.cos(basis.phi), math.sin(basis.phi))
    if outcome == 0:
        return np.array([c, phase * s], dtype=complex)
    return np.array([s, -phase * c], dtype=complex)


def projector(basis: AngleBasis, outcome: int) -> np.ndarray:
    v = basis_vector(basis, outcome)
    return np.outer(v, v.conj())


def pauli_projector(axis: PauliAxis, outcome: int) -> np.ndarray:
    """½(I + (-1)^k σ)"""
    if outcome not in (0, 1):
        raise DomainError(f"outcome must be 0 or 1, got {outcome!r}")
    sign = 1 if outcome == 0 else -1
    return (IDENTITY + sign * PauliAxis(axis).matrix) / 2


@dataclass(frozen=True)
class MeasurementSetting:
    """One basis per measured qubit; outcome bits follow measured order"""

    measured: Tuple[int, ...]
    bases: Tuple[Basis, ...]

    def __post_init__(self):
        if len(self.measured) != len(self.bases):
            raise DomainError(
                f"{len(self.measured)} measured qubits but {len(self.bases)} bases"
            )
        if len(set(self.measured)) != len(self.measured):
            raise DomainError(f"duplicate measured qubit in {self.measured}")

    def retained(self, n: int) -> Tuple[int, ...]:
        for q in self.measured:
            if not 0 <= q < n:
                raise DomainError(f"measured qubit {q} out of range for {n} qubits")
        return tuple(q for q in range(n) if q not in self.measured)

    def describe(self) -> str:
        parts = []
        for q, b in zip(self.measured, self.bases):
            if isinstance(b, PauliAxis):
                parts.append(f"{q}:{b.name}")
            else:
                parts.append(f"{q}:({b.theta:.6f},{b.phi:.6f})")
        return " ".join(parts)


@dataclass(frozen=True, eq=False)
class Branch:
    outcome: Tuple[int, ...]
    probability: float
    state: Optional[DensityMatrix]

    @property
    def is_null(self) -> bool:
        return self.state is None


def split_measured(rho: DensityMatrix, measured: Sequence[int]) -> np.ndarray:
    """Reshape ρ to (2^s, 2^r, 2^s, 2^r), retained qubits first, measured in the given order"""
    n = rho.num_qubits
    retained = [q for q in range(n) if q not in measured]
    order = retained + list(measured)
    tensor = rho.matrix.reshape([2] * (2 * n))
    tensor = tensor.transpose(order + [n + q for q in order])
    s, r = 2 ** len(retained), 2 ** len(measured)
    return tensor.reshape(s, r, s, r)


def outcome_vectors(bases: Sequence[Basis]) -> Tuple[List[Tuple[int, ...]], np.ndarray]:
    """Outcome multi-indices and the matching product vectors on the measured qubits"""
    outcomes = list(itertools.product((0, 1), repeat=len(bases)))
    vectors = []
    for outcome in outcomes:
        v = np.ones(1, dtype=complex)
        for basis, k in zip(bases, outcome):
            v = np.kron(v, basis_vector(basis, k))
        vectors.append(v)
    return outcomes, np.array(vectors)


def measurement_branches(rho: DensityMatrix, setting: MeasurementSetting) -> List[Branch]:
    """Probability and normalized retained state for every outcome of the setting"""
    retained = setting.retained(rho.num_qubits)
    if not retained:
        raise DomainError("measurement leaves no retained qubits")

    tensor = split_measured(rho, setting.measured)
    outcomes, vectors = outcome_vectors(setting.bases)
    # ⟨v|ρ|v⟩ over the measured factor
    reduced = np.einsum("aibj,ki,kj->kab", tensor, vectors.conj(), vectors)

    branches = []
    for outcome, block in zip(outcomes, reduced):
        probability = float(np.trace(block).real)
        if probability < ZERO_PROBABILITY:
            logger.debug("null branch %s (p=%.3e)", outcome, probability)
            branches.append(Branch(outcome, max(probability, 0.0), None))
            continue
        block = (block + block.conj().T) / 2
        block = block / np.trace(block).real
        branches.append(Branch(outcome, probability, DensityMatrix(block)))
    return branches
