"""Parametrized GHZ/W families and seeded Gaussian samplers for random pure states"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import List

import numpy as np

from errors import DomainError
from qlinalg import PureState, partial_trace

TWO_PI = 2 * math.pi

# |000>, |001>, |010>, |100>
W_CLASS_SUPPORT = (0, 1, 2, 4)


class EnsembleKind(str, Enum):
    GHZ_CLASS_3 = "ghz3"
    W_CLASS_3 = "w3"
    GENERIC_4 = "generic4"

    @property
    def num_qubits(self) -> int:
        return 4 if self is EnsembleKind.GENERIC_4 else 3


@dataclass(frozen=True)
class RngStream:
    """Independent random stream determined by (master_seed, stream_index)"""

    master_seed: int
    stream_index: int

    def generator(self) -> np.random.Generator:
        seed = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_index,))
        return np.random.Generator(np.random.Philox(seed))


def _check_range(name: str, value: float, upper: float) -> None:
    if not 0.0 <= value <= upper:
        raise DomainError(f"{name}={value!r} outside [0, {upper:.6g}]")


def gghz(alpha: float, beta: float) -> PureState:
    """cos(α/2)|000> + e^{iβ} sin(α/2)|111>"""
    _check_range("alpha", alpha, math.pi)
    _check_range("beta", beta, TWO_PI)
    amplitudes = np.zeros(8, dtype=complex)
    amplitudes[0] = math.cos(alpha / 2)
    amplitudes[7] = complex(math.cos(beta), math.sin(beta)) * math.sin(alpha / 2)
    return PureState(amplitudes)


def gw(alpha: float, beta: float, gamma1: float = 0.0, gamma2: float = 0.0) -> PureState:
    """cos α|001> + e^{iγ₁} sin α cos β|010> + e^{iγ₂} sin α sin β|100>"""
    _check_range("alpha", alpha, math.pi)
    _check_range("beta", beta, math.pi)
    _check_range("gamma1", gamma1, TWO_PI)
    _check_range("gamma2", gamma2, TWO_PI)
    amplitudes = np.zeros(8, dtype=complex)
    amplitudes[1] = math.cos(alpha)
    amplitudes[2] = np.exp(1j * gamma1) * math.sin(alpha) * math.cos(beta)
    amplitudes[4] = np.exp(1j * gamma2) * math.sin(alpha) * math.sin(beta)
    return PureState.from_unnormalized(amplitudes)


def ghz(num_qubits: int = 3) -> PureState:
    amplitudes = np.zeros(2**num_qubits, dtype=complex)
    amplitudes[0] = amplitudes[-1] = 1 / math.sqrt(2)
    return PureState(amplitudes)


def w_state() -> PureState:
    amplitudes = np.zeros(8, dtype=complex)
    amplitudes[[1, 2, 4]] = 1 / math.sqrt(3)
    return PureState(amplitudes)


def _gaussian_amplitudes(generator: np.random.Generator, size: int) -> np.ndarray:
    draws = generator.standard_normal((2, size))
    return draws[0] + 1j * draws[1]


def sample(kind: EnsembleKind, rng: RngStream) -> PureState:
    """Complex Gaussian coefficients on the ensemble's support, normalized"""
    kind = EnsembleKind(kind)
    generator = rng.generator()
    if kind is EnsembleKind.W_CLASS_3:
        amplitudes = np.zeros(8, dtype=complex)
        amplitudes[list(W_CLASS_SUPPORT)] = _gaussian_amplitudes(generator, 4)
    else:
        amplitudes = _gaussian_amplitudes(generator, 2**kind.num_qubits)
    return PureState.from_unnormalized(amplitudes)


def sample_batch(kind: EnsembleKind, master_seed: int, start: int, count: int) -> List[PureState]:
    """Samples start, …, start+count−1 of a seeded ensemble"""
    return [sample(kind, RngStream(master_seed, i)) for i in range(start, start + count)]


def marginal_purity(state: PureState, qubit: int) -> float:
    """Tr ρ_q² of a single-qubit marginal"""
    n = state.num_qubits
    rho = partial_trace(state.density_matrix(), [q for q in range(n) if q != qubit])
    return float(np.real(np.trace(rho.matrix @ rho.matrix)))
