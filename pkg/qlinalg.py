"""Dense complex linear algebra for few-qubit registers

Qubit 0 is the most significant bit of a computational-basis index, i.e. the
leftmost tensor factor.
"""

from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np

from errors import DomainError

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
NORM_TOL = 1e-12

IDENTITY = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _num_qubits(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 1 or 2**n != dim:
        raise DomainError(f"dimension {dim} is not a power of 2")
    return n


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized amplitude vector over the 2^N computational basis"""

    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        _num_qubits(amplitudes.size)
        norm = float(np.vdot(amplitudes, amplitudes).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise DomainError(f"state norm² is {norm!r}, expected 1")
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def from_unnormalized(cls, amplitudes: Iterable[complex]) -> "PureState":
        vector = np.asarray(list(amplitudes), dtype=complex)
        norm = np.linalg.norm(vector)
        if norm == 0:
            raise DomainError("cannot normalize the zero vector")
        return cls(vector / norm)

    @property
    def num_qubits(self) -> int:
        return _num_qubits(self.amplitudes.size)

    def density_matrix(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Operator on a qubit register; call validate() to enforce state invariants"""

    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DomainError(f"density matrix must be square, got shape {matrix.shape}")
        _num_qubits(matrix.shape[0])
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def from_pure(cls, state: PureState) -> "DensityMatrix":
        return state.density_matrix()

    @property
    def num_qubits(self) -> int:
        return _num_qubits(self.matrix.shape[0])

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def validate(self) -> "DensityMatrix":
        """Check hermiticity, unit trace and positivity; returns self"""
        asym = float(np.max(np.abs(self.matrix - self.matrix.conj().T)))
        if asym > HERMITIAN_TOL:
            raise DomainError(f"matrix is not Hermitian (max |M - M†| = {asym:.3e})")
        trace = complex(np.trace(self.matrix))
        if abs(trace - 1.0) > TRACE_TOL:
            raise DomainError(f"trace is {trace:.12g}, expected 1")
        lowest = hermitian_eigenvalues(self.matrix)[0]
        if lowest < -PSD_TOL:
            raise DomainError(f"minimum eigenvalue {lowest:.3e} is negative")
        return self


def ket(bits: str) -> np.ndarray:
    """Computational basis vector, e.g. ket("001")"""
    vector = np.zeros(2 ** len(bits), dtype=complex)
    vector[int(bits, 2)] = 1.0
    return vector


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(a, b)


def embed_local(op: np.ndarray, target: int, n: int) -> np.ndarray:
    """Place a single-qubit operator at `target` in an n-qubit register"""
    if not 0 <= target < n:
        raise DomainError(f"target qubit {target} out of range for {n} qubits")
    left = np.eye(2**target, dtype=complex)
    right = np.eye(2 ** (n - target - 1), dtype=complex)
    return np.kron(np.kron(left, op), right)


def partial_trace(rho: DensityMatrix, remove: Iterable[int]) -> DensityMatrix:
    """Trace out the qubits in `remove`; remaining qubits keep their order"""
    n = rho.num_qubits
    remove = sorted(set(remove))
    for q in remove:
        if not 0 <= q < n:
            raise DomainError(f"qubit {q} out of range for {n} qubits")
    if len(remove) == n:
        raise DomainError("cannot trace out every qubit")

    tensor = rho.matrix.reshape([2] * (2 * n))
    # Highest index first so earlier axis positions stay valid
    for k, q in enumerate(reversed(remove)):
        width = n - k
        tensor = np.trace(tensor, axis1=q, axis2=q + width)
    keep = n - len(remove)
    return DensityMatrix(tensor.reshape(2**keep, 2**keep))


def partial_transpose(
    rho: DensityMatrix | np.ndarray,
    subsystem: Literal["first", "second"] = "first",
) -> np.ndarray:
    """Partial transpose of a two-qubit operator"""
    matrix = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    if matrix.shape != (4, 4):
        raise DomainError(f"partial transpose needs a 4x4 matrix, got {matrix.shape}")
    tensor = matrix.reshape(2, 2, 2, 2)
    if subsystem == "first":
        tensor = tensor.transpose(2, 1, 0, 3)
    elif subsystem == "second":
        tensor = tensor.transpose(0, 3, 2, 1)
    else:
        raise DomainError(f"unknown subsystem {subsystem!r}")
    return tensor.reshape(4, 4)


def hermitian_eigenvalues(m: np.ndarray) -> np.ndarray:
    """Ascending real spectrum of a Hermitian matrix"""
    m = np.asarray(m, dtype=complex)
    asym = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    if asym > HERMITIAN_TOL:
        raise DomainError(f"matrix is not Hermitian (max |M - M†| = {asym:.3e})")
    return np.linalg.eigvalsh((m + m.conj().T) / 2)
