"""Negativity of two-qubit states from the partial-transpose spectrum"""

import numpy as np

from errors import DomainError
from qlinalg import DensityMatrix, hermitian_eigenvalues, partial_transpose

NEGATIVE_EIGENVALUE = -1e-12


def _as_two_qubit(rho: DensityMatrix | np.ndarray) -> DensityMatrix:
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(rho)
    if rho.num_qubits != 2:
        raise DomainError(f"negativity needs a two-qubit state, got {rho.num_qubits} qubits")
    return rho


def negativity(rho: DensityMatrix | np.ndarray, validate: bool = True) -> float:
    """Absolute sum of the negative eigenvalues of ρ^{T_a}

    A Bell state gives 1/2.
    """
    rho = _as_two_qubit(rho)
    if validate:
        rho.validate()
    spectrum = hermitian_eigenvalues(partial_transpose(rho, "first"))
    negative = spectrum[spectrum < NEGATIVE_EIGENVALUE]
    if negative.size > 1:
        raise DomainError(
            f"partial transpose has {negative.size} negative eigenvalues; input is not a state"
        )
    return float(-negative.sum())


def trace_norm_negativity(rho: DensityMatrix | np.ndarray) -> float:
    """||ρ^{T_a}||₁ − 1, twice the value of negativity()"""
    rho = _as_two_qubit(rho).validate()
    spectrum = hermitian_eigenvalues(partial_transpose(rho, "first"))
    return float(np.abs(spectrum).sum() - 1.0)


def batched_negativity(blocks: np.ndarray) -> np.ndarray:
    """Negativity of a stack of unnormalized 4x4 branch operators

    Each block may carry its branch probability as trace, so the result is
    p_k·E(ρ_k). The threshold scales with the trace.
    """
    blocks = np.asarray(blocks)
    weights = np.einsum("...ii->...", blocks).real
    transposed = blocks.reshape(*blocks.shape[:-2], 2, 2, 2, 2)
    transposed = np.swapaxes(transposed, -4, -2).reshape(blocks.shape)
    transposed = (transposed + np.conj(np.swapaxes(transposed, -1, -2))) / 2
    spectrum = np.linalg.eigvalsh(transposed)
    threshold = NEGATIVE_EIGENVALUE * np.maximum(weights, 0.0)[..., None]
    return -np.where(spectrum < threshold, spectrum, 0.0).sum(axis=-1)
