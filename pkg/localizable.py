"""Localizable entanglement (LE) and its Pauli-restricted lower bound (RLE)"""

import itertools
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.optimize import minimize

from errors import DomainError
from negativity import batched_negativity, negativity
from projective_measurement import (
    AngleBasis,
    MeasurementSetting,
    PauliAxis,
    measurement_branches,
    split_measured,
)
from qlinalg import DensityMatrix

logger = logging.getLogger(__name__)

TIE_TOL = 1e-12


class LocalizationMethod(str, Enum):
    LE = "le"
    RLE = "rle"


class OptimizerOptions(BaseModel):
    """Coarse grid plus Nelder-Mead refinement settings for LE

    The ``*_4q`` fields apply when two qubits are measured. Left unset they
    follow an explicitly given ``grid_theta``, ``grid_phi`` or ``starts``.
    """

    model_config = ConfigDict(frozen=True)

    grid_theta: int = Field(default=9, ge=1)
    grid_phi: int = Field(default=16, ge=1)
    grid_theta_4q: int = Field(default=7, ge=1)
    grid_phi_4q: int = Field(default=12, ge=1)
    starts: int = Field(default=5, ge=1)
    starts_4q: int = Field(default=3, ge=1)
    max_evals: int = Field(default=2000, ge=1)
    tol: float = Field(default=1e-7, gt=0)
    screen_tol: float = Field(default=1e-4, gt=0)

    @model_validator(mode="before")
    @classmethod
    def _two_qubit_defaults(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        for field in ("grid_theta", "grid_phi", "starts"):
            if data.get(field) is not None and data.get(f"{field}_4q") is None:
                data[f"{field}_4q"] = data[field]
        return data

    def grid_for(self, num_measured: int) -> Tuple[int, int]:
        if num_measured >= 2:
            return self.grid_theta_4q, self.grid_phi_4q
        return self.grid_theta, self.grid_phi

    def starts_for(self, num_measured: int) -> int:
        return self.starts_4q if num_measured >= 2 else self.starts


@dataclass(frozen=True)
class LocalizationResult:
    value: float
    best_setting: MeasurementSetting
    branch_values: Tuple[Tuple[float, float], ...]
    method: LocalizationMethod


def measured_qubits(rho: DensityMatrix, pair: Tuple[int, int]) -> Tuple[int, ...]:
    n = rho.num_qubits
    if n not in (3, 4):
        raise DomainError(f"register size {n} not supported (3 or 4 qubits)")
    a, b = pair
    if a == b or not (0 <= a < n and 0 <= b < n):
        raise DomainError(f"invalid retained pair {pair} for {n} qubits")
    return tuple(q for q in range(n) if q not in pair)


def branch_values(rho: DensityMatrix, setting: MeasurementSetting) -> List[Tuple[float, float]]:
    """(p_k, E_k) per outcome; null branches report E = 0"""
    if len(setting.retained(rho.num_qubits)) != 2:
        raise DomainError("average entanglement needs exactly two retained qubits")
    values = []
    for branch in measurement_branches(rho, setting):
        e = 0.0 if branch.is_null else negativity(branch.state, validate=False)
        values.append((branch.probability, e))
    return values


def average_entanglement(rho: DensityMatrix, setting: MeasurementSetting) -> float:
    return math.fsum(p * e for p, e in branch_values(rho, setting))


def _result(
    rho: DensityMatrix, setting: MeasurementSetting, method: LocalizationMethod
) -> LocalizationResult:
    values = branch_values(rho, setting)
    return LocalizationResult(
        value=math.fsum(p * e for p, e in values),
        best_setting=setting,
        branch_values=tuple(values),
        method=method,
    )


def rle(rho: DensityMatrix, pair: Tuple[int, int]) -> LocalizationResult:
    """Maximum over all Pauli measurement settings; earliest setting wins ties"""
    measured = measured_qubits(rho, pair)
    best_setting, best_value = None, -math.inf
    for axes in itertools.product(PauliAxis, repeat=len(measured)):
        setting = MeasurementSetting(measured, axes)
        value = average_entanglement(rho, setting)
        if value > best_value + TIE_TOL:
            best_setting, best_value = setting, value
    return _result(rho, best_setting, LocalizationMethod.RLE)


class _AngleObjective:
    """Average negativity as a function of the flattened (θ₁, φ₁, θ₂, φ₂, …)"""

    def __init__(self, rho: DensityMatrix, measured: Sequence[int]):
        self.tensor = split_measured(rho, measured)
        self.num_measured = len(measured)
        self.evaluations = 0

    def _vectors(self, angles: np.ndarray) -> np.ndarray:
        vectors = None
        for j in range(self.num_measured):
            half = angles[:, 2 * j] / 2
            phase = np.exp(1j * angles[:, 2 * j + 1])
            c, s = np.cos(half), np.sin(half)
            # (cells, outcome, component)
            single = np.stack(
                [np.stack([c, phase * s], axis=-1), np.stack([s, -phase * c], axis=-1)],
                axis=1,
            ).astype(complex)
            if vectors is None:
                vectors = single
                continue
            cells, k, d = vectors.shape
            vectors = np.einsum("ckd,cle->cklde", vectors, single).reshape(
                cells, 2 * k, 2 * d
            )
        return vectors

    def batch(self, angles: np.ndarray) -> np.ndarray:
        angles = np.atleast_2d(np.asarray(angles, dtype=float))
        self.evaluations += angles.shape[0]
        vectors = self._vectors(angles)
        blocks = np.einsum("aibj,cki,ckj->ckab", self.tensor, vectors.conj(), vectors)
        return batched_negativity(blocks).sum(axis=-1)

    def __call__(self, x: np.ndarray) -> float:
        return float(self.batch(x)[0])


def _grid(num_measured: int, grid_theta: int, grid_phi: int) -> np.ndarray:
    thetas = (np.arange(grid_theta) + 0.5) * math.pi / grid_theta
    phis = (np.arange(grid_phi) + 0.5) * 2 * math.pi / grid_phi
    cell = np.array([(t, f) for t in thetas for f in phis])
    rows = [np.concatenate(combo) for combo in itertools.product(cell, repeat=num_measured)]
    return np.array(rows)


def _setting_angles(setting: MeasurementSetting) -> np.ndarray:
    angles = []
    for basis in setting.bases:
        if isinstance(basis, PauliAxis):
            basis = basis.basis
        angles.extend([basis.theta, basis.phi])
    return np.array(angles)


def _nelder_mead(
    objective: _AngleObjective,
    x0: np.ndarray,
    steps: np.ndarray,
    xatol: float,
    fatol: float,
    max_evals: int,
) -> Tuple[np.ndarray, float, int]:
    start_value = objective(x0)
    res = minimize(
        lambda x: -objective(x),
        x0,
        method="Nelder-Mead",
        options=dict(
            initial_simplex=np.vstack([x0, x0 + np.diag(steps)]),
            xatol=xatol,
            fatol=fatol,
            maxfev=max_evals,
        ),
    )
    if -res.fun >= start_value:
        return res.x, -res.fun, res.nfev
    return x0, start_value, res.nfev


def le(
    rho: DensityMatrix, pair: Tuple[int, int], opts: Optional[OptimizerOptions] = None
) -> LocalizationResult:
    """Maximum average negativity over all rank-1 projective measurements

    Grid search over cell centres, a loose Nelder-Mead screen from the best
    cells and from the RLE optimum, then a tight polish of the best screened
    point.
    """
    opts = opts or OptimizerOptions()
    measured = measured_qubits(rho, pair)
    restricted = rle(rho, pair)
    objective = _AngleObjective(rho, measured)

    grid_theta, grid_phi = opts.grid_for(len(measured))
    grid = _grid(len(measured), grid_theta, grid_phi)
    grid_values = objective.batch(grid)
    order = np.argsort(-grid_values, kind="stable")[: opts.starts_for(len(measured))]
    starts = [grid[i] for i in order] + [_setting_angles(restricted.best_setting)]

    steps = np.tile([math.pi / grid_theta / 2, math.pi / grid_phi], len(measured))
    screen_tol = max(opts.screen_tol, opts.tol)
    best_x, best_value = None, -math.inf
    for x0 in starts:
        x, value, nfev = _nelder_mead(
            objective, x0, steps, screen_tol, screen_tol**2, opts.max_evals
        )
        logger.debug("start %s -> %.12f after %d evals", np.round(x0, 4), value, nfev)
        if value > best_value + TIE_TOL:
            best_x, best_value = x, value

    # restart with a fresh simplex around the screened optimum
    polish_steps = np.full_like(steps, 10 * screen_tol)
    best_x, best_value, nfev = _nelder_mead(
        objective, best_x, polish_steps, opts.tol, 1e-12, opts.max_evals
    )
    logger.debug("polish -> %.12f after %d evals", best_value, nfev)

    bases = tuple(
        AngleBasis.canonical(best_x[2 * j], best_x[2 * j + 1]) for j in range(len(measured))
    )
    result = _result(rho, MeasurementSetting(measured, bases), LocalizationMethod.LE)
    if result.value < restricted.value:
        return LocalizationResult(
            value=restricted.value,
            best_setting=restricted.best_setting,
            branch_values=restricted.branch_values,
            method=LocalizationMethod.LE,
        )
    return result


def epsilon(
    rho: DensityMatrix, pair: Tuple[int, int], opts: Optional[OptimizerOptions] = None
) -> float:
    """LE − RLE"""
    return le(rho, pair, opts).value - rle(rho, pair).value


def localize(
    rho: DensityMatrix,
    pair: Tuple[int, int],
    method: LocalizationMethod,
    opts: Optional[OptimizerOptions] = None,
) -> LocalizationResult:
    if LocalizationMethod(method) is LocalizationMethod.RLE:
        return rle(rho, pair)
    return le(rho, pair, opts)
