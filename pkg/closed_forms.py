"""Analytic RLE of the three-qubit gGHZ state under local PF, BF, DP and AD noise

Qubits 0 and 1 are retained and qubit 2 is measured. Labels use the 1-indexed
names of the noisy qubits, so RHO_13 means noise on qubits 0 and 2.

Notation: S = sin α, s = sin(α/2), Q = p(2 − p), P = p² + (2 − p)².
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

from scipy.optimize import brentq

from errors import DomainError
from hierarchy_engine import LEProfile
from localizable import LocalizationMethod
from noise_channels import ChannelKind, subset_mask

logger = logging.getLogger(__name__)

ROOT_XTOL = 1e-12
PAIR = (0, 1)


class GGHZConfigLabel(str, Enum):
    RHO_123 = "123"
    RHO_12 = "12"
    RHO_13 = "13"
    RHO_23 = "23"
    RHO_1 = "1"
    RHO_2 = "2"
    RHO_3 = "3"
    NOISELESS = "none"

    @property
    def qubits(self) -> Tuple[int, ...]:
        if self is GGHZConfigLabel.NOISELESS:
            return ()
        return tuple(int(c) - 1 for c in self.value)

    @property
    def mask(self) -> int:
        return subset_mask(self.qubits)

    @property
    def m(self) -> int:
        return len(self.qubits)

    @property
    def canonical(self) -> "GGHZConfigLabel":
        """Representative under the symmetry exchanging the two retained qubits"""
        return _MIRROR.get(self, self)


_MIRROR = {GGHZConfigLabel.RHO_23: GGHZConfigLabel.RHO_13, GGHZConfigLabel.RHO_2: GGHZConfigLabel.RHO_1}


@dataclass(frozen=True)
class ClosedFormResult:
    value: float
    raw: float
    valid_domain: str
    clamped: bool


def _clamp(raw: float, domain: str) -> ClosedFormResult:
    if raw < 0:
        logger.debug("clamped closed form %.3e to 0", raw)
    return ClosedFormResult(max(raw, 0.0), raw, domain, raw < 0)


def _check(alpha: float, p: float, alpha_max: float = math.pi / 2) -> None:
    if not 0.0 <= alpha <= alpha_max + 1e-15:
        raise DomainError(f"alpha={alpha!r} outside [0, {alpha_max:.6g}]")
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"noise strength p={p!r} outside [0, 1]")


def pf_rle(label: GGHZConfigLabel, alpha: float, p: float) -> ClosedFormResult:
    _check(alpha, p)
    label = GGHZConfigLabel(label)
    return _clamp(0.5 * (1 - p) ** label.m * math.sin(alpha), "alpha in [0, pi/2]")


def _bf_pair(S: float, p: float, sin2: float, coherence: float = 1.0) -> float:
    """BF on both retained qubits with the measured-qubit coherence scaled"""
    Q = p * (2 - p)
    P = p**2 + (2 - p) ** 2
    f = P**2 - 4 * Q**2 * sin2
    return (coherence * S * math.sqrt(max(f, 0.0)) - 2 * Q) / 8


def bf_rle(label: GGHZConfigLabel, alpha: float, beta: float, p: float) -> ClosedFormResult:
    """X-basis expressions, with the Y basis taking over when sin²β > cos²β"""
    _check(alpha, p)
    if not 0.0 <= beta <= 2 * math.pi:
        raise DomainError(f"beta={beta!r} outside [0, 2π]")
    label = GGHZConfigLabel(label).canonical
    S = math.sin(alpha)
    sin2, cos2 = math.sin(beta) ** 2, math.cos(beta) ** 2
    domain = "alpha in [0, pi/2], beta in [0, 2pi]"

    if label is GGHZConfigLabel.RHO_12:
        raw = max(_bf_pair(S, p, sin2), _bf_pair(S, p, cos2))
    elif label is GGHZConfigLabel.RHO_123:
        # Bit flips on the measured qubit commute with the X basis only
        raw = max(_bf_pair(S, p, sin2), _bf_pair(S, p, cos2, coherence=1 - p))
    elif label in (GGHZConfigLabel.RHO_13, GGHZConfigLabel.RHO_1):
        raw = (math.sqrt(p**2 + 4 * (1 - p) * S**2) - p) / 4
    else:
        raw = S / 2
    return _clamp(raw, domain)


def bf_critical(alpha: float, beta: float) -> float:
    """Smallest p at which the BF value of ρ₁₂ reaches zero (1 if it stays positive)"""
    if not 0.0 < alpha <= math.pi / 2 + 1e-15:
        raise DomainError(f"alpha={alpha!r} outside (0, π/2]")
    S2 = math.sin(alpha) ** 2
    sin2 = min(math.sin(beta) ** 2, math.cos(beta) ** 2)

    def gap(p: float) -> float:
        Q = p * (2 - p)
        P = p**2 + (2 - p) ** 2
        return S2 * (P**2 - 4 * Q**2 * sin2) - 4 * Q**2

    if gap(1.0) >= 0:
        return 1.0
    return brentq(gap, 0.0, 1.0, xtol=ROOT_XTOL)


def _dp_f1(S: float, p: float) -> float:
    return 2 * S**2 * (8 - 32 * p + 46 * p**2 - 32 * p**3 + 8 * p**4)


def _dp_f2(S: float, p: float) -> float:
    return 4 * S**2 * (p - 2) * (3 * p - 2)


def _dp_raw(label: GGHZConfigLabel, S: float, p: float) -> float:
    Q = p * (2 - p)
    if label is GGHZConfigLabel.RHO_123:
        return (2 * (1 - p) ** 3 * S - Q) / 4
    if label is GGHZConfigLabel.RHO_12:
        return (2 * (1 - p) ** 2 * S - Q) / 4
    if label is GGHZConfigLabel.RHO_13:
        return (math.sqrt(max(4 * p**2 + _dp_f1(S, p), 0.0)) - 2 * p) / 8
    if label is GGHZConfigLabel.RHO_1:
        return (math.sqrt(max(4 * p**2 + _dp_f2(S, p), 0.0)) - 2 * p) / 8
    if label is GGHZConfigLabel.RHO_3:
        return (1 - p) * S / 2
    return S / 2


def dp_rle(label: GGHZConfigLabel, alpha: float, p: float) -> ClosedFormResult:
    _check(alpha, p)
    label = GGHZConfigLabel(label).canonical
    return _clamp(_dp_raw(label, math.sin(alpha), p), "alpha in [0, pi/2]")


def dp_critical(label: GGHZConfigLabel, alpha: float) -> float:
    """Smallest p at which the DP value of `label` reaches zero (1 if never before p = 1)"""
    if not 0.0 < alpha <= math.pi / 2 + 1e-15:
        raise DomainError(f"alpha={alpha!r} outside (0, π/2]")
    label = GGHZConfigLabel(label).canonical
    S = math.sin(alpha)
    if _dp_raw(label, S, 1.0) >= 0:
        return 1.0
    return brentq(lambda p: _dp_raw(label, S, p), 0.0, 1.0, xtol=ROOT_XTOL)


def _ad_raw(label: GGHZConfigLabel, alpha: float, p: float) -> float:
    S = math.sin(alpha)
    s2 = math.sin(alpha / 2) ** 2
    if label is GGHZConfigLabel.RHO_123:
        return ((1 - p) ** 1.5 * S - p * (1 - p) * (1 - math.cos(alpha))) / 2
    if label is GGHZConfigLabel.RHO_12:
        return (1 - p) * (S + p * math.cos(alpha) - p) / 2
    if label is GGHZConfigLabel.RHO_13:
        return (math.sqrt(4 * (1 - p) ** 2 * S**2 + 4 * p**2 * s2**2) - 2 * p * s2) / 4
    if label is GGHZConfigLabel.RHO_1:
        return (math.sqrt(4 * (1 - p) * S**2 + 4 * p**2 * s2**2) - 2 * p * s2) / 4
    if label is GGHZConfigLabel.RHO_3:
        return math.sqrt(1 - p) * S / 2
    return S / 2


def ad_rle(label: GGHZConfigLabel, alpha: float, p: float) -> ClosedFormResult:
    _check(alpha, p, alpha_max=math.pi)
    label = GGHZConfigLabel(label).canonical
    return _clamp(_ad_raw(label, alpha, p), "alpha in [0, pi]")


def ad_critical(alpha: float) -> float:
    """Zero of the AD value of ρ₁₂; equals min(cot(α/2), 1)"""
    if not 0.0 < alpha <= math.pi:
        raise DomainError(f"alpha={alpha!r} outside (0, π]")

    def bracket(p: float) -> float:
        return math.sin(alpha) + p * math.cos(alpha) - p

    if bracket(0.0) <= 0:
        return 0.0
    if bracket(1.0) >= 0:
        return 1.0
    return brentq(bracket, 0.0, 1.0, xtol=ROOT_XTOL)


def ad_crossing_analytic(alpha: float) -> float:
    """min(1, f(α)) from the closed-form root of ρ₁₃ − ρ₁₂"""
    if not 0.0 < alpha < math.pi:
        raise DomainError(f"alpha={alpha!r} outside (0, π)")
    S, C = math.sin(alpha), math.cos(alpha)
    radicand = 4 * S * (S + C - 1)
    if radicand < 0:
        return 1.0
    return min(1.0, (2 * S - math.sqrt(radicand)) / (2 * (1 - C)))


def ad_crossing(alpha: float) -> float:
    """Noise strength where the AD values of ρ₁₂ and ρ₁₃ cross, refined by root finding"""
    seed = ad_crossing_analytic(alpha)
    if seed >= 1.0:
        return 1.0

    def difference(p: float) -> float:
        return _ad_raw(GGHZConfigLabel.RHO_13, alpha, p) - _ad_raw(
            GGHZConfigLabel.RHO_12, alpha, p
        )

    lo, hi = seed / 2, (seed + 1) / 2
    if difference(lo) * difference(hi) > 0:
        return seed
    return brentq(difference, lo, hi, xtol=ROOT_XTOL)


def closed_form_rle(
    kind: ChannelKind, label: GGHZConfigLabel, alpha: float, beta: float, p: float
) -> ClosedFormResult:
    kind = ChannelKind(kind)
    if kind is ChannelKind.PHASE_FLIP:
        return pf_rle(label, alpha, p)
    if kind is ChannelKind.BIT_FLIP:
        return bf_rle(label, alpha, beta, p)
    if kind is ChannelKind.DEPOLARIZING:
        return dp_rle(label, alpha, p)
    return ad_rle(label, alpha, p)


def closed_form_profile(kind: ChannelKind, alpha: float, beta: float, p: float) -> LEProfile:
    """RLE profile of gGHZ(α, β) over all eight noise placements"""
    values = {
        label.mask: closed_form_rle(kind, label, alpha, beta, p).value
        for label in GGHZConfigLabel
    }
    return LEProfile(
        num_qubits=3,
        pair=PAIR,
        method=LocalizationMethod.RLE,
        values=values,
        kind=ChannelKind(kind),
        strength=p,
    )
