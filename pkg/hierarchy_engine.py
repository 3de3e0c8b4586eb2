"""Hierarchy predicates over LE/RLE values of every noise configuration

A hierarchy is a chain of groups of noise configurations ordered from the
noisiest to the least noisy. Consecutive groups g, h must satisfy
max(g) <= min(h) + slack; the margin of that link is min(h) - max(g).
"""

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from errors import DomainError
from localizable import LocalizationMethod
from noise_channels import ChannelKind, Scenario, mask_qubits, scenario_of, subset_mask

DEFAULT_SLACK = {LocalizationMethod.RLE: 1e-9, LocalizationMethod.LE: 1e-6}

HIERARCHIES_3 = ("Env", "A", "B", "C")
HIERARCHIES_4 = ("H1", "H2", "H3", "H4", "H5")

# Negativity of two qubits never exceeds 1/2
MAX_VALUE = 0.5
VALUE_TOL = 1e-9


@dataclass(frozen=True)
class LEProfile:
    """LE or RLE value per noise subset L, keyed by bitmask"""

    num_qubits: int
    pair: Tuple[int, int]
    method: LocalizationMethod
    values: Dict[int, float]
    kind: Optional[ChannelKind] = None
    strength: Optional[float] = None

    def __post_init__(self):
        for mask, v in self.values.items():
            if not 0 <= mask < 2**self.num_qubits:
                raise DomainError(f"noise subset mask {mask} out of range for {self.num_qubits} qubits")
            if not (math.isfinite(v) and -VALUE_TOL <= v <= MAX_VALUE + VALUE_TOL):
                raise DomainError(
                    f"value {v!r} for noise subset {set(mask_qubits(mask)) or '{}'} outside [0, 1/2]"
                )

    def value(self, mask: int) -> float:
        try:
            return self.values[mask]
        except KeyError:
            raise DomainError(
                f"profile has no value for noise subset {set(mask_qubits(mask)) or '{}'}"
            ) from None

    def relabeled(self, permutation: Dict[int, int]) -> "LEProfile":
        """Profile seen after renaming qubit q to permutation[q]"""
        mapped = {
            subset_mask(permutation.get(q, q) for q in mask_qubits(mask)): v
            for mask, v in self.values.items()
        }
        pair = tuple(permutation.get(q, q) for q in self.pair)
        return LEProfile(
            self.num_qubits, pair, self.method, mapped, self.kind, self.strength
        )


@dataclass(frozen=True)
class ChainCheck:
    holds: bool
    margins: Tuple[float, ...]

    @property
    def worst_margin(self) -> float:
        return min(self.margins) if self.margins else math.inf


@dataclass(frozen=True)
class HierarchyVerdict:
    flags: Dict[str, bool]
    margins: Dict[str, float]
    slack: float
    links: Dict[str, Tuple[float, ...]] = field(default_factory=dict)

    def __getitem__(self, name: str) -> bool:
        return self.flags[name]

    def as_row(self) -> Dict[str, float]:
        row: Dict[str, float] = {name: int(flag) for name, flag in self.flags.items()}
        row.update({f"margin_{name}": margin for name, margin in self.margins.items()})
        return row


def check_chain(profile: LEProfile, groups: Sequence[Sequence[int]], slack: float) -> ChainCheck:
    """Each group's maximum must not exceed the next group's minimum by more than slack"""
    margins = []
    for lower, upper in itertools.pairwise(groups):
        highest = max(profile.value(mask) for mask in lower)
        lowest = min(profile.value(mask) for mask in upper)
        margins.append(lowest - highest)
    return ChainCheck(all(m >= -slack for m in margins), tuple(margins))


def _subsets(profile: LEProfile) -> List[int]:
    return list(range(1, 2**profile.num_qubits))


def _by_cardinality(masks: Sequence[int]) -> List[List[int]]:
    """Groups of masks by |L|, largest |L| first"""
    sizes = sorted({bin(m).count("1") for m in masks}, reverse=True)
    return [[m for m in masks if bin(m).count("1") == size] for size in sizes]


def scenario_masks(profile: LEProfile, scenario: Scenario) -> List[int]:
    return [
        m for m in _subsets(profile) if scenario_of(mask_qubits(m), profile.pair) is scenario
    ]


def fine_chain(profile: LEProfile, scenario: Scenario, slack: float) -> ChainCheck:
    """Within one scenario, ordered by the number of noisy qubits"""
    return check_chain(profile, _by_cardinality(scenario_masks(profile, scenario)), slack)


def envelope_chain(profile: LEProfile, slack: float) -> ChainCheck:
    """Scenario (iii) below (ii) below (i)"""
    groups = [scenario_masks(profile, s) for s in (Scenario.BOTH, Scenario.ONE, Scenario.NEITHER)]
    return check_chain(profile, groups, slack)


def cardinality_chain(profile: LEProfile, slack: float) -> ChainCheck:
    """Ordered by |L| alone, down to the noiseless state"""
    return check_chain(profile, _by_cardinality([0, *_subsets(profile)]), slack)


def _verdict(checks: Dict[str, ChainCheck], slack: float) -> HierarchyVerdict:
    return HierarchyVerdict(
        flags={name: c.holds for name, c in checks.items()},
        margins={name: c.worst_margin for name, c in checks.items()},
        slack=slack,
        links={name: c.margins for name, c in checks.items()},
    )


def _require(profile: LEProfile, n: int) -> None:
    if profile.num_qubits != n:
        raise DomainError(f"expected a {n}-qubit profile, got {profile.num_qubits} qubits")
    for mask in range(2**n):
        profile.value(mask)


def verdict3(profile: LEProfile, slack: float) -> HierarchyVerdict:
    _require(profile, 3)
    checks = {
        "Env": envelope_chain(profile, slack),
        "A": fine_chain(profile, Scenario.BOTH, slack),
        "B": fine_chain(profile, Scenario.ONE, slack),
        "C": cardinality_chain(profile, slack),
    }
    return _verdict(checks, slack)


def verdict4(profile: LEProfile, slack: float) -> HierarchyVerdict:
    _require(profile, 4)
    checks = {
        "H1": fine_chain(profile, Scenario.NEITHER, slack),
        "H2": fine_chain(profile, Scenario.ONE, slack),
        "H3": fine_chain(profile, Scenario.BOTH, slack),
        "H4": envelope_chain(profile, slack),
        "H5": cardinality_chain(profile, slack),
    }
    return _verdict(checks, slack)


def verdict(profile: LEProfile, slack: Optional[float] = None) -> HierarchyVerdict:
    if slack is None:
        slack = DEFAULT_SLACK[profile.method]
    if profile.num_qubits == 3:
        return verdict3(profile, slack)
    return verdict4(profile, slack)


def scenario_ii_per_qubit(profile: LEProfile, slack: float) -> Dict[int, ChainCheck]:
    """Scenario (ii) chains restricted to one noisy retained qubit j at a time"""
    checks = {}
    for j in profile.pair:
        masks = [m for m in scenario_masks(profile, Scenario.ONE) if m >> j & 1]
        checks[j] = check_chain(profile, _by_cardinality(masks), slack)
    return checks


def delta_b(profile: LEProfile) -> float:
    """min over single noisy retained qubit minus max over retained-plus-measured noise"""
    if profile.num_qubits != 3:
        raise DomainError("delta_b is defined for three-qubit profiles")
    a, b = profile.pair
    (r,) = (q for q in range(3) if q not in profile.pair)
    singles = [profile.value(subset_mask([a])), profile.value(subset_mask([b]))]
    mixed = [profile.value(subset_mask([a, r])), profile.value(subset_mask([b, r]))]
    return min(singles) - max(mixed)
