"""Experiment configuration models, defaults and file loading"""

import hashlib
import json
import math
import os
import pathlib
from typing import Any, Dict, List, Literal, Optional, Tuple, Type, TypeVar

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from ruamel.yaml import YAML
from ruamel.yaml.error import YAMLError

from closed_forms import GGHZConfigLabel
from errors import ConfigError
from hierarchy_engine import DEFAULT_SLACK
from localizable import LocalizationMethod, OptimizerOptions
from noise_channels import ChannelKind
from state_ensembles import EnsembleKind
from utils import sanitize_filename

__version__ = "0.1.0"

TEMPLATE_DIR = pathlib.Path(__file__).parent / "templates"
OUTPUT_DIR = pathlib.Path(os.getenv("NOISY_LE_OUTPUT_DIR", "./results"))

DEFAULT_SAMPLES = {
    EnsembleKind.GHZ_CLASS_3: 5000,
    EnsembleKind.W_CLASS_3: 5000,
    EnsembleKind.GENERIC_4: 1000,
}

GRID_ALPHAS = tuple(k * math.pi / 12 for k in range(1, 7))
AD_EXTRA_ALPHAS = tuple(k * math.pi / 12 for k in range(7, 12))
GRID_BETAS = (0.0, math.pi / 4, math.pi / 2)
GRID_PS = tuple(round(0.1 * k, 10) for k in range(11))


def default_workers() -> int:
    """Worker count from NOISY_LE_WORKERS, else 1"""
    raw = os.getenv("NOISY_LE_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


class ExperimentConfig(BaseModel):
    """Fields shared by every command; the full config is echoed into each output header"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    out: Optional[pathlib.Path] = None
    optimizer: OptimizerOptions = OptimizerOptions()

    command: str = "experiment"

    def config_hash(self) -> str:
        payload = json.dumps(self.model_dump(mode="json", exclude={"out"}), sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()

    def describe(self) -> str:
        return self.command

    def output_path(self) -> pathlib.Path:
        if self.out is not None:
            return self.out
        return OUTPUT_DIR / f"{sanitize_filename(self.describe())}.csv"


class ScanConfig(ExperimentConfig):
    command: Literal["scan"] = "scan"
    ensemble: EnsembleKind = EnsembleKind.GHZ_CLASS_3
    noise: ChannelKind = ChannelKind.PHASE_FLIP
    p: float = Field(default=0.1, ge=0.0, le=1.0)
    samples: Optional[int] = Field(default=None, ge=1)
    seed: int = Field(default=2024, ge=0, lt=2**64)
    method: LocalizationMethod = LocalizationMethod.LE
    pair: Tuple[int, int] = (0, 1)
    workers: int = Field(default_factory=default_workers, ge=1)
    slack: Optional[float] = Field(default=None, ge=0.0)

    @field_validator("pair")
    @classmethod
    def _distinct(cls, value: Tuple[int, int]) -> Tuple[int, int]:
        if value[0] == value[1] or min(value) < 0:
            raise ValueError(f"retained pair must be two distinct qubits, got {value}")
        return value

    @model_validator(mode="after")
    def _pair_in_register(self) -> "ScanConfig":
        n = self.ensemble.num_qubits
        if max(self.pair) >= n:
            raise ValueError(
                f"retained pair {self.pair} out of range for {n}-qubit {self.ensemble.value} states"
            )
        return self

    def num_samples(self) -> int:
        return self.samples if self.samples is not None else DEFAULT_SAMPLES[self.ensemble]

    def resolved_slack(self) -> float:
        return self.slack if self.slack is not None else DEFAULT_SLACK[self.method]

    def config_hash(self) -> str:
        # Worker count never changes results
        payload = self.model_dump(mode="json", exclude={"out", "workers"})
        payload["samples"] = self.num_samples()
        payload["slack"] = self.resolved_slack()
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()

    def describe(self) -> str:
        return (
            f"scan_{self.ensemble.value}_{self.noise.value}_p{self.p:g}"
            f"_{self.method.value}_n{self.num_samples()}_seed{self.seed}"
        )


class DynamicsConfig(ExperimentConfig):
    command: Literal["dynamics"] = "dynamics"
    alpha: float = Field(default=math.pi / 3, ge=0.0, le=math.pi)
    beta: float = Field(default=0.0, ge=0.0, le=2 * math.pi)
    kinds: List[ChannelKind] = list(ChannelKind)
    p_steps: int = Field(default=11, ge=2)
    labels: List[GGHZConfigLabel] = list(GGHZConfigLabel)
    with_rle: bool = False

    def p_values(self) -> List[float]:
        return [k / (self.p_steps - 1) for k in range(self.p_steps)]

    def describe(self) -> str:
        kinds = "-".join(k.value for k in self.kinds)
        return f"dynamics_{kinds}_a{self.alpha:.4f}_b{self.beta:.4f}"


class ErrorSurfaceConfig(ExperimentConfig):
    command: Literal["error-surface"] = "error-surface"
    kind: ChannelKind = ChannelKind.BIT_FLIP
    labels: List[GGHZConfigLabel] = [GGHZConfigLabel.RHO_123]
    axes: Literal["alpha-p", "alpha-beta"] = "alpha-p"
    alpha_steps: int = Field(default=13, ge=2)
    p_steps: int = Field(default=11, ge=2)
    beta_steps: int = Field(default=9, ge=2)
    p: float = Field(default=0.5, ge=0.0, le=1.0)
    beta: float = Field(default=0.0, ge=0.0, le=2 * math.pi)

    def grid(self) -> List[Tuple[float, float, float]]:
        """(alpha, beta, p) points; α spans [0, π]"""
        alphas = [k * math.pi / (self.alpha_steps - 1) for k in range(self.alpha_steps)]
        if self.axes == "alpha-p":
            ps = [k / (self.p_steps - 1) for k in range(self.p_steps)]
            return [(a, self.beta, p) for a in alphas for p in ps]
        betas = [k * 2 * math.pi / (self.beta_steps - 1) for k in range(self.beta_steps)]
        return [(a, b, self.p) for a in alphas for b in betas]

    def describe(self) -> str:
        return f"error-surface_{self.kind.value}_{self.axes}"


class DeltaBConfig(ExperimentConfig):
    command: Literal["delta-b"] = "delta-b"
    kind: ChannelKind = ChannelKind.BIT_FLIP
    p: float = Field(default=0.1, ge=0.0, le=1.0)
    alpha_steps: int = Field(default=19, ge=2)
    beta_steps: int = Field(default=19, ge=2)
    method: LocalizationMethod = LocalizationMethod.LE

    def grid(self) -> List[Tuple[float, float]]:
        """(alpha, beta) over [0, π]²"""
        alphas = [k * math.pi / (self.alpha_steps - 1) for k in range(self.alpha_steps)]
        betas = [k * math.pi / (self.beta_steps - 1) for k in range(self.beta_steps)]
        return [(a, b) for a in alphas for b in betas]

    def describe(self) -> str:
        return f"delta-b_{self.kind.value}_p{self.p:g}_{self.method.value}"


class ClosedFormCheckConfig(ExperimentConfig):
    command: Literal["check-closed-forms"] = "check-closed-forms"
    kinds: List[ChannelKind] = list(ChannelKind)
    alphas: List[float] = list(GRID_ALPHAS)
    ad_extra_alphas: List[float] = list(AD_EXTRA_ALPHAS)
    betas: List[float] = list(GRID_BETAS)
    p_values: List[float] = list(GRID_PS)
    tolerance: float = Field(default=1e-9, gt=0.0)
    root_tolerance: float = Field(default=1e-8, gt=0.0)

    def describe(self) -> str:
        return "check-closed-forms"


ConfigT = TypeVar("ConfigT", bound=ExperimentConfig)


def read_config_file(path: pathlib.Path) -> Dict[str, Any]:
    """Raw mapping from a YAML experiment file"""
    yaml = YAML(typ="safe")
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.load(f) or {}
    except OSError as e:
        raise ConfigError(f"Could not read config {path}: {e}") from e
    except YAMLError as e:
        raise ConfigError(f"Invalid YAML in {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"Config {path} must contain a mapping, got {type(data).__name__}")
    return data


def build_config(
    model: Type[ConfigT],
    path: Optional[pathlib.Path] = None,
    overrides: Optional[Dict[str, Any]] = None,
) -> ConfigT:
    """Merge file values (if any) with explicit overrides and validate"""
    data = read_config_file(path) if path else {}
    data.pop("command", None)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key == "optimizer":
            data["optimizer"] = {**data.get("optimizer", {}), **value}
        else:
            data[key] = value
    try:
        return model.model_validate(data)
    except ValidationError as e:
        raise ConfigError(str(e)) from e


def load_template(name: str, model: Type[ConfigT]) -> ConfigT:
    """Preset configuration shipped under templates/"""
    return build_config(model, TEMPLATE_DIR / f"{name}.yaml")
