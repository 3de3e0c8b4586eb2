"""Experiment runners behind the noisy-le command line"""

import json
import math
import pathlib
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Tuple

import pandas as pd
from rich.console import Console
from rich.progress import BarColumn, MofNCompleteColumn, Progress, SpinnerColumn, TextColumn
from rich.table import Table

from closed_forms import (
    GGHZConfigLabel,
    ad_critical,
    ad_crossing,
    ad_crossing_analytic,
    closed_form_rle,
    dp_critical,
)
from config import (
    __version__,
    ClosedFormCheckConfig,
    DeltaBConfig,
    DynamicsConfig,
    ErrorSurfaceConfig,
    ExperimentConfig,
    ScanConfig,
)
from errors import ValidationFailure
from hierarchy_engine import (
    HIERARCHIES_3,
    HIERARCHIES_4,
    MAX_VALUE,
    VALUE_TOL,
    LEProfile,
    delta_b,
    verdict,
)
from localizable import LocalizationMethod, OptimizerOptions, localize, le, rle
from noise_channels import (
    ChannelKind,
    NoiseConfig,
    apply_local_noise,
    enumerate_noise_configs,
    mask_qubits,
)
from qlinalg import DensityMatrix, PureState
from state_ensembles import RngStream, gghz, gw, sample
from utils import read_results, wilson_interval, write_results


def noisy_state(
    state: PureState | DensityMatrix, kind: ChannelKind, p: float, noisy_set: Iterable[int]
) -> DensityMatrix:
    rho = state.density_matrix() if isinstance(state, PureState) else state
    return apply_local_noise(rho, NoiseConfig(kind=kind, strength=p, noisy_set=tuple(noisy_set)))


def build_profile(
    state: PureState | DensityMatrix,
    pair: Tuple[int, int],
    kind: ChannelKind,
    p: float,
    method: LocalizationMethod,
    opts: Optional[OptimizerOptions] = None,
    masks: Optional[Iterable[int]] = None,
) -> LEProfile:
    """LE/RLE of the state for every noise subset (or only the given masks)"""
    rho = state.density_matrix() if isinstance(state, PureState) else state
    wanted = None if masks is None else set(masks)
    values = {}
    for tagged in enumerate_noise_configs(rho.num_qubits, pair, kind, p):
        if wanted is not None and tagged.mask not in wanted:
            continue
        noisy = apply_local_noise(rho, tagged.config)
        values[tagged.mask] = localize(noisy, pair, method, opts).value
    return LEProfile(rho.num_qubits, tuple(pair), LocalizationMethod(method), values, kind, p)


def gghz_value(
    kind: ChannelKind,
    label: GGHZConfigLabel,
    alpha: float,
    beta: float,
    p: float,
    method: LocalizationMethod = LocalizationMethod.RLE,
    opts: Optional[OptimizerOptions] = None,
) -> float:
    """Numerical LE/RLE of gGHZ(α, β) with noise placed per `label`"""
    rho = noisy_state(gghz(alpha, beta), kind, p, label.qubits)
    return localize(rho, (0, 1), method, opts).value


def score_sample(cfg: ScanConfig, index: int) -> Dict[str, Any]:
    """Verdict row of one sampled state"""
    state = sample(cfg.ensemble, RngStream(cfg.seed, index))
    profile = build_profile(state, cfg.pair, cfg.noise, cfg.p, cfg.method, cfg.optimizer)
    result = verdict(profile, cfg.resolved_slack())
    row: Dict[str, Any] = {"sample": index, **result.as_row()}
    row["e_noiseless"] = profile.value(0)
    if profile.num_qubits == 3:
        row["delta_b"] = delta_b(profile)
    return row


def _score_task(task: Tuple[ScanConfig, int]) -> Dict[str, Any]:
    return score_sample(*task)


def _valid_checkpoint_row(row: Any, names: Tuple[str, ...], total: int) -> bool:
    """Rows from an earlier run must look like score_sample output"""
    if not isinstance(row, dict):
        return False
    index = row.get("sample")
    if not isinstance(index, int) or not 0 <= index < total:
        return False
    if any(row.get(name) not in (0, 1) for name in names):
        return False
    value = row.get("e_noiseless")
    return (
        isinstance(value, (int, float))
        and math.isfinite(value)
        and -VALUE_TOL <= value <= MAX_VALUE + VALUE_TOL
    )


@dataclass(frozen=True)
class HierarchyStat:
    count: int
    percentage: float
    ci_low: float
    ci_high: float


@dataclass
class ScanSummary:
    stats: Dict[str, HierarchyStat]
    samples: int
    wall_time: float
    output: Optional[pathlib.Path] = None
    content_hash: str = ""

    def percentage(self, name: str) -> float:
        return self.stats[name].percentage

    def to_dict(self) -> Dict[str, Any]:
        return {
            "samples": self.samples,
            "wall_time": self.wall_time,
            "content_hash": self.content_hash,
            "hierarchies": {
                name: {
                    "count": s.count,
                    "percentage": s.percentage,
                    "ci95": [100 * s.ci_low, 100 * s.ci_high],
                }
                for name, s in self.stats.items()
            },
        }


def summarize(rows: List[Dict[str, Any]], names: Iterable[str]) -> Dict[str, HierarchyStat]:
    stats = {}
    total = len(rows)
    for name in names:
        count = sum(int(row[name]) for row in rows)
        low, high = wilson_interval(count, total)
        percentage = 100.0 * count / total if total else 0.0
        stats[name] = HierarchyStat(count, percentage, low, high)
    return stats


@dataclass
class CheckReport:
    rows: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(row["passed"] for row in self.rows)

    def add(self, check: str, kind: str, label: str, deviation: float, tolerance: float) -> None:
        self.rows.append(
            {
                "check": check,
                "kind": kind,
                "label": label,
                "max_deviation": deviation,
                "tolerance": tolerance,
                "passed": bool(deviation < tolerance),
            }
        )


class ExperimentRunner:
    """Runs experiments with console reporting"""

    def __init__(self, verbose: bool = False, console: Optional[Console] = None):
        self.verbose = verbose
        self.console = console or Console()

    def _progress(self) -> Progress:
        return Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            BarColumn(),
            MofNCompleteColumn(),
            console=self.console,
            transient=True,
        )

    def _header(self, cfg: ExperimentConfig, extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        header = {
            "version": __version__,
            "command": cfg.command,
            "config": cfg.model_dump(mode="json", exclude={"out", "workers"}),
            "config_hash": cfg.config_hash(),
        }
        header.update(extra or {})
        return header

    def _write(self, cfg: ExperimentConfig, frame: pd.DataFrame, extra=None) -> Tuple[pathlib.Path, str]:
        path = cfg.output_path()
        digest = write_results(path, frame, self._header(cfg, extra))
        self.console.print(f"[green]✓ Wrote {len(frame)} rows to {path}[/green]")
        if self.verbose:
            self.console.print(f"[dim]content hash {digest}[/dim]")
        return path, digest

    # Scans

    def _checkpoint_path(self, cfg: ScanConfig) -> pathlib.Path:
        out = cfg.output_path()
        return out.with_name(f"{out.stem}.{cfg.config_hash()[:12]}.ckpt.jsonl")

    def _load_checkpoint(
        self, path: pathlib.Path, names: Tuple[str, ...], total: int
    ) -> Dict[int, Dict[str, Any]]:
        done: Dict[int, Dict[str, Any]] = {}
        rejected = 0
        if not path.exists():
            return done
        with open(path, "r", encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if not line:
                    continue
                try:
                    row = json.loads(line)
                except json.JSONDecodeError:
                    # Torn final line from an interrupted run
                    continue
                if not _valid_checkpoint_row(row, names, total):
                    rejected += 1
                    continue
                done[int(row["sample"])] = row
        if rejected:
            self.console.print(
                f"[yellow]⚠️  Discarded {rejected} malformed checkpoint rows from {path}; "
                "they will be rescored[/yellow]"
            )
        return done

    def scan(self, cfg: ScanConfig) -> ScanSummary:
        start = time.perf_counter()
        total = cfg.num_samples()
        names = HIERARCHIES_3 if cfg.ensemble.num_qubits == 3 else HIERARCHIES_4
        checkpoint = self._checkpoint_path(cfg)
        done = self._load_checkpoint(checkpoint, names, total)
        pending = [i for i in range(total) if i not in done]

        self.console.print(
            f"[bold blue]🚀 Scanning {total} {cfg.ensemble.value} states under "
            f"{cfg.noise.value} noise (p={cfg.p:g}, {cfg.method.value})[/bold blue]"
        )
        if done:
            self.console.print(f"[dim]Resuming: {len(done)} samples already in {checkpoint}[/dim]")

        checkpoint.parent.mkdir(parents=True, exist_ok=True)
        with open(checkpoint, "a", encoding="utf-8") as ckpt, self._progress() as progress:
            if ckpt.tell() and not checkpoint.read_bytes().endswith(b"\n"):
                ckpt.write("\n")
            task = progress.add_task("Scoring samples", total=total, completed=len(done))
            for row in self._score(cfg, pending):
                done[row["sample"]] = row
                ckpt.write(json.dumps(row) + "\n")
                ckpt.flush()
                progress.advance(task)

        rows = [done[i] for i in range(total)]
        stats = summarize(rows, names)
        frame = pd.DataFrame(rows)
        summary = ScanSummary(stats, total, time.perf_counter() - start)
        extra = {
            "seed": cfg.seed,
            "rng": "numpy Philox, SeedSequence(seed, spawn_key=(sample,))",
            "slack": cfg.resolved_slack(),
        }
        summary.output, summary.content_hash = self._write(cfg, frame, extra)
        self._write_summary(summary)
        checkpoint.unlink(missing_ok=True)
        self._print_summary(summary)
        return summary

    def _score(self, cfg: ScanConfig, indices: List[int]) -> Iterable[Dict[str, Any]]:
        if cfg.workers <= 1 or len(indices) <= 1:
            for i in indices:
                yield score_sample(cfg, i)
            return
        chunksize = max(1, len(indices) // (cfg.workers * 8))
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            yield from pool.map(_score_task, [(cfg, i) for i in indices], chunksize=chunksize)

    def _write_summary(self, summary: ScanSummary) -> None:
        path = summary.output.with_suffix(".summary.json")
        try:
            with open(path, "w", encoding="utf-8") as f:
                json.dump(summary.to_dict(), f, indent=2, sort_keys=True)
        except OSError as e:
            raise OSError(f"Could not write summary to {path}: {e}") from e

    def _print_summary(self, summary: ScanSummary) -> None:
        table = Table(title=f"Hierarchies satisfied ({summary.samples} states)")
        table.add_column("Hierarchy")
        table.add_column("Count", justify="right")
        table.add_column("Percent", justify="right")
        table.add_column("95% Wilson", justify="right")
        for name, s in summary.stats.items():
            table.add_row(
                name,
                str(s.count),
                f"{s.percentage:.2f}",
                f"[{100 * s.ci_low:.2f}, {100 * s.ci_high:.2f}]",
            )
        self.console.print(table)
        self.console.print(f"[dim]wall time {summary.wall_time:.1f}s[/dim]")

    # Curves and surfaces

    def dynamics(self, cfg: DynamicsConfig) -> pd.DataFrame:
        self.console.print(
            f"[bold blue]📈 gGHZ dynamics at α={cfg.alpha:.4f}, β={cfg.beta:.4f}[/bold blue]"
        )
        rows = []
        points = [(k, p) for k in cfg.kinds for p in cfg.p_values()]
        with self._progress() as progress:
            task = progress.add_task("Noise strengths", total=len(points))
            for kind, p in points:
                row: Dict[str, Any] = {"kind": kind.value, "p": p}
                for label in cfg.labels:
                    rho = noisy_state(gghz(cfg.alpha, cfg.beta), kind, p, label.qubits)
                    row[f"le_{label.value}"] = le(rho, (0, 1), cfg.optimizer).value
                    if cfg.with_rle:
                        row[f"rle_{label.value}"] = rle(rho, (0, 1)).value
                rows.append(row)
                progress.advance(task)
        frame = pd.DataFrame(rows)
        self._write(cfg, frame)
        return frame

    def error_surface(self, cfg: ErrorSurfaceConfig) -> pd.DataFrame:
        self.console.print(f"[bold blue]🗺️  LE − RLE surface for {cfg.kind.value} noise[/bold blue]")
        rows = []
        grid = cfg.grid()
        with self._progress() as progress:
            task = progress.add_task("Grid points", total=len(grid) * len(cfg.labels))
            for alpha, beta, p in grid:
                for label in cfg.labels:
                    rho = noisy_state(gghz(alpha, beta), cfg.kind, p, label.qubits)
                    full = le(rho, (0, 1), cfg.optimizer).value
                    restricted = rle(rho, (0, 1)).value
                    rows.append(
                        {
                            "alpha": alpha,
                            "beta": beta,
                            "p": p,
                            "label": label.value,
                            "le": full,
                            "rle": restricted,
                            "epsilon": full - restricted,
                        }
                    )
                    progress.advance(task)
        frame = pd.DataFrame(rows)
        self._write(cfg, frame)
        return frame

    def delta_b_surface(self, cfg: DeltaBConfig) -> pd.DataFrame:
        self.console.print(
            f"[bold blue]🔍 Δ_B over gW states, {cfg.kind.value} noise p={cfg.p:g}[/bold blue]"
        )
        # {0}, {1}, {0,2}, {1,2}
        masks = (0b001, 0b010, 0b101, 0b110)
        rows = []
        grid = cfg.grid()
        with self._progress() as progress:
            task = progress.add_task("Grid points", total=len(grid))
            for alpha, beta in grid:
                profile = build_profile(
                    gw(alpha, beta), (0, 1), cfg.kind, cfg.p, cfg.method, cfg.optimizer, masks
                )
                row = {"alpha": alpha, "beta": beta, "delta_b": delta_b(profile)}
                row.update(
                    {f"e_L{''.join(map(str, mask_qubits(m)))}": profile.value(m) for m in masks}
                )
                rows.append(row)
                progress.advance(task)
        frame = pd.DataFrame(rows)
        self._write(cfg, frame)
        negative = int((frame["delta_b"] < 0).sum())
        self.console.print(f"[dim]{negative} of {len(frame)} grid points have Δ_B < 0[/dim]")
        return frame

    # Closed forms

    def check_closed_forms(self, cfg: ClosedFormCheckConfig) -> CheckReport:
        self.console.print("[bold blue]🧮 Cross-checking closed forms against numerical RLE[/bold blue]")
        report = CheckReport()
        with self._progress() as progress:
            task = progress.add_task("Kinds", total=len(cfg.kinds))
            for kind in cfg.kinds:
                alphas = list(cfg.alphas)
                if kind is ChannelKind.AMPLITUDE_DAMPING:
                    alphas += list(cfg.ad_extra_alphas)
                for label in GGHZConfigLabel:
                    worst = 0.0
                    for alpha in alphas:
                        for beta in cfg.betas:
                            for p in cfg.p_values:
                                expected = closed_form_rle(kind, label, alpha, beta, p).value
                                actual = gghz_value(kind, label, alpha, beta, p)
                                worst = max(worst, abs(expected - actual))
                    report.add("rle", kind.value, label.value, worst, cfg.tolerance)
                progress.advance(task)

        self._check_critical(cfg, report)
        frame = pd.DataFrame(report.rows)
        if cfg.out is not None:
            self._write(cfg, frame)
        self._print_report(report)
        if not report.passed:
            failed = [f"{r['check']}:{r['kind']}:{r['label']}" for r in report.rows if not r["passed"]]
            raise ValidationFailure(f"closed-form checks failed: {', '.join(failed)}")
        return report

    def _check_critical(self, cfg: ClosedFormCheckConfig, report: CheckReport) -> None:
        for label, target in ((GGHZConfigLabel.RHO_13, 0.5), (GGHZConfigLabel.RHO_1, 2 / 3)):
            worst = max(abs(dp_critical(label, a) - target) for a in cfg.alphas)
            report.add("p_c", "dp", label.value, worst, cfg.root_tolerance)

        ad_alphas = list(cfg.alphas) + list(cfg.ad_extra_alphas)
        worst = max(abs(ad_critical(a) - min(1 / math.tan(a / 2), 1.0)) for a in ad_alphas)
        report.add("p_c", "ad", GGHZConfigLabel.RHO_12.value, worst, cfg.root_tolerance)

        worst = max(abs(ad_crossing(a) - ad_crossing_analytic(a)) for a in ad_alphas)
        report.add("p_cr", "ad", "12|13", worst, cfg.root_tolerance)

    def _print_report(self, report: CheckReport) -> None:
        table = Table(title="Closed-form checks")
        for column in ("Check", "Kind", "Label", "Max deviation", "Result"):
            table.add_column(column)
        for row in report.rows:
            verdict_text = "[green]pass[/green]" if row["passed"] else "[bold red]FAIL[/bold red]"
            table.add_row(row["check"], row["kind"], row["label"], f"{row['max_deviation']:.2e}", verdict_text)
        self.console.print(table)


def cmd_scan(cfg: ScanConfig, verbose: bool = False) -> ScanSummary:
    return ExperimentRunner(verbose).scan(cfg)


def cmd_dynamics(cfg: DynamicsConfig, verbose: bool = False) -> pd.DataFrame:
    return ExperimentRunner(verbose).dynamics(cfg)


def cmd_error_surface(cfg: ErrorSurfaceConfig, verbose: bool = False) -> pd.DataFrame:
    return ExperimentRunner(verbose).error_surface(cfg)


def cmd_delta_b_surface(cfg: DeltaBConfig, verbose: bool = False) -> pd.DataFrame:
    return ExperimentRunner(verbose).delta_b_surface(cfg)


def cmd_closed_form_check(cfg: ClosedFormCheckConfig, verbose: bool = False) -> CheckReport:
    return ExperimentRunner(verbose).check_closed_forms(cfg)


def load_scan_rows(path: pathlib.Path) -> pd.DataFrame:
    """Per-state verdict table of a finished scan"""
    return read_results(path)[1]
