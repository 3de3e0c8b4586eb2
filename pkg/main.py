#!/usr/bin/env python3
"""
noisy-le - Localizable entanglement hierarchies under local noise

Subcommands:
1. scan               - hierarchy percentages over random state ensembles
2. dynamics           - LE of gGHZ versus noise strength for every noise placement
3. error-surface      - LE − RLE over gGHZ parameter grids
4. delta-b            - Δ_B over gW parameter grids
5. check-closed-forms - closed-form RLE against the numerical pipeline
"""

import logging
import pathlib
import sys
from typing import Annotated, Any, Callable, Dict, List, Optional

import typer
from rich.console import Console
from rich.logging import RichHandler

# Load environment variables from .env file
try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    pass  # python-dotenv not installed, use system environment variables

from closed_forms import GGHZConfigLabel
from config import (
    ClosedFormCheckConfig,
    DeltaBConfig,
    DynamicsConfig,
    ErrorSurfaceConfig,
    ScanConfig,
    build_config,
)
from errors import ConfigError, ValidationFailure
from experiments import (
    cmd_closed_form_check,
    cmd_delta_b_surface,
    cmd_dynamics,
    cmd_error_surface,
    cmd_scan,
)
from localizable import LocalizationMethod
from noise_channels import ChannelKind
from state_ensembles import EnsembleKind

console = Console()
app = typer.Typer(
    name="noisy-le",
    help="Localizable entanglement hierarchies of 3- and 4-qubit states under local noise",
    rich_markup_mode="rich",
)

ConfigFile = Annotated[
    Optional[pathlib.Path],
    typer.Option("--config", "-c", help="YAML experiment file; flags override its values"),
]
Output = Annotated[Optional[pathlib.Path], typer.Option("--out", "-o", help="Output CSV path")]
Verbose = Annotated[bool, typer.Option("--verbose", "-v", help="Enable verbose output")]
GridTheta = Annotated[Optional[int], typer.Option("--opt.grid-theta", help="θ grid steps with one measured qubit")]
GridPhi = Annotated[Optional[int], typer.Option("--opt.grid-phi", help="φ grid steps with one measured qubit")]
GridTheta4q = Annotated[
    Optional[int], typer.Option("--opt.grid-theta-4q", help="θ grid steps with two measured qubits")
]
GridPhi4q = Annotated[
    Optional[int], typer.Option("--opt.grid-phi-4q", help="φ grid steps with two measured qubits")
]
Starts = Annotated[Optional[int], typer.Option("--opt.starts", help="Grid cells refined by Nelder-Mead")]
Starts4q = Annotated[
    Optional[int], typer.Option("--opt.starts-4q", help="Refined cells with two measured qubits")
]
MaxEvals = Annotated[Optional[int], typer.Option("--opt.max-evals", help="Evaluations per refinement")]
Tol = Annotated[Optional[float], typer.Option("--opt.tol", help="Simplex diameter tolerance")]


def _setup_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=console, show_path=False)],
        force=True,
    )


def _optimizer(
    grid_theta: Optional[int],
    grid_phi: Optional[int],
    grid_theta_4q: Optional[int],
    grid_phi_4q: Optional[int],
    starts: Optional[int],
    starts_4q: Optional[int],
    max_evals: Optional[int],
    tol: Optional[float],
) -> Dict[str, Any]:
    values = {
        "grid_theta": grid_theta,
        "grid_phi": grid_phi,
        "grid_theta_4q": grid_theta_4q,
        "grid_phi_4q": grid_phi_4q,
        "starts": starts,
        "starts_4q": starts_4q,
        "max_evals": max_evals,
        "tol": tol,
    }
    return {k: v for k, v in values.items() if v is not None}


def _parse_pair(pair: Optional[str]) -> Optional[List[int]]:
    if pair is None:
        return None
    try:
        a, b = (int(part) for part in pair.split(","))
    except ValueError as e:
        raise ConfigError(f"--pair expects two comma-separated qubit indices, got {pair!r}") from e
    return [a, b]


def _run(action: Callable[[], Any], verbose: bool) -> Any:
    """Run a command, mapping failures to exit codes"""
    _setup_logging(verbose)
    try:
        return action()
    except ConfigError as e:
        console.print(f"[bold red]❌ Config error:[/bold red] {str(e)}")
        sys.exit(2)
    except ValidationFailure as e:
        console.print(f"[bold red]❌ Validation failed:[/bold red] {str(e)}")
        sys.exit(3)
    except Exception as e:
        console.print(f"[bold red]❌ Error:[/bold red] {str(e)}")
        if verbose:
            import traceback
            console.print(traceback.format_exc())
        sys.exit(1)


@app.command()
def scan(
    config_file: ConfigFile = None,
    ensemble: Annotated[Optional[EnsembleKind], typer.Option("--ensemble", help="Random state ensemble")] = None,
    noise: Annotated[Optional[ChannelKind], typer.Option("--noise", help="Noise channel")] = None,
    p: Annotated[Optional[float], typer.Option("--p", help="Noise strength")] = None,
    samples: Annotated[Optional[int], typer.Option("--samples", help="Number of sampled states")] = None,
    seed: Annotated[Optional[int], typer.Option("--seed", help="Master seed")] = None,
    method: Annotated[Optional[LocalizationMethod], typer.Option("--method", help="le or rle")] = None,
    pair: Annotated[Optional[str], typer.Option("--pair", help="Retained qubits, e.g. 0,1")] = None,
    workers: Annotated[Optional[int], typer.Option("--workers", help="Worker processes")] = None,
    slack: Annotated[Optional[float], typer.Option("--slack", help="Comparison slack")] = None,
    out: Output = None,
    grid_theta: GridTheta = None,
    grid_phi: GridPhi = None,
    grid_theta_4q: GridTheta4q = None,
    grid_phi_4q: GridPhi4q = None,
    starts_4q: Starts4q = None,
    starts: Starts = None,
    max_evals: MaxEvals = None,
    tol: Tol = None,
    verbose: Verbose = False,
):
    """
    Percentage of sampled states satisfying each LE hierarchy.

    Writes one CSV row per state (verdicts and margins) plus a JSON summary
    with Wilson intervals.
    """

    def action():
        cfg = build_config(
            ScanConfig,
            config_file,
            {
                "ensemble": ensemble,
                "noise": noise,
                "p": p,
                "samples": samples,
                "seed": seed,
                "method": method,
                "pair": _parse_pair(pair),
                "workers": workers,
                "slack": slack,
                "out": out,
                "optimizer": _optimizer(
                    grid_theta, grid_phi, grid_theta_4q, grid_phi_4q, starts, starts_4q, max_evals, tol
                ),
            },
        )
        cmd_scan(cfg, verbose=verbose)
        console.print("[bold green]✅ Scan completed![/bold green]")

    _run(action, verbose)


@app.command()
def dynamics(
    config_file: ConfigFile = None,
    alpha: Annotated[Optional[float], typer.Option("--alpha", help="gGHZ α")] = None,
    beta: Annotated[Optional[float], typer.Option("--beta", help="gGHZ β")] = None,
    noise: Annotated[Optional[List[ChannelKind]], typer.Option("--noise", help="Noise channel (repeatable)")] = None,
    p_steps: Annotated[Optional[int], typer.Option("--p-steps", help="Points on the p grid over [0, 1]")] = None,
    with_rle: Annotated[Optional[bool], typer.Option("--with-rle/--no-rle", help="Add RLE columns")] = None,
    out: Output = None,
    grid_theta: GridTheta = None,
    grid_phi: GridPhi = None,
    grid_theta_4q: GridTheta4q = None,
    grid_phi_4q: GridPhi4q = None,
    starts_4q: Starts4q = None,
    starts: Starts = None,
    max_evals: MaxEvals = None,
    tol: Tol = None,
    verbose: Verbose = False,
):
    """
    LE of gGHZ(α, β) versus p for every noise placement.
    """

    def action():
        cfg = build_config(
            DynamicsConfig,
            config_file,
            {
                "alpha": alpha,
                "beta": beta,
                "kinds": noise or None,
                "p_steps": p_steps,
                "with_rle": with_rle,
                "out": out,
                "optimizer": _optimizer(
                    grid_theta, grid_phi, grid_theta_4q, grid_phi_4q, starts, starts_4q, max_evals, tol
                ),
            },
        )
        cmd_dynamics(cfg, verbose=verbose)

    _run(action, verbose)


@app.command("error-surface")
def error_surface(
    config_file: ConfigFile = None,
    noise: Annotated[Optional[ChannelKind], typer.Option("--noise", help="Noise channel")] = None,
    label: Annotated[Optional[List[GGHZConfigLabel]], typer.Option("--label", help="Noise placement (repeatable)")] = None,
    axes: Annotated[Optional[str], typer.Option("--axes", help="alpha-p or alpha-beta")] = None,
    p: Annotated[Optional[float], typer.Option("--p", help="Fixed p for alpha-beta grids")] = None,
    alpha_steps: Annotated[Optional[int], typer.Option("--alpha-steps")] = None,
    p_steps: Annotated[Optional[int], typer.Option("--p-steps")] = None,
    beta_steps: Annotated[Optional[int], typer.Option("--beta-steps")] = None,
    out: Output = None,
    grid_theta: GridTheta = None,
    grid_phi: GridPhi = None,
    grid_theta_4q: GridTheta4q = None,
    grid_phi_4q: GridPhi4q = None,
    starts_4q: Starts4q = None,
    starts: Starts = None,
    max_evals: MaxEvals = None,
    tol: Tol = None,
    verbose: Verbose = False,
):
    """
    ε = LE − RLE of noisy gGHZ states over a parameter grid.
    """

    def action():
        cfg = build_config(
            ErrorSurfaceConfig,
            config_file,
            {
                "kind": noise,
                "labels": label or None,
                "axes": axes,
                "p": p,
                "alpha_steps": alpha_steps,
                "p_steps": p_steps,
                "beta_steps": beta_steps,
                "out": out,
                "optimizer": _optimizer(
                    grid_theta, grid_phi, grid_theta_4q, grid_phi_4q, starts, starts_4q, max_evals, tol
                ),
            },
        )
        cmd_error_surface(cfg, verbose=verbose)

    _run(action, verbose)


@app.command("delta-b")
def delta_b(
    config_file: ConfigFile = None,
    noise: Annotated[Optional[ChannelKind], typer.Option("--noise", help="Noise channel")] = None,
    p: Annotated[Optional[float], typer.Option("--p", help="Noise strength")] = None,
    method: Annotated[Optional[LocalizationMethod], typer.Option("--method", help="le or rle")] = None,
    alpha_steps: Annotated[Optional[int], typer.Option("--alpha-steps")] = None,
    beta_steps: Annotated[Optional[int], typer.Option("--beta-steps")] = None,
    out: Output = None,
    grid_theta: GridTheta = None,
    grid_phi: GridPhi = None,
    grid_theta_4q: GridTheta4q = None,
    grid_phi_4q: GridPhi4q = None,
    starts_4q: Starts4q = None,
    starts: Starts = None,
    max_evals: MaxEvals = None,
    tol: Tol = None,
    verbose: Verbose = False,
):
    """
    Δ_B of gW(α, β, 0, 0) states; negative values violate hierarchy B.
    """

    def action():
        cfg = build_config(
            DeltaBConfig,
            config_file,
            {
                "kind": noise,
                "p": p,
                "method": method,
                "alpha_steps": alpha_steps,
                "beta_steps": beta_steps,
                "out": out,
                "optimizer": _optimizer(
                    grid_theta, grid_phi, grid_theta_4q, grid_phi_4q, starts, starts_4q, max_evals, tol
                ),
            },
        )
        cmd_delta_b_surface(cfg, verbose=verbose)

    _run(action, verbose)


@app.command("check-closed-forms")
def check_closed_forms(
    config_file: ConfigFile = None,
    noise: Annotated[Optional[List[ChannelKind]], typer.Option("--noise", help="Noise channel (repeatable)")] = None,
    tolerance: Annotated[Optional[float], typer.Option("--tolerance", help="Allowed deviation")] = None,
    out: Output = None,
    verbose: Verbose = False,
):
    """
    Compare every closed-form RLE with the numerical pipeline. Exits 3 on failure.
    """

    def action():
        cfg = build_config(
            ClosedFormCheckConfig,
            config_file,
            {"kinds": noise or None, "tolerance": tolerance, "out": out},
        )
        cmd_closed_form_check(cfg, verbose=verbose)
        console.print("[bold green]✅ All closed-form checks passed![/bold green]")

    _run(action, verbose)


if __name__ == "__main__":
    app()
