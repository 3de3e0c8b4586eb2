"""Tests for experiment runners"""

import dataclasses
import json
import math

import pytest
from rich.console import Console

import config
import experiments
from closed_forms import GGHZConfigLabel
from config import (
    ClosedFormCheckConfig,
    DeltaBConfig,
    DynamicsConfig,
    ErrorSurfaceConfig,
    ScanConfig,
)
from errors import ValidationFailure
from experiments import ExperimentRunner, build_profile, gghz_value, score_sample, summarize
from hierarchy_engine import HIERARCHIES_3, HIERARCHIES_4
from localizable import LocalizationMethod
from noise_channels import ChannelKind
from state_ensembles import ghz
from utils import read_results


@pytest.fixture
def runner():
    return ExperimentRunner(console=Console(quiet=True))


def _scan_config(tmp_path, name="scan.csv", **overrides):
    values = dict(
        ensemble="ghz3",
        noise="pf",
        p=0.1,
        samples=6,
        method="rle",
        workers=1,
        out=tmp_path / name,
    )
    values.update(overrides)
    return ScanConfig(**values)


class TestProfiles:
    def test_ghz_profile(self):
        profile = build_profile(ghz(), (0, 1), ChannelKind.PHASE_FLIP, 0.2, LocalizationMethod.RLE)
        assert set(profile.values) == set(range(8))
        assert profile.value(0) == pytest.approx(0.5)
        assert profile.value(0b111) == pytest.approx(0.5 * 0.8**3)

    def test_selected_masks(self):
        profile = build_profile(ghz(), (0, 1), ChannelKind.BIT_FLIP, 0.2, "rle", masks=[0, 0b100])
        assert set(profile.values) == {0, 0b100}

    def test_gghz_value(self):
        value = gghz_value(ChannelKind.PHASE_FLIP, GGHZConfigLabel.RHO_12, math.pi / 2, 0, 0.5)
        assert value == pytest.approx(0.125)


class TestScan:
    def test_score_sample_is_deterministic(self, tmp_path):
        cfg = _scan_config(tmp_path)
        assert score_sample(cfg, 3) == score_sample(cfg, 3)

    def test_score_sample_row(self, tmp_path):
        row = score_sample(_scan_config(tmp_path), 0)
        assert row["sample"] == 0
        for name in HIERARCHIES_3:
            assert row[name] in (0, 1)
            assert f"margin_{name}" in row
        assert "delta_b" in row and "e_noiseless" in row

    def test_four_qubit_row(self, tmp_path):
        row = score_sample(_scan_config(tmp_path, ensemble="generic4"), 0)
        assert all(name in row for name in HIERARCHIES_4)
        assert "delta_b" not in row

    def test_summary(self, runner, tmp_path):
        summary = runner.scan(_scan_config(tmp_path))
        assert summary.samples == 6
        for name in HIERARCHIES_3:
            stat = summary.stats[name]
            assert 0 <= stat.count <= 6
            assert stat.percentage == pytest.approx(100 * stat.count / 6)
            assert stat.ci_low <= stat.count / 6 <= stat.ci_high
        saved = json.loads((tmp_path / "scan.summary.json").read_text())
        assert set(saved["hierarchies"]) == set(HIERARCHIES_3)

    def test_output_header(self, runner, tmp_path):
        cfg = _scan_config(tmp_path)
        summary = runner.scan(cfg)
        header, frame = read_results(summary.output)
        assert header["config_hash"] == cfg.config_hash()
        assert header["seed"] == cfg.seed
        assert header["version"] == config.__version__
        assert header["content_hash"] == summary.content_hash
        assert list(frame["sample"]) == list(range(6))

    def test_worker_count_does_not_change_output(self, runner, tmp_path):
        single = runner.scan(_scan_config(tmp_path, "single.csv", workers=1))
        pooled = runner.scan(_scan_config(tmp_path, "pooled.csv", workers=2))
        assert single.output.read_bytes() == pooled.output.read_bytes()

    def test_resumes_from_checkpoint(self, runner, tmp_path):
        cfg = _scan_config(tmp_path, samples=4)
        checkpoint = runner._checkpoint_path(cfg)
        checkpoint.parent.mkdir(parents=True, exist_ok=True)
        first = score_sample(cfg, 0)
        first["e_noiseless"] = 0.123
        with open(checkpoint, "w", encoding="utf-8") as f:
            f.write(json.dumps(first) + "\n")
            f.write(json.dumps(score_sample(cfg, 1)) + "\n")
            f.write('{"sample": 2, "Env"')

        summary = runner.scan(cfg)
        _, frame = read_results(summary.output)
        assert frame["e_noiseless"].iloc[0] == 0.123
        assert frame["e_noiseless"].iloc[2] == pytest.approx(score_sample(cfg, 2)["e_noiseless"])
        assert not checkpoint.exists()

    @pytest.mark.parametrize(
        "corruption",
        [{"e_noiseless": 123.0}, {"e_noiseless": float("nan")}, {"Env": 7}, {"sample": 99}],
    )
    def test_rescores_malformed_checkpoint_rows(self, runner, tmp_path, corruption):
        cfg = _scan_config(tmp_path, samples=3)
        checkpoint = runner._checkpoint_path(cfg)
        checkpoint.parent.mkdir(parents=True, exist_ok=True)
        bad = {**score_sample(cfg, 0), **corruption}
        checkpoint.write_text(json.dumps(bad) + "\n", encoding="utf-8")

        summary = runner.scan(cfg)
        _, frame = read_results(summary.output)
        assert len(frame) == 3
        assert frame["e_noiseless"].iloc[0] == pytest.approx(score_sample(cfg, 0)["e_noiseless"])
        assert frame["Env"].isin([0, 1]).all()

    def test_checkpoint_keyed_by_config(self, runner, tmp_path):
        a = runner._checkpoint_path(_scan_config(tmp_path, seed=1))
        b = runner._checkpoint_path(_scan_config(tmp_path, seed=2))
        c = runner._checkpoint_path(_scan_config(tmp_path, seed=1, workers=3))
        assert a != b
        assert a == c

    def test_summarize_empty(self):
        stats = summarize([], HIERARCHIES_3)
        assert stats["A"].percentage == 0.0


class TestCurves:
    def test_dynamics(self, runner, tmp_path, fast_opts):
        cfg = DynamicsConfig(
            kinds=["pf"],
            p_steps=3,
            labels=["123", "12", "none"],
            with_rle=True,
            optimizer=fast_opts,
            out=tmp_path / "dyn.csv",
        )
        frame = runner.dynamics(cfg)
        assert list(frame["p"]) == [0.0, 0.5, 1.0]
        start = frame.iloc[0]
        for label in ("123", "12", "none"):
            assert start[f"le_{label}"] == pytest.approx(0.5 * math.sin(math.pi / 3), abs=1e-6)
        middle = frame.iloc[1]
        assert middle["rle_123"] == pytest.approx(0.5 * 0.125 * math.sin(math.pi / 3), abs=1e-12)
        assert middle["le_123"] >= middle["rle_123"]

    def test_error_surface(self, runner, tmp_path, fast_opts):
        cfg = ErrorSurfaceConfig(
            kind="pf",
            labels=["123", "1"],
            alpha_steps=3,
            p_steps=2,
            optimizer=fast_opts,
            out=tmp_path / "eps.csv",
        )
        frame = runner.error_surface(cfg)
        assert len(frame) == 3 * 2 * 2
        assert (frame["epsilon"] <= 1e-3).all()
        assert (frame["epsilon"] >= 0).all()
        assert (frame.loc[frame["alpha"] == 0, "epsilon"] == 0).all()

    def test_alpha_beta_grid(self):
        cfg = ErrorSurfaceConfig(axes="alpha-beta", alpha_steps=2, beta_steps=3, p=0.2)
        assert cfg.grid() == [
            (0.0, 0.0, 0.2),
            (0.0, math.pi, 0.2),
            (0.0, 2 * math.pi, 0.2),
            (math.pi, 0.0, 0.2),
            (math.pi, math.pi, 0.2),
            (math.pi, 2 * math.pi, 0.2),
        ]

    def test_delta_b_surface(self, runner, tmp_path):
        cfg = DeltaBConfig(kind="dp", p=0.1, method="rle", alpha_steps=3, beta_steps=3, out=tmp_path / "db.csv")
        frame = runner.delta_b_surface(cfg)
        assert len(frame) == 9
        expected = frame[["e_L0", "e_L1"]].min(axis=1) - frame[["e_L02", "e_L12"]].max(axis=1)
        assert (frame["delta_b"] - expected).abs().max() < 1e-15


class TestClosedFormCheck:
    def _config(self):
        return ClosedFormCheckConfig(
            alphas=[math.pi / 3, math.pi / 2],
            ad_extra_alphas=[2 * math.pi / 3],
            betas=[0.0, math.pi / 2],
            p_values=[0.0, 0.3, 1.0],
        )

    def test_passes(self, runner):
        report = runner.check_closed_forms(self._config())
        assert report.passed
        checks = {(row["check"], row["kind"], row["label"]) for row in report.rows}
        assert ("p_c", "dp", "13") in checks
        assert ("p_cr", "ad", "12|13") in checks

    def test_failure_raises(self, runner, monkeypatch):
        original = experiments.closed_form_rle

        def shifted(*args):
            result = original(*args)
            return dataclasses.replace(result, value=result.value + 1e-3)

        monkeypatch.setattr(experiments, "closed_form_rle", shifted)
        with pytest.raises(ValidationFailure, match="rle:pf"):
            runner.check_closed_forms(self._config())
