"""Output helpers: file naming, content hashes, binomial intervals and CSV emission"""

import hashlib
import json
import pathlib
import re
from typing import Any, Dict, Tuple

import pandas as pd
from scipy.stats import binomtest

FLOAT_FORMAT = "%.15g"


def sanitize_filename(filename: str) -> str:
    """
    Sanitize a run description to be used as a filename.

    Args:
        filename: The run description to sanitize

    Returns:
        A filename safe for filesystem use
    """
    if not filename:
        return "run"

    sanitized = re.sub(r'[<>:"|?*\\/\s]', "_", filename)
    sanitized = re.sub(r"_+", "_", sanitized).strip("_.")
    if not sanitized:
        return "run"
    return sanitized[:120]


def content_hash(body: str) -> str:
    """Git blob hash of a text body"""
    data = body.encode("utf-8")
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> Tuple[float, float]:
    """Wilson score interval for a binomial proportion"""
    if trials <= 0:
        return 0.0, 1.0
    ci = binomtest(successes, trials).proportion_ci(confidence_level=confidence, method="wilson")
    return float(ci.low), float(ci.high)


def frame_to_csv(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def write_results(path: pathlib.Path, frame: pd.DataFrame, header: Dict[str, Any]) -> str:
    """Write a CSV with a '#'-prefixed JSON header line; returns the body hash"""
    body = frame_to_csv(frame)
    digest = content_hash(body)
    meta = {**header, "content_hash": digest}
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write("# " + json.dumps(meta, sort_keys=True) + "\n")
            f.write(body)
    except OSError as e:
        raise OSError(f"Could not write results to {path}: {e}") from e
    return digest


def read_results(path: pathlib.Path) -> Tuple[Dict[str, Any], pd.DataFrame]:
    """Header mapping and table of a file produced by write_results"""
    with open(path, "r", encoding="utf-8") as f:
        first = f.readline()
        header = json.loads(first[1:].strip()) if first.startswith("#") else {}
        frame = pd.read_csv(f)
    return header, frame
