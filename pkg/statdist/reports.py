"""Report emitters.

JSON is the canonical artifact: sorted keys, fixed indentation, no timestamps,
so identical runs produce identical bytes. CSV is a flat projection of the
tabular part of a report. Angles are always radians here.
"""

import csv
import io
import json
import math
import sys
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

from loguru import logger

from statdist import __version__
from statdist.config import RunConfig

DIST_HEADER = ("theta1", "theta2", "d_quadrature", "d_closed_form", "abs_diff")
COUNT_HEADER = ("n", "D", "D_over_sqrt_n")
SIMULATE_HEADER = (
    "n",
    "D_hat",
    "D_hat_over_sqrt_n",
    "D",
    "D_over_sqrt_n",
    "boundary_hits",
)
COVERAGE_HEADER = ("n", "theta_true", "coverage", "p_hat_mean", "p_hat_std", "p_std_expected")
HILBERT_HEADER = ("basis", "d_A", "d", "gap")
FISHER_HEADER = ("delta", "W", "I", "ratio")


def channels_header(count: int) -> tuple[str, ...]:
    return ("theta", "theta_hat", "abs_error", *(f"a{k}" for k in range(count)))


def envelope(config: RunConfig, result: dict[str, Any]) -> dict[str, Any]:
    """Wrap a command result with the resolved config and seed"""
    return {
        "command": config.command.value,
        "config": config.report_dict(),
        "seed": config.seed,
        "version": __version__,
        "result": result,
    }


def _finite(value: Any) -> Any:
    # JSON has no inf/nan
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _finite(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(v) for v in value]
    return value


def to_json(payload: dict[str, Any]) -> str:
    return json.dumps(_finite(payload), sort_keys=True, indent=2) + "\n"


def to_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if v is None else v for v in row])
    return buffer.getvalue()


def matrix_csv(ids: Sequence[str], values: Sequence[Sequence[float | None]]) -> str:
    return to_csv(ids, values)


def emit(text: str, out: str | None) -> None:
    """Write the artifact to `out`, or to stdout when no path is given"""
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    logger.info(f"Wrote {path}")
