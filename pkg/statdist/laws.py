import csv
import math
from collections.abc import Sequence
from pathlib import Path
from typing import NamedTuple

import numpy as np
from loguru import logger

from statdist.errors import ConfigError, DomainError, TableError
from statdist.models import LawKind, ResponseLaw


class Slope(NamedTuple):
    value: float
    one_sided: bool = False


def cosine_squared(
    frequency: float = 1.0, domain: tuple[float, float] | None = None
) -> ResponseLaw:
    """p(θ) = cos²(w·θ), on its monotone range unless `domain` says otherwise"""
    if domain is None:
        domain = (0.0, math.pi / (2 * frequency))
    kind = LawKind.cos2 if frequency == 1.0 else LawKind.cos2_scaled
    return ResponseLaw(kind=kind, frequency=frequency, domain=domain)


def tabulated(
    thetas: Sequence[float], probs: Sequence[float], source: str | None = None
) -> ResponseLaw:
    thetas = tuple(float(t) for t in thetas)
    return ResponseLaw(
        kind=LawKind.tabulated,
        domain=(thetas[0], thetas[-1]) if thetas else (0.0, 0.0),
        thetas=thetas,
        probs=tuple(float(p) for p in probs),
        source=source,
    )


def constant_law(p: float, lo: float = 0.0, hi: float = math.pi / 2) -> ResponseLaw:
    return tabulated([lo, (lo + hi) / 2, hi], [p, p, p])


def load_table(path: str | Path) -> ResponseLaw:
    """Two-column CSV with header `theta,p`, radians, strictly increasing θ"""
    path = Path(path)
    thetas: list[float] = []
    probs: list[float] = []
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != ["theta", "p"]:
                raise TableError(str(path), 1, f"expected header 'theta,p', got {header}")
            for row_number, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != 2:
                    raise TableError(str(path), row_number, f"expected 2 columns, got {len(row)}")
                try:
                    theta, p = float(row[0]), float(row[1])
                except ValueError:
                    raise TableError(str(path), row_number, f"not a number: {row}")
                if not (math.isfinite(theta) and math.isfinite(p)):
                    raise TableError(str(path), row_number, "non-finite value")
                if not 0.0 <= p <= 1.0:
                    raise TableError(str(path), row_number, f"p={p} outside [0, 1]")
                if thetas and theta <= thetas[-1]:
                    raise TableError(
                        str(path),
                        row_number,
                        f"theta={theta} not greater than previous {thetas[-1]}",
                    )
                thetas.append(theta)
                probs.append(p)
    except OSError as e:
        raise TableError(str(path), 0, f"cannot read: {e}")

    if len(thetas) < 3:
        raise TableError(str(path), len(thetas) + 1, "need at least 3 samples")

    logger.info(f"Loaded tabulated law with {len(thetas)} samples from {path}")
    return tabulated(thetas, probs, source=str(path))


def parse_law(spec: str) -> ResponseLaw:
    """`cos2`, `cos2:<w>` or `table:<path>`"""
    name, _, arg = spec.partition(":")
    if name == "cos2":
        if not arg:
            return cosine_squared()
        try:
            frequency = float(arg)
        except ValueError:
            raise ConfigError("law", f"bad frequency in {spec!r}")
        if not frequency > 0:
            raise ConfigError("law", f"frequency must be positive in {spec!r}")
        return cosine_squared(frequency)
    if name == "table" and arg:
        return load_table(arg)
    raise ConfigError("law", f"unknown law spec {spec!r}")


def check_angle(law: ResponseLaw, theta: float) -> float:
    lo, hi = law.domain
    if not (math.isfinite(theta) and lo <= theta <= hi):
        raise DomainError(theta, lo, hi)
    return theta


def probability(law: ResponseLaw, theta: float) -> float:
    check_angle(law, theta)
    if law.kind is LawKind.tabulated:
        xs, ps = law.table()
        return float(np.interp(theta, xs, ps))
    return math.cos(law.frequency * theta) ** 2


def slope(law: ResponseLaw, theta: float) -> Slope:
    """dp/dθ, flagged when a tabulated law needs a one-sided difference"""
    check_angle(law, theta)
    if law.kind is not LawKind.tabulated:
        w = law.frequency
        return Slope(-w * math.sin(2 * w * theta))

    lo, hi = law.domain
    h = 1e-6 * law.span
    xs, ps = law.table()
    if theta - h < lo:
        return Slope(float(np.interp(theta + h, xs, ps) - np.interp(theta, xs, ps)) / h, True)
    if theta + h > hi:
        return Slope(float(np.interp(theta, xs, ps) - np.interp(theta - h, xs, ps)) / h, True)
    return Slope(float(np.interp(theta + h, xs, ps) - np.interp(theta - h, xs, ps)) / (2 * h))


def derivative(law: ResponseLaw, theta: float) -> float:
    return slope(law, theta).value


def bernoulli_variance(law: ResponseLaw, theta: float) -> float:
    """p(1 - p), in the sin(2wθ)/2 form for cosine laws so it keeps precision near 0 and 1"""
    if law.kind is LawKind.tabulated:
        p = probability(law, theta)
        return p * (1.0 - p)
    check_angle(law, theta)
    half = math.sin(2 * law.frequency * theta) / 2
    return half * half


def monotone_range(law: ResponseLaw) -> float:
    """Upper end of the first monotone stretch of a cosine law"""
    return math.pi / (2 * law.frequency)


def is_monotone(law: ResponseLaw) -> bool:
    """Strictly monotone over the whole domain, so θ is identifiable from p"""
    if law.kind is LawKind.tabulated:
        diffs = np.diff(law.table()[1])
        return bool(np.all(diffs > 0) or np.all(diffs < 0))
    return law.domain[1] <= monotone_range(law) + 1e-12


def breakpoints(law: ResponseLaw, theta1: float, theta2: float) -> list[float]:
    """Points strictly inside (θ1, θ2) where the law is not smooth or turns"""
    lo, hi = min(theta1, theta2), max(theta1, theta2)
    if law.kind is LawKind.tabulated:
        return [t for t in law.thetas if lo < t < hi]
    turn = monotone_range(law)
    return [turn] if lo < turn < hi else []
