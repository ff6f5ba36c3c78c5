"""Statistical distance from a response law.

d(θ1, θ2) = ∫ |dp/dθ| / (2√(p(1−p))) dθ, which telescopes to the change in
arcsin√p over each monotone stretch of p. The Wootters measure W is the
Bhattacharyya angle between outcome distributions; for nearby orientations
W² → (Δθ²/4)·I with I the per-trial Fisher information.
"""

import math

import numpy as np
from loguru import logger

from statdist import MAX_MONOTONE_SEGMENTS, QUAD_TOL
from statdist.errors import (
    DimensionError,
    InputError,
    NonIdentifiableError,
    SegmentationError,
    SingularityError,
)
from statdist.laws import (
    bernoulli_variance,
    breakpoints,
    check_angle,
    probability,
    slope,
)
from statdist.models import (
    DiscreteDistribution,
    DistanceMethod,
    DistanceReport,
    LawKind,
    ProportionalityResult,
    QuadratureDiagnostics,
    ResponseLaw,
)
from statdist.numerics import adaptive_simpson, angle_between, integrate

PROPORTIONALITY_GRID = 1e-3
PROPORTIONALITY_TOL = 1e-6


def _pieces(law: ResponseLaw, theta1: float, theta2: float) -> list[tuple[float, float]]:
    lo, hi = min(theta1, theta2), max(theta1, theta2)
    edges = [lo, *breakpoints(law, lo, hi), hi]
    return list(zip(edges, edges[1:]))


def _segment_slope(law: ResponseLaw, a: float, b: float) -> float:
    """Exact slope of the linear piece of a tabulated law containing (a, b)"""
    return (probability(law, b) - probability(law, a)) / (b - a)


def _integrand(law: ResponseLaw, a: float, b: float, seen: list[float]):
    if law.kind is LawKind.tabulated:
        pa, pb = probability(law, a), probability(law, b)
        if pa == pb and pa in (0.0, 1.0):
            raise NonIdentifiableError(f"p(1-p) = 0 on [{a!r}, {b!r}]")
        piece_slope = abs(_segment_slope(law, a, b))
    else:
        piece_slope = None

    def f(theta: float) -> float:
        variance = bernoulli_variance(law, theta)
        if variance <= 0.0:
            value = 0.0
        else:
            dp = piece_slope if piece_slope is not None else abs(slope(law, theta).value)
            value = dp / (2.0 * math.sqrt(variance))
        seen.append(value)
        return value

    return f


def statistical_distance(law: ResponseLaw, theta1: float, theta2: float) -> DistanceReport:
    check_angle(law, theta1)
    check_angle(law, theta2)
    pieces = _pieces(law, theta1, theta2)
    total = abs(theta2 - theta1)

    seen: list[float] = []
    value = error = 0.0
    evaluations = 0
    for a, b in pieces:
        if a == b:
            continue
        q = integrate(_integrand(law, a, b, seen), a, b, tol=QUAD_TOL * (b - a) / total)
        value += q.value
        error += q.error
        evaluations += q.evaluations

    return DistanceReport(
        value=max(value, 0.0),
        method=DistanceMethod.quadrature,
        theta1=theta1,
        theta2=theta2,
        diagnostics=QuadratureDiagnostics(
            error_estimate=error,
            integrand_min=min(seen) if seen else None,
            integrand_max=max(seen) if seen else None,
            evaluations=evaluations,
            segments=len(pieces),
        ),
    )


def monotone_segments(law: ResponseLaw, theta1: float, theta2: float) -> list[tuple[float, float]]:
    """Split [θ1, θ2] into stretches on which p is monotone"""
    lo, hi = min(theta1, theta2), max(theta1, theta2)
    if law.kind is not LawKind.tabulated:
        segments = _pieces(law, lo, hi)
    else:
        edges = [lo]
        direction = 0
        for a, b in _pieces(law, lo, hi):
            step = np.sign(probability(law, b) - probability(law, a))
            if step == 0:
                continue
            if direction and step != direction:
                edges.append(a)
            direction = step
        edges.append(hi)
        segments = list(zip(edges, edges[1:]))

    if len(segments) > MAX_MONOTONE_SEGMENTS:
        raise SegmentationError(len(segments))
    return segments


def _arcsine_root(law: ResponseLaw, theta: float) -> float:
    """arcsin√p(θ), via atan2 so neither end loses precision"""
    if law.kind is LawKind.tabulated:
        p = probability(law, theta)
        return math.atan2(math.sqrt(p), math.sqrt(1.0 - p))
    check_angle(law, theta)
    wt = law.frequency * theta
    return math.atan2(abs(math.cos(wt)), abs(math.sin(wt)))


def closed_form_distance(law: ResponseLaw, theta1: float, theta2: float) -> DistanceReport:
    check_angle(law, theta1)
    check_angle(law, theta2)
    try:
        segments = monotone_segments(law, theta1, theta2)
    except SegmentationError as e:
        logger.warning(f"Closed form unavailable ({e}), falling back to quadrature")
        report = statistical_distance(law, theta1, theta2)
        return report.copy(update={"fallback": True})

    value = math.fsum(abs(_arcsine_root(law, b) - _arcsine_root(law, a)) for a, b in segments)
    return DistanceReport(
        value=value, method=DistanceMethod.closed_form, theta1=theta1, theta2=theta2
    )


def check_proportionality(law: ResponseLaw) -> ProportionalityResult:
    """Is |dp/dθ| / √(p(1−p)) constant over the domain interior?

    The constant reported is half that ratio, i.e. statistical distance per
    radian of orientation.
    """
    lo, hi = law.domain
    grid = lo + PROPORTIONALITY_GRID * np.arange(1, int(law.span / PROPORTIONALITY_GRID) + 1)
    grid = grid[grid < hi]

    ratios = []
    excluded = 0
    for theta in grid:
        variance = bernoulli_variance(law, float(theta))
        if variance <= 0.0:
            excluded += 1
            continue
        ratios.append(abs(slope(law, float(theta)).value) / math.sqrt(variance))
    if excluded:
        logger.warning(f"{excluded} grid points with p(1-p) = 0 excluded from the ratio")
    if not ratios:
        raise NonIdentifiableError("p(1-p) = 0 on every grid point")

    r = np.asarray(ratios)
    mean = float(r.mean())
    if mean == 0.0:
        return ProportionalityResult(
            proportional=True, constant=0.0, samples=len(ratios), excluded=excluded, spread=0.0
        )
    spread = float(np.max(np.abs(r - mean)) / mean)
    proportional = spread < PROPORTIONALITY_TOL
    return ProportionalityResult(
        proportional=proportional,
        constant=mean / 2 if proportional else None,
        samples=len(ratios),
        excluded=excluded,
        spread=spread,
    )


def wootters_measure(p: DiscreteDistribution, q: DiscreteDistribution) -> float:
    """Bhattacharyya angle arccos Σ√(PᵢQᵢ)"""
    if len(p.probabilities) != len(q.probabilities):
        raise DimensionError(len(p.probabilities), len(q.probabilities))
    u = np.sqrt(np.asarray(p.probabilities))
    v = np.sqrt(np.asarray(q.probabilities))
    return angle_between(u, v)


def outcome_pair(law: ResponseLaw, theta: float) -> DiscreteDistribution:
    return DiscreteDistribution.bernoulli(probability(law, theta))


def fisher_information(law: ResponseLaw, theta: float, n: int = 1) -> float:
    """(dp/dθ)² / (p(1−p)) per trial; n independent trials carry n times that"""
    variance = bernoulli_variance(law, theta)
    if variance <= 0.0:
        raise SingularityError(theta, "p(1-p) = 0")
    return n * slope(law, theta).value ** 2 / variance


def fisher_limit_ratio(law: ResponseLaw, theta: float, delta: float) -> float:
    """W(θ, θ+Δθ)² / ((Δθ²/4)·I(θ)), which tends to 1 as Δθ → 0"""
    if delta == 0:
        raise InputError("delta must be non-zero")
    w = wootters_measure(outcome_pair(law, theta), outcome_pair(law, theta + delta))
    information = fisher_information(law, theta)
    if information == 0.0:
        raise SingularityError(theta, "zero Fisher information")
    return w * w / (delta * delta / 4 * information)


def _nth_derivative(law: ResponseLaw, order: int, a: float, b: float):
    if law.kind is LawKind.tabulated:
        if order > 1:
            raise InputError("higher derivatives need an analytic law")
        piece_slope = _segment_slope(law, a, b)
        return lambda theta: piece_slope
    w = law.frequency

    def f(theta: float) -> float:
        # cos²(wθ) = (1 + cos 2wθ) / 2
        return (2 * w) ** order * math.cos(2 * w * theta + order * math.pi / 2) / 2

    return f


def derivative_integral(law: ResponseLaw, order: int = 1) -> float:
    """∫ p⁽ⁿ⁾(θ) dθ over the law's domain, zero when the domain is a full period"""
    if order < 1:
        raise InputError(f"order must be >= 1, got {order}")
    lo, hi = law.domain
    return math.fsum(
        adaptive_simpson(
            _nth_derivative(law, order, a, b), a, b, tol=QUAD_TOL * (b - a) / law.span
        ).value
        for a, b in _pieces(law, lo, hi)
    )
