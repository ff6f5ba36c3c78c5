"""Finite-sample uncertainty and the counting definition of statistical distance.

n trials of a yes/no outcome pin p down to δp = √(p(1−p)/n), which pins θ down
to δθ = δp / |dp/dθ|. Two orientations are distinguishable in n trials when
their ±δθ regions do not overlap; the statistical distance is the limit of
D/√n where D counts a maximal chain of mutually distinguishable intermediates.
"""

import math
from collections.abc import Callable, Sequence

from loguru import logger

from statdist import BISECT_TOL, CONFIDENCE_MULTIPLIER, DEFAULT_SCHEDULE
from statdist.errors import InputError, NonIdentifiableError, SingularityError
from statdist.laws import bernoulli_variance, check_angle, slope
from statdist.models import CountingPoint, CountingReport, ResponseLaw, UncertaintyInterval
from statdist.numerics import bisect
from statdist.runner import Task, run_all, unwrap


def check_sample_size(n: int) -> int:
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise InputError(f"sample size must be a positive integer, got {n!r}")
    return n


def p_uncertainty(p: float, n: int) -> float:
    check_sample_size(n)
    if not 0.0 <= p <= 1.0:
        raise InputError(f"probability {p!r} outside [0, 1]")
    return math.sqrt(p * (1.0 - p) / n)


def halfwidth(law: ResponseLaw, theta: float, n: int) -> float | None:
    """δθ at θ, or None where the slope vanishes but p is not degenerate.

    p ∈ {0, 1} gives δθ = 0: the Gaussian error picture has no spread there.
    """
    variance = bernoulli_variance(law, theta)
    if variance <= 0.0:
        return 0.0
    dp = abs(slope(law, theta).value)
    if dp == 0.0:
        return None
    return math.sqrt(variance / n) / dp


def theta_uncertainty(law: ResponseLaw, theta: float, n: int) -> UncertaintyInterval:
    check_sample_size(n)
    check_angle(law, theta)
    return UncertaintyInterval(center=theta, halfwidth=halfwidth(law, theta, n), sample_size=n)


def distinguishable(a: UncertaintyInterval, b: UncertaintyInterval) -> bool:
    if a.sample_size != b.sample_size:
        raise InputError(
            f"intervals from different sample sizes ({a.sample_size}, {b.sample_size})"
        )
    if not (a.informative and b.informative):
        return False
    return abs(a.center - b.center) >= CONFIDENCE_MULTIPLIER * (a.halfwidth + b.halfwidth)


def _informative_halfwidth(law: ResponseLaw, theta: float, n: int) -> float:
    h = halfwidth(law, theta, n)
    if h is None:
        raise SingularityError(theta, "uninformative interval (zero slope)")
    return h


def greedy_chain(
    law: ResponseLaw,
    theta1: float,
    theta2: float,
    n: int,
    width: Callable[[float], float] | None = None,
) -> list[float]:
    """Leftmost chain of mutually distinguishable points after min(θ1, θ2).

    Each point is the smallest θ' with |θ' − θ| ≥ δθ + δθ' from its
    predecessor, found by bisection on that gap; the chain stops once the
    next point would pass max(θ1, θ2). `width(θ)` overrides the analytic
    halfwidth (the simulator passes estimated ones).
    """
    check_sample_size(n)
    lo, hi = min(theta1, theta2), max(theta1, theta2)
    check_angle(law, lo)
    check_angle(law, hi)
    if width is None:
        def width(t: float) -> float:
            return _informative_halfwidth(law, t, n)

    chain: list[float] = []
    current, h_current = lo, width(lo)

    def gap(t: float) -> float:
        if t <= current:
            return -math.inf
        return (t - current) - CONFIDENCE_MULTIPLIER * (h_current + width(t))

    while current < hi and gap(hi) >= 0:
        nxt = bisect(gap, current, hi)
        if nxt - current <= 2 * BISECT_TOL:
            raise NonIdentifiableError(f"p(1-p) = 0 on a segment starting at theta={current!r}")
        chain.append(nxt)
        current, h_current = nxt, width(nxt)
    return chain


def count_distinguishable(law: ResponseLaw, theta1: float, theta2: float, n: int) -> int:
    """D: number of greedy chain points strictly between θ1 and θ2.

    Greedy is optimal for interval packing on a line when the gap function is
    monotone, which holds for monotone laws.
    """
    if theta1 == theta2:
        check_angle(law, theta1)
        return 0
    hi = max(theta1, theta2)
    return sum(1 for t in greedy_chain(law, theta1, theta2, n) if t < hi)


def richardson(points: Sequence[CountingPoint]) -> float | None:
    """Two-point extrapolation of D/√n assuming an error term ∝ 1/√n"""
    if len(points) < 2:
        return None
    a, b = points[-2], points[-1]
    return (b.count - a.count) / (math.sqrt(b.n) - math.sqrt(a.n))


def check_schedule(n_schedule: Sequence[int]) -> list[int]:
    schedule = [check_sample_size(n) for n in n_schedule]
    if not schedule:
        raise InputError("empty sample-size schedule")
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise InputError(f"sample-size schedule must be strictly increasing, got {schedule}")
    return schedule


def distance_by_counting(
    law: ResponseLaw,
    theta1: float,
    theta2: float,
    n_schedule: Sequence[int] = DEFAULT_SCHEDULE,
    threads: int = 1,
) -> CountingReport:
    schedule = check_schedule(n_schedule)
    tasks = [
        Task(f"count n={n}", count_distinguishable, (law, theta1, theta2, n)) for n in schedule
    ]
    counts = unwrap(run_all(tasks, threads))

    points = [
        CountingPoint(n=n, count=count, value=count / math.sqrt(n))
        for n, count in zip(schedule, counts)
    ]
    for point in points:
        logger.debug(f"n={point.n} D={point.count} D/sqrt(n)={point.value:.6f}")

    return CountingReport(
        theta1=theta1,
        theta2=theta2,
        points=points,
        estimate=points[-1].value,
        richardson=richardson(points),
    )
