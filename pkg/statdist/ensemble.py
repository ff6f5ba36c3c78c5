"""Seeded Monte Carlo of orientation-selective units.

A unit with preferred orientation θ fires ("yes") with probability p(θ). The
simulator draws yes-counts, inverts them into orientation estimates, and
repeats the counting construction with estimated instead of analytic
uncertainties. Every draw comes from a Philox stream keyed by the seed, so
results are pure functions of (inputs, seed).
"""

import json
import math
from collections.abc import Sequence
from pathlib import Path

import numpy as np
from loguru import logger

from statdist import DEFAULT_COLUMNS, INVERSION_CUTOFF
from statdist.distance import closed_form_distance
from statdist.errors import InputError, NonIdentifiableError, SingularityError
from statdist.finite_sample import (
    check_sample_size,
    check_schedule,
    count_distinguishable,
    greedy_chain,
    halfwidth,
    p_uncertainty,
)
from statdist.laws import check_angle, cosine_squared, is_monotone, probability
from statdist.models import (
    Column,
    ColumnSheet,
    CoverageReport,
    DistanceMatrix,
    EmpiricalDistance,
    LawKind,
    MatrixMode,
    ResponseLaw,
    Sampler,
    TrialRecord,
    UncertaintyInterval,
)
from statdist.numerics import bisect
from statdist.runner import Task, TaskError, run_all, unwrap
from statdist.utils import derive_seed, float_stream, generator


def draw_binomial(rng: np.random.Generator, n: int, p: float) -> tuple[int, Sampler]:
    """Binomial(n, p) draw: per-trial inversion below the cutoff, else a
    continuity-corrected Gaussian approximation clipped to [0, n]."""
    if n < INVERSION_CUTOFF:
        return int(np.count_nonzero(rng.random(n) < p)), Sampler.inversion
    mean = n * p
    sd = math.sqrt(mean * (1.0 - p))
    yes = math.floor(mean + sd * rng.standard_normal() + 0.5)
    return min(max(yes, 0), n), Sampler.gaussian


def run_trials(law: ResponseLaw, theta_true: float, n: int, seed: int, *stream: int) -> TrialRecord:
    check_sample_size(n)
    check_angle(law, theta_true)
    yes, sampler = draw_binomial(generator(seed, *stream), n, probability(law, theta_true))
    return TrialRecord(
        n=n, yes_count=yes, law=law, theta_true=theta_true, seed=seed, sampler=sampler
    )


def _invert(law: ResponseLaw, p_hat: float) -> tuple[float, bool]:
    """θ with p(θ) = p̂, clipped to the domain end when p̂ is out of reach"""
    lo, hi = law.domain
    p_lo, p_hi = probability(law, lo), probability(law, hi)
    decreasing = p_lo > p_hi
    top, bottom = (lo, hi) if decreasing else (hi, lo)
    if p_hat >= max(p_lo, p_hi):
        return top, True
    if p_hat <= min(p_lo, p_hi):
        return bottom, True

    if law.kind is not LawKind.tabulated:
        theta = math.acos(math.sqrt(p_hat)) / law.frequency
        return min(max(theta, lo), hi), False
    if decreasing:
        return bisect(lambda t: p_hat - probability(law, t), lo, hi), False
    return bisect(lambda t: probability(law, t) - p_hat, lo, hi), False


def estimate_theta(record: TrialRecord) -> UncertaintyInterval:
    """θ̂ = p⁻¹(yes/n) with its ±δθ evaluated at θ̂"""
    law = record.law
    if not is_monotone(law):
        raise NonIdentifiableError("law is not strictly monotone on its domain")
    theta_hat, boundary = _invert(law, record.p_hat)
    if boundary:
        logger.debug(f"p_hat={record.p_hat} clipped to the domain end theta={theta_hat}")
    return UncertaintyInterval(
        center=theta_hat,
        halfwidth=halfwidth(law, theta_hat, record.n),
        sample_size=record.n,
        boundary=boundary,
    )


def _estimated_width(law: ResponseLaw, n: int, seed: int):
    def width(theta: float) -> float:
        interval = estimate_theta(run_trials(law, theta, n, seed, float_stream(theta)))
        if interval.halfwidth is None:
            raise SingularityError(interval.center, "uninformative estimated interval")
        return interval.halfwidth

    return width


def empirical_distance(
    law: ResponseLaw, theta1: float, theta2: float, n: int, seed: int
) -> EmpiricalDistance:
    """D̂/√n from greedy packing with halfwidths taken at simulated estimates.

    Each candidate orientation gets its own record, drawn from the stream keyed
    by that orientation, so the packing is deterministic in (inputs, seed).
    """
    check_sample_size(n)
    if not is_monotone(law):
        raise NonIdentifiableError("law is not strictly monotone on its domain")
    analytic_count = count_distinguishable(law, theta1, theta2, n)
    if theta1 == theta2:
        return EmpiricalDistance(
            n=n, seed=seed, count=0, value=0.0, analytic_count=0, analytic_value=0.0
        )

    hi = max(theta1, theta2)
    width = _estimated_width(law, n, seed)
    chain = [t for t in greedy_chain(law, theta1, theta2, n, width) if t < hi]
    boundary_hits = sum(
        estimate_theta(run_trials(law, t, n, seed, float_stream(t))).boundary for t in chain
    )
    if boundary_hits:
        logger.warning(f"{boundary_hits} chain estimates clipped to a domain end")

    return EmpiricalDistance(
        n=n,
        seed=seed,
        count=len(chain),
        value=len(chain) / math.sqrt(n),
        analytic_count=analytic_count,
        analytic_value=analytic_count / math.sqrt(n),
        boundary_hits=boundary_hits,
    )


def empirical_convergence(
    law: ResponseLaw,
    theta1: float,
    theta2: float,
    n_schedule: Sequence[int],
    seed: int,
    threads: int = 1,
) -> list[EmpiricalDistance]:
    """empirical_distance at every n of a strictly increasing schedule"""
    schedule = check_schedule(n_schedule)
    tasks = [
        Task(f"empirical n={n}", empirical_distance, (law, theta1, theta2, n, seed))
        for n in schedule
    ]
    points = unwrap(run_all(tasks, threads))
    for point in points:
        logger.debug(f"n={point.n} D_hat={point.count} analytic D={point.analytic_count}")
    return points


def _replicate(law: ResponseLaw, theta_true: float, n: int, seed: int):
    record = run_trials(law, theta_true, n, seed)
    return record.p_hat, estimate_theta(record)


def coverage_study(
    law: ResponseLaw,
    theta_true: float,
    n: int,
    seeds: Sequence[int],
    threads: int = 1,
) -> CoverageReport:
    """Replicate spread of p̂ against √(p(1−p)/n) and coverage of θ_true by ±δθ"""
    if len(seeds) < 2:
        raise InputError("coverage study needs at least 2 replicate seeds")
    tasks = [Task(f"replicate seed={s}", _replicate, (law, theta_true, n, s)) for s in seeds]
    results = unwrap(run_all(tasks, threads))

    p_hats = np.array([p_hat for p_hat, _ in results])
    covered = sum(
        1
        for _, interval in results
        if interval.informative and abs(interval.center - theta_true) <= interval.halfwidth
    )
    p_true = probability(law, theta_true)
    return CoverageReport(
        theta_true=theta_true,
        n=n,
        replicates=len(seeds),
        p_true=p_true,
        p_hat_mean=float(p_hats.mean()),
        p_hat_std=float(p_hats.std(ddof=1)),
        p_std_expected=p_uncertainty(p_true, n),
        coverage=covered / len(seeds),
        boundary_hits=sum(interval.boundary for _, interval in results),
    )


def default_sheet(count: int = DEFAULT_COLUMNS, law: ResponseLaw | None = None) -> ColumnSheet:
    """`count` columns uniformly spaced from 0 in steps of (π/2)/count"""
    if count < 2:
        raise InputError(f"a sheet needs at least 2 columns, got {count}")
    law = law or cosine_squared()
    step = (math.pi / 2) / count
    width = len(str(count - 1))
    columns = [Column(id=f"c{k:0{width}d}", theta=k * step) for k in range(count)]
    return ColumnSheet(columns=columns, law=law)


def load_sheet(path: str | Path, law: ResponseLaw) -> ColumnSheet:
    """JSON document `{"columns": [{"id": ..., "theta": ...}, ...]}`"""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read column sheet {path}: {e}")
    if not isinstance(data, dict) or not isinstance(data.get("columns"), list):
        raise InputError(f"column sheet {path} has no 'columns' list")
    return ColumnSheet(columns=data["columns"], law=law)


def _pair_distance(
    law: ResponseLaw, theta1: float, theta2: float, mode: MatrixMode, n: int, seed: int
) -> float:
    if theta1 == theta2:
        return 0.0
    if mode is MatrixMode.analytic:
        return closed_form_distance(law, theta1, theta2).value
    return empirical_distance(law, theta1, theta2, n, seed).value


def column_distance_matrix(
    sheet: ColumnSheet,
    mode: MatrixMode = MatrixMode.analytic,
    n: int | None = None,
    seed: int = 0,
    threads: int = 1,
) -> DistanceMatrix:
    """Pairwise statistical distances between preferred orientations.

    Symmetric with a zero diagonal; a failed entry is left as None and listed
    in `failed` with the error text.
    """
    columns = sheet.columns
    if len(columns) < 2:
        raise InputError(f"a distance matrix needs at least 2 columns, got {len(columns)}")
    if mode is MatrixMode.empirical:
        if n is None:
            raise InputError("empirical matrix needs a sample size")
        check_sample_size(n)

    pairs = [(i, j) for i in range(len(columns)) for j in range(i + 1, len(columns))]
    tasks = [
        Task(
            f"{columns[i].id}-{columns[j].id}",
            _pair_distance,
            (sheet.law, columns[i].theta, columns[j].theta, mode, n, derive_seed(seed, i, j)),
        )
        for i, j in pairs
    ]
    results = run_all(tasks, threads)

    size = len(columns)
    values: list[list[float | None]] = [[0.0] * size for _ in range(size)]
    failed = []
    for (i, j), result in zip(pairs, results):
        if isinstance(result, BaseException):
            error = result.error if isinstance(result, TaskError) else result
            failed.append((columns[i].id, columns[j].id, str(error)))
            values[i][j] = values[j][i] = None
        else:
            values[i][j] = values[j][i] = result
    if failed:
        logger.warning(f"{len(failed)} of {len(pairs)} matrix entries failed")

    return DistanceMatrix(ids=[c.id for c in columns], values=values, mode=mode, failed=failed)
