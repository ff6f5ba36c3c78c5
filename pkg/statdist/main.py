#!/usr/bin/env python3

import json
import math
from argparse import SUPPRESS, ArgumentParser
from collections.abc import Callable, Sequence
from typing import Any

from dotenv import load_dotenv
from loguru import logger
from pydantic import BaseModel, ValidationError

from statdist import reports, utils
from statdist.channels import channel_similarity, coverage, decode, encode
from statdist.config import Command, OutputFormat, RunConfig, resolve
from statdist.distance import (
    check_proportionality,
    closed_form_distance,
    fisher_information,
    fisher_limit_ratio,
    outcome_pair,
    statistical_distance,
    wootters_measure,
)
from statdist.ensemble import (
    column_distance_matrix,
    coverage_study,
    default_sheet,
    empirical_convergence,
    load_sheet,
)
from statdist.errors import ConfigError, DimensionError, InputError, StatdistError
from statdist.finite_sample import distance_by_counting
from statdist.hilbert import (
    basis_from_pairs,
    basis_to_pairs,
    circular_basis,
    device_distance,
    hilbert_distance,
    optimize_basis,
    random_basis,
    random_state,
    real_state,
    standard_basis,
    state_from_pairs,
    state_to_pairs,
)
from statdist.laws import parse_law
from statdist.models import ChannelBank, MatrixMode, ResponseLaw

load_dotenv()


def _plain(model: BaseModel) -> dict[str, Any]:
    return json.loads(model.json())


def _law_summary(law: ResponseLaw) -> dict[str, Any]:
    return json.loads(law.json(exclude={"thetas", "probs"}))


def _angle(config: RunConfig, theta: float) -> str:
    if config.degrees:
        return f"{math.degrees(theta):.6f} deg"
    return f"{theta:.9f} rad"


def _pair(config: RunConfig) -> tuple[float, float] | None:
    if config.theta1 is None and config.theta2 is None:
        return None
    if config.theta1 is None or config.theta2 is None:
        raise ConfigError("theta1", "--theta1 and --theta2 go together")
    return config.theta1, config.theta2


def _render(config: RunConfig, result: dict[str, Any], header, rows) -> str:
    if config.format is OutputFormat.csv:
        return reports.to_csv(header, rows)
    return reports.to_json(reports.envelope(config, result))


@utils.log_duration("dist")
def cmd_dist(config: RunConfig) -> str:
    """Quadrature and closed-form distance plus the proportionality check"""
    law = parse_law(config.law)
    pairs = []
    if (pair := _pair(config)) is not None:
        pairs.append(pair)
    if config.grid:
        pairs.extend(zip(config.grid, config.grid[1:]))
    if not pairs:
        raise ConfigError(
            "theta1", "dist needs --theta1/--theta2 or a --grid of two or more angles"
        )

    rows = []
    entries = []
    for theta1, theta2 in pairs:
        quadrature = statistical_distance(law, theta1, theta2)
        closed = closed_form_distance(law, theta1, theta2)
        diff = abs(quadrature.value - closed.value)
        rows.append((theta1, theta2, quadrature.value, closed.value, diff))
        entries.append(
            {"quadrature": _plain(quadrature), "closed_form": _plain(closed), "abs_diff": diff}
        )
        logger.info(
            f"d({_angle(config, theta1)}, {_angle(config, theta2)}) = "
            f"{_angle(config, quadrature.value)}"
        )

    result = {
        "law": _law_summary(law),
        "pairs": entries,
        "proportionality": _plain(check_proportionality(law)),
    }
    return _render(config, result, reports.DIST_HEADER, rows)


@utils.log_duration("count")
def cmd_count(config: RunConfig) -> str:
    """Convergence table of (n, D, D/√n)"""
    law = parse_law(config.law)
    pair = _pair(config)
    if pair is None:
        raise ConfigError("theta1", "count needs --theta1 and --theta2")
    report = distance_by_counting(law, *pair, n_schedule=config.schedule, threads=config.threads)
    reference = closed_form_distance(law, *pair).value
    logger.info(
        f"D/sqrt(n) = {report.estimate:.6f} at n={report.points[-1].n}, d = {reference:.6f}"
    )

    rows = [(p.n, p.count, p.value) for p in report.points]
    result = {"law": _law_summary(law), "counting": _plain(report), "closed_form": reference}
    return _render(config, result, reports.COUNT_HEADER, rows)


@utils.log_duration("simulate")
def cmd_simulate(config: RunConfig) -> str:
    """Empirical convergence over the schedule, replicate coverage and column matrices"""
    law = parse_law(config.law)
    pair = _pair(config)
    theta_true = config.theta_true
    if theta_true is None and pair is not None:
        theta_true = (pair[0] + pair[1]) / 2
    if pair is None and theta_true is None and config.matrix is None:
        raise ConfigError("theta1", "simulate needs a theta pair, --theta-true or --matrix")

    result: dict[str, Any] = {"law": _law_summary(law)}
    points = study = matrix = None
    if pair is not None:
        points = empirical_convergence(
            law, *pair, config.schedule, config.seed, threads=config.threads
        )
        result["empirical"] = {
            "points": [_plain(p) for p in points],
            "estimate": points[-1].value,
            "closed_form": closed_form_distance(law, *pair).value,
        }
        logger.info(
            f"D_hat/sqrt(n) = {points[-1].value:.6f} at n={points[-1].n}, "
            f"analytic {points[-1].analytic_value:.6f}"
        )
    if theta_true is not None:
        seeds = [utils.derive_seed(config.seed, r) for r in range(config.replicates)]
        study = coverage_study(law, theta_true, config.n, seeds, threads=config.threads)
        result["coverage"] = _plain(study)
        logger.info(f"coverage of {_angle(config, theta_true)}: {study.coverage:.3f}")
    if config.matrix is not None:
        if config.sheet:
            sheet = load_sheet(config.sheet, law)
        else:
            sheet = default_sheet(config.columns, law)
        matrix = column_distance_matrix(
            sheet, MatrixMode(config.matrix), n=config.n, seed=config.seed, threads=config.threads
        )
        result["matrix"] = _plain(matrix)

    if config.format is OutputFormat.csv:
        if matrix is not None:
            return reports.matrix_csv(matrix.ids, matrix.values)
        if points is not None:
            rows = [
                (p.n, p.count, p.value, p.analytic_count, p.analytic_value, p.boundary_hits)
                for p in points
            ]
            return reports.to_csv(reports.SIMULATE_HEADER, rows)
        row = (
            study.n,
            study.theta_true,
            study.coverage,
            study.p_hat_mean,
            study.p_hat_std,
            study.p_std_expected,
        )
        return reports.to_csv(reports.COVERAGE_HEADER, [row])
    return reports.to_json(reports.envelope(config, result))


def _state_arg(text: str, name: str):
    try:
        return state_from_pairs(json.loads(text), normalize=True)
    except (json.JSONDecodeError, TypeError, ValueError) as e:
        raise ConfigError(name, f"cannot parse state {text!r}: {e}")


def _load_states(path: str):
    try:
        with open(path) as fh:
            data = json.load(fh)
        psi1 = state_from_pairs(data["psi1"], normalize=True)
        psi2 = state_from_pairs(data["psi2"], normalize=True)
        bases = {
            f"file{i}": basis_from_pairs(rows) for i, rows in enumerate(data.get("bases", []))
        }
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as e:
        raise InputError(f"cannot read states from {path}: {e}")
    return psi1, psi2, bases


@utils.log_duration("hilbert")
def cmd_hilbert(config: RunConfig) -> str:
    """Hilbert angle, d_A over a set of analyzers and the optimised analyzer"""
    bases = {}
    if config.states:
        psi1, psi2, bases = _load_states(config.states)
    elif config.psi1 is not None or config.psi2 is not None:
        if config.psi1 is None or config.psi2 is None:
            raise ConfigError("psi1", "--psi1 and --psi2 go together")
        psi1 = _state_arg(config.psi1, "psi1")
        psi2 = _state_arg(config.psi2, "psi2")
        if psi1.dim != psi2.dim:
            raise DimensionError(psi1.dim, psi2.dim)
    elif (pair := _pair(config)) is not None:
        psi1, psi2 = real_state(pair[0]), real_state(pair[1])
    else:
        psi1 = random_state(config.dim, utils.derive_seed(config.seed, 1))
        psi2 = random_state(config.dim, utils.derive_seed(config.seed, 2))

    dim = psi1.dim
    analyzers = {"standard": standard_basis(dim)}
    if dim == 2:
        analyzers["circular"] = circular_basis()
    analyzers.update(bases)
    for r in range(config.bases):
        analyzers[f"random{r}"] = random_basis(dim, utils.derive_seed(config.seed, 3, r))

    d = hilbert_distance(psi1, psi2)
    rows = []
    for name, basis in analyzers.items():
        d_a = device_distance(basis, psi1, psi2)
        rows.append((name, d_a, d, d - d_a))

    optimum = optimize_basis(
        psi1,
        psi2,
        restarts=config.restarts,
        seed=utils.derive_seed(config.seed, 4),
        threads=config.threads,
    )
    rows.append(("optimized", optimum.d_A_max, d, d - optimum.d_A_max))
    logger.info(f"d = {_angle(config, d)}, max d_A = {_angle(config, optimum.d_A_max)}")

    result = {
        "psi1": state_to_pairs(psi1),
        "psi2": state_to_pairs(psi2),
        "d": d,
        "analyzers": [{"basis": name, "d_A": d_a, "gap": gap} for name, d_a, _, gap in rows],
        "optimum": {
            "basis": basis_to_pairs(optimum.basis),
            "d_A_max": optimum.d_A_max,
            "analytic": optimum.analytic,
            "numeric": optimum.numeric,
            "converged": optimum.converged,
            "sweeps": optimum.sweeps,
            "restarts": optimum.restarts,
            "aligned_first": optimum.aligned_first,
            "aligned_second": optimum.aligned_second,
        },
    }
    return _render(config, result, reports.HILBERT_HEADER, rows)


@utils.log_duration("fisher")
def cmd_fisher(config: RunConfig) -> str:
    """W, I and the small-separation ratio W² / (Δθ²·I/4)"""
    law = parse_law(config.law)
    theta = config.theta
    information = fisher_information(law, theta)
    rows = []
    for delta in config.deltas:
        w = wootters_measure(outcome_pair(law, theta), outcome_pair(law, theta + delta))
        rows.append((delta, w, information, fisher_limit_ratio(law, theta, delta)))
    for delta, _, _, ratio in rows:
        logger.info(f"delta={delta:g} ratio={ratio:.9f}")

    result = {
        "law": _law_summary(law),
        "theta": theta,
        "fisher_information": information,
        "sweep": [{"delta": d, "W": w, "I": i, "ratio": r} for d, w, i, r in rows],
    }
    return _render(config, result, reports.FISHER_HEADER, rows)


@utils.log_duration("channels")
def cmd_channels(config: RunConfig) -> str:
    """Encode/decode round trip over the span and a similarity sweep"""
    bank = ChannelBank(count=config.channels, lo=config.lo, hi=config.hi, width=config.width)
    span = bank.hi - bank.lo
    rows = []
    for i in range(config.points):
        theta = bank.lo + span * (i + 0.5) / config.points
        activations = encode(bank, theta)
        theta_hat = decode(bank, activations)
        rows.append((theta, theta_hat, abs(theta_hat - theta), *activations.tolist()))
    max_error = max(row[2] for row in rows)
    logger.info(f"max round-trip error {max_error:.3e} over {config.points} points")

    origin = config.theta1 if config.theta1 is not None else float(bank.centers[bank.count // 2])
    reference = encode(bank, origin)
    _, edge = coverage(bank)
    similarity = []
    for j in range(26):
        delta = j * bank.spacing / 10
        if origin + delta >= edge:
            break
        similarity.append(
            {"delta": delta, "angle": channel_similarity(reference, encode(bank, origin + delta))}
        )

    result = {
        "bank": {
            "count": bank.count,
            "lo": bank.lo,
            "hi": bank.hi,
            "width": bank.width,
            "centers": bank.centers.tolist(),
        },
        "max_abs_error": max_error,
        "sweep": [
            {"theta": t, "theta_hat": th, "abs_error": e, "activations": list(a)}
            for t, th, e, *a in rows
        ],
        "similarity": similarity,
    }
    return _render(config, result, reports.channels_header(bank.count), rows)


COMMANDS: dict[Command, Callable[[RunConfig], str]] = {
    Command.dist: cmd_dist,
    Command.count: cmd_count,
    Command.simulate: cmd_simulate,
    Command.hilbert: cmd_hilbert,
    Command.fisher: cmd_fisher,
    Command.channels: cmd_channels,
}


def build_parser() -> ArgumentParser:
    # flags default to SUPPRESS so only explicitly given ones override config and env
    common = ArgumentParser(add_help=False, argument_default=SUPPRESS)
    common.add_argument("--seed", help="root seed of every random stream")
    common.add_argument("--out", help="output file (stdout if omitted)")
    common.add_argument("--format", choices=[f.value for f in OutputFormat])
    common.add_argument("--threads", help="worker threads")
    common.add_argument("--degrees", action="store_true", help="degrees in console output")
    common.add_argument("--config", help="flat key=value config file")

    law = ArgumentParser(add_help=False, argument_default=SUPPRESS)
    law.add_argument("--law", help="cos2, cos2:<w> or table:<path.csv>")

    pair = ArgumentParser(add_help=False, argument_default=SUPPRESS)
    pair.add_argument("--theta1", help="radians")
    pair.add_argument("--theta2", help="radians")

    parser = ArgumentParser(prog="statdist", description="Statistical distance toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, *parents: ArgumentParser) -> ArgumentParser:
        return sub.add_parser(
            name,
            parents=[common, *parents],
            argument_default=SUPPRESS,
            help=COMMANDS[Command(name)].__doc__,
        )

    dist = command("dist", law, pair)
    dist.add_argument("--grid", help="comma-separated angles, consecutive pairs")

    count = command("count", law, pair)
    count.add_argument("--schedule", help="comma-separated sample sizes, e.g. 1e2,1e4,1e6")

    simulate = command("simulate", law, pair)
    simulate.add_argument("--n", help="trials per record for coverage and matrices")
    simulate.add_argument("--schedule", help="sample sizes of the empirical convergence table")
    simulate.add_argument("--theta-true", help="orientation for the coverage study")
    simulate.add_argument("--replicates")
    simulate.add_argument("--matrix", choices=[m.value for m in MatrixMode])
    simulate.add_argument("--sheet", help="JSON column sheet")
    simulate.add_argument("--columns", help="columns of the default sheet")

    hilbert = command("hilbert", pair)
    hilbert.add_argument("--states", help="JSON with psi1, psi2 and optional bases")
    hilbert.add_argument("--psi1", help="inline state as JSON [[re, im], ...]")
    hilbert.add_argument("--psi2", help="inline state as JSON [[re, im], ...]")
    hilbert.add_argument("--dim", help="dimension of random states")
    hilbert.add_argument("--bases", help="number of random analyzers")
    hilbert.add_argument("--restarts")

    fisher = command("fisher", law)
    fisher.add_argument("--theta")
    fisher.add_argument("--deltas", help="comma-separated separations")

    channels = command("channels", pair)
    channels.add_argument("--channels", help="number of channels")
    channels.add_argument("--lo")
    channels.add_argument("--hi")
    channels.add_argument("--width")
    channels.add_argument("--points")

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = vars(parser.parse_args(argv))
    command = args.pop("command")
    config_file = args.pop("config", None)

    try:
        config = resolve(command, args, config_file)
        logger.info(f"Starting {command} (seed {config.seed})...")
        text = COMMANDS[config.command](config)
        reports.emit(text, config.out)
    except ValidationError as e:
        logger.error(f"Invalid input: {e}")
        return 2
    except StatdistError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except ValueError as e:
        logger.error(f"Invalid value: {e}")
        return InputError.exit_code

    return 0


if __name__ == "__main__":
    exit(main())
