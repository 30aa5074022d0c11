"""Command-line front end: single solves, grid benchmarks, Pareto covers.

All output files are plain CSV/JSON with shortest-roundtrip float formatting,
so repeated runs with identical inputs are byte-identical.  Exit codes:
0 on success (a solve that ends critical), 1 on solver contract failures,
2 on usage errors.

The environment variable ``NSMOP_SEED`` is reserved for future use; every
algorithm in this package is deterministic and ignores it.
"""
from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import problems
from .core import SolverConfig
from .descent import CRITICAL, solve, solve_eps_decreasing
from .subdivision import Box, pareto_cover

USAGE_ERROR = 2
SOLVER_ERROR = 1


def _fmt(value: float) -> str:
    return repr(float(value))


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(cell if isinstance(cell, str) else _fmt(cell) for cell in row))
    path.write_text("\n".join(lines) + "\n")


def config_digest(config: SolverConfig) -> str:
    payload = json.dumps(dataclasses.asdict(config), sort_keys=True, default=repr)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats, got {text!r}") from exc


def _build_config(args) -> SolverConfig:
    schedule = tuple(args.eps_schedule) if getattr(args, "eps_schedule", None) else None
    t0 = args.t0
    if isinstance(t0, str) and t0 != "adaptive":
        t0 = float(t0)
    return SolverConfig(
        epsilon=args.eps,
        delta=args.delta,
        armijo_c=args.c,
        t0=t0,
        max_outer_iterations=args.max_iter,
        epsilon_schedule=schedule,
    )


def _run_record(problem, start, config, run) -> dict:
    final = run.final
    fresh = problem.fresh_clone()
    return {
        "problem": problem.name,
        "start": [float(v) for v in start],
        "config_digest": config_digest(config),
        "stop_reason": run.stop_reason,
        "final_iterate": [float(v) for v in final],
        "final_objectives": [float(v) for v in fresh.evaluate(final)],
        "counters": {
            "value_evals": run.counters.value_evals,
            "subgrad_evals": run.counters.subgrad_evals,
            "outer_iterations": run.counters.outer_iterations,
        },
    }


def cmd_solve(args) -> int:
    problem = problems.find_problem(args.problem)
    start = np.array(_parse_floats(args.start))
    if start.shape[0] != problem.dimension:
        print(f"error: start point must have {problem.dimension} coordinates", file=sys.stderr)
        return USAGE_ERROR
    config = _build_config(args)

    if config.epsilon_schedule is not None:
        run = solve_eps_decreasing(problem, start, config)
    else:
        run = solve(problem, start, config)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    scorer = problem.fresh_clone()
    n, k = problem.dimension, problem.k
    header = (
        ["j"]
        + [f"x{i+1}" for i in range(n)]
        + [f"f{i+1}" for i in range(k)]
        + ["vnorm", "tbar"]
    )
    rows = []
    for j, point in enumerate(run.iterates):
        fvals = scorer.evaluate(point)
        vnorm = (
            _fmt(float(np.linalg.norm(run.directions[j])))
            if j < len(run.directions)
            else ""
        )
        tbar = _fmt(run.step_lengths[j]) if j < len(run.step_lengths) else ""
        rows.append(
            [str(j + 1)]
            + [_fmt(v) for v in point]
            + [_fmt(v) for v in fvals]
            + [vnorm, tbar]
        )
    _write_csv(out / "trace.csv", header, rows)

    record = _run_record(problem, start, config, run)
    (out / "run.json").write_text(json.dumps(record, sort_keys=True, indent=2) + "\n")

    print(f"{problem.name}: {run.stop_reason} after {len(run.step_lengths)} steps")
    return 0 if run.stop_reason == CRITICAL else SOLVER_ERROR


def _bench_entries(selector: str) -> list:
    entries = problems.catalog()
    if selector == "all":
        return entries
    wanted = {part.strip().lower() for part in selector.split(",")}
    chosen = [e for e in entries if str(e.number) in wanted or e.name in wanted]
    if not chosen:
        raise KeyError(f"no benchmark problems match {selector!r}")
    return chosen


def cmd_bench(args) -> int:
    try:
        entries = _bench_entries(args.problems)
    except KeyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    config = _build_config(args)
    if args.mode == "eps-decreasing":
        if config.epsilon_schedule is None:
            config = dataclasses.replace(config, epsilon_schedule=(1e-1, 1e-2, 1e-3))
    else:
        config = dataclasses.replace(config, epsilon_schedule=None)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    agg_header = ["problem", "fi_evals", "subgrad_evals", "iterations", "mode"]
    detail_header = [
        "problem", "run", "x1", "x2", "stop_reason",
        "fi_evals", "subgrad_evals", "iterations",
    ]
    agg_rows: list[list] = []
    detail_rows: list[list] = []

    try:
        for entry in entries:
            totals = np.zeros(3, dtype=np.int64)
            for idx, start in enumerate(entry.grid(10)):
                problem = entry.make_problem()
                if config.epsilon_schedule is not None:
                    run = solve_eps_decreasing(problem, start, config)
                else:
                    run = solve(problem, start, config)
                counters = run.counters
                totals += (
                    counters.value_evals,
                    counters.subgrad_evals,
                    counters.outer_iterations,
                )
                detail_rows.append(
                    [entry.name, str(idx), start[0], start[1], run.stop_reason,
                     str(counters.value_evals), str(counters.subgrad_evals),
                     str(counters.outer_iterations)]
                )
            agg_rows.append(
                [entry.name, str(totals[0]), str(totals[1]), str(totals[2]), args.mode]
            )
    except Exception as exc:  # noqa: BLE001 - report partial results, then fail
        _write_csv(out / "bench-partial.csv", detail_header, detail_rows)
        print(f"error: benchmark aborted: {exc}", file=sys.stderr)
        return SOLVER_ERROR

    _write_csv(out / "bench.csv", agg_header, agg_rows)
    _write_csv(out / "bench-runs.csv", detail_header, detail_rows)
    print(f"benchmarked {len(entries)} problem(s) x 100 starts -> {out / 'bench.csv'}")
    return 0


def cmd_pareto(args) -> int:
    problem = problems.find_problem(args.problem)
    config = _build_config(args)
    bounds = _parse_floats(args.root)
    n = problem.dimension
    if len(bounds) == 2:
        lower = np.full(n, bounds[0])
        upper = np.full(n, bounds[1])
    elif len(bounds) == 2 * n:
        lower = np.array(bounds[:n])
        upper = np.array(bounds[n:])
    else:
        print("error: --root needs 'lo,hi' or all lower then upper corners", file=sys.stderr)
        return USAGE_ERROR
    root = Box(center=(lower + upper) / 2.0, radii=(upper - lower) / 2.0, depth=0)

    try:
        cover = pareto_cover(
            problem, config, root,
            iterations=args.subdiv_iters,
            m=args.inner_m,
            samples_per_axis=args.samples_per_axis,
        )
    except Exception as exc:  # noqa: BLE001
        print(f"error: {exc}", file=sys.stderr)
        return SOLVER_ERROR

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    box_header = [f"c{i+1}" for i in range(n)] + [f"r{i+1}" for i in range(n)] + ["depth"]
    box_rows = [
        [_fmt(v) for v in box.center] + [_fmt(v) for v in box.radii] + [str(box.depth)]
        for box in cover.collection.boxes
    ]
    _write_csv(out / "boxes.csv", box_header, box_rows)

    front_header = (
        [f"x{i+1}" for i in range(n)]
        + [f"f{i+1}" for i in range(problem.k)]
        + ["nondominated"]
    )
    front_rows = [
        [_fmt(v) for v in pt] + [_fmt(v) for v in fv] + [str(int(flag))]
        for pt, fv, flag in zip(cover.image_points, cover.image_values, cover.nondominated)
    ]
    _write_csv(out / "front.csv", front_header, front_rows)

    print(
        f"{problem.name}: {len(cover.collection)} boxes at depth "
        f"{cover.collection.depth}, {cover.image_points.shape[0]} front samples"
    )
    return 0


def cmd_catalog(args) -> int:
    listing = []
    for entry in problems.catalog():
        lower, upper = entry.box
        listing.append(
            {
                "number": entry.number,
                "name": entry.name,
                "k": 2,
                "n": 2,
                "box": [[float(v) for v in lower], [float(v) for v in upper]],
            }
        )
    text = json.dumps(listing, sort_keys=True, indent=2)
    if args.out == "-":
        print(text)
    else:
        Path(args.out).write_text(text + "\n")
    return 0


def cmd_validate(args) -> int:
    from .validation import exact_min_norm_over_hull, quad_abs_subdifferential_bodies

    bodies = quad_abs_subdifferential_bodies(np.array([1.5, 0.0]), 0.2)
    bracket = exact_min_norm_over_hull(bodies, disk_facets=args.facets)
    print(f"quad-abs geometry at (1.5, 0), eps=0.2: min-norm^2 in "
          f"[{bracket.lower**2:.6f}, {bracket.upper**2:.6f}]")
    return 0


def _add_config_flags(parser, default_t0="adaptive"):
    parser.add_argument("--eps", type=float, default=1e-3, help="epsilon-subdifferential radius")
    parser.add_argument("--delta", type=float, default=1e-3, help="criticality threshold")
    parser.add_argument("--c", type=float, default=0.25, help="sufficient-decrease constant")
    parser.add_argument("--t0", default=default_t0,
                        help="initial Armijo step: 'adaptive' or a positive number")
    parser.add_argument("--eps-schedule", type=_parse_floats, default=None,
                        help="comma-separated decreasing epsilons")
    parser.add_argument("--max-iter", type=int, default=5000, help="outer iteration guard")
    parser.add_argument("--out", default=".", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nsmop",
        description="Descent solver for locally Lipschitz multiobjective problems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="run one descent from a starting point")
    p_solve.add_argument("--problem", required=True, help="catalog number or name")
    p_solve.add_argument("--start", required=True, help="comma-separated start point")
    _add_config_flags(p_solve)
    p_solve.set_defaults(func=cmd_solve)

    p_bench = sub.add_parser("bench", help="run 10x10 grid benchmarks")
    p_bench.add_argument("--problems", default="all",
                         help="'all' or comma-separated numbers/names")
    p_bench.add_argument("--mode", choices=["single-eps", "eps-decreasing"],
                         default="single-eps")
    _add_config_flags(p_bench)
    p_bench.set_defaults(func=cmd_bench)

    p_pareto = sub.add_parser("pareto", help="cover the Pareto set by box subdivision")
    p_pareto.add_argument("--problem", required=True)
    p_pareto.add_argument("--root", default="-3.1,3", help="root box corners")
    p_pareto.add_argument("--subdiv-iters", type=int, default=9)
    p_pareto.add_argument("--inner-m", type=int, default=15,
                          help="descent iterations applied inside the map")
    p_pareto.add_argument("--samples-per-axis", type=int, default=5)
    _add_config_flags(p_pareto)
    p_pareto.set_defaults(func=cmd_pareto)

    p_catalog = sub.add_parser("catalog", help="emit the benchmark catalog as JSON")
    p_catalog.add_argument("--out", default="-", help="file path or '-' for stdout")
    p_catalog.set_defaults(func=cmd_catalog)

    p_validate = sub.add_parser("validate", help="run built-in geometry self-checks")
    p_validate.add_argument("--facets", type=int, default=512)
    p_validate.set_defaults(func=cmd_validate)

    return parser


#: flags whose values may start with a minus sign (coordinates, schedules)
_NEGATIVE_VALUE_FLAGS = {"--start", "--root", "--eps-schedule"}


def _merge_negative_values(argv: list[str]) -> list[str]:
    """Join flag/value pairs whose value looks like a negative number list,
    which argparse would otherwise mistake for an option."""
    merged = []
    i = 0
    while i < len(argv):
        token = argv[i]
        if (
            token in _NEGATIVE_VALUE_FLAGS
            and i + 1 < len(argv)
            and argv[i + 1].startswith("-")
            and any(ch.isdigit() for ch in argv[i + 1])
        ):
            merged.append(f"{token}={argv[i + 1]}")
            i += 2
            continue
        merged.append(token)
        i += 1
    return merged


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = parser.parse_args(_merge_negative_values(list(argv)))
    try:
        return args.func(args)
    except KeyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
