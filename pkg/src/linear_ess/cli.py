"""Command-line interface.

Subcommands::

    linear-ess gen    --d 64 --seed 1 --out problem.json
    linear-ess sample --problem problem.json --out samples.csv --samples 10000
    linear-ess check  samples.csv --problem problem.json
    linear-ess bench  --d 64 128 --worst-case 16 32 --out bench.csv

Exit codes: 0 ok, 1 check failure, 2 input error, 3 infeasible start.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import bench
from .errors import InfeasibleStart, LinearESSError
from .polytope import DEFAULT_TOL, GaussianSpec, Problem, load_problem, save_problem
from .sampler import SamplerConfig, sample_problem

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2
EXIT_INFEASIBLE_START = 3


class InputError(Exception):
    pass


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return value


def _pos_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _nonneg_float(text: str) -> float:
    value = float(text)
    if not value >= 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return value


def _vector(text: str) -> list[float]:
    try:
        return [float(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from None


def stats_path(out: str | Path) -> Path:
    out = Path(out)
    return out.with_name(out.name + ".stats.json")


def write_samples(path: str | Path, samples: np.ndarray, d: int) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{i}" for i in range(d)])
        for row in samples.tolist():
            writer.writerow([repr(v) for v in row])


def read_samples(path: str | Path) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}: empty file, expected a header") from None
        rows = [[float(v) for v in row] for row in reader if row]
    if any(len(r) != len(header) for r in rows):
        raise InputError(f"{path}: rows do not match the header width {len(header)}")
    return np.array(rows, dtype=float).reshape(len(rows), len(header))


def _load(path: str) -> Problem:
    try:
        return load_problem(path)
    except FileNotFoundError:
        raise InputError(f"problem file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None
    except (ValueError, np.linalg.LinAlgError) as exc:
        raise InputError(f"{path}: {exc}") from None


def cmd_sample(args) -> int:
    problem = _load(args.problem)
    x0 = args.x0 if args.x0 is not None else problem.x0
    if x0 is None:
        raise InputError("no start point: add 'x0' to the problem file or pass --x0")
    if len(x0) != problem.poly.d:
        raise InputError(f"start point has length {len(x0)}, problem has dimension {problem.poly.d}")
    try:
        cfg = SamplerConfig(trim_eps=args.trim_eps, feasibility_tol=args.tol,
                            burn_in=args.burn_in, thinning=args.thinning, seed=args.seed,
                            precision=args.precision, workers=args.workers)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    t0 = time.perf_counter()
    samples, stats = sample_problem(problem, args.samples, args.chains, cfg, x0)
    wall = time.perf_counter() - t0
    write_samples(args.out, samples, problem.poly.d)
    doc = {
        "n": int(samples.shape[0]),
        "chains": args.chains,
        "burn_in": cfg.burn_in,
        "thinning": cfg.thinning,
        "rejections": stats.rejections,
        "steps": stats.steps,
        "seed": cfg.seed,
        "precision": args.precision,
        "trim_eps": cfg.trim_eps,
        "tol": cfg.feasibility_tol,
        "wall_time": wall,
        "mean": samples.mean(axis=0).tolist() if len(samples) else None,
        "var": samples.var(axis=0).tolist() if len(samples) else None,
    }
    with open(stats_path(args.out), "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    print(f"wrote {samples.shape[0]} samples to {args.out} "
          f"({stats.rejections} rejections, seed {cfg.seed})")
    return EXIT_OK


def cmd_check(args) -> int:
    problem = _load(args.problem)
    try:
        X = read_samples(args.samples)
    except FileNotFoundError:
        raise InputError(f"sample file not found: {args.samples}") from None
    except ValueError as exc:
        raise InputError(f"{args.samples}: {exc}") from None
    if X.shape[1] != problem.poly.d:
        raise InputError(f"samples have {X.shape[1]} columns, problem has dimension {problem.poly.d}")
    if X.shape[0] == 0:
        print("no samples; max violation 0")
        return EXIT_OK
    viol = np.max(X @ problem.poly.A.T - problem.poly.b, axis=1)
    worst = int(np.argmax(viol))
    print(f"max violation {viol[worst]:.3e} at row {worst}")
    bad = np.flatnonzero(viol > args.tol)
    if bad.size:
        print(f"{bad.size} of {X.shape[0]} rows violate A x <= b + {args.tol:g}; "
              f"first at row {int(bad[0])}")
        return EXIT_CHECK_FAILED
    print(f"all {X.shape[0]} rows feasible")
    return EXIT_OK


def cmd_gen(args) -> int:
    inst = bench.gen_random_instance(args.d, np.random.default_rng(args.seed))
    save_problem(Problem(inst.poly, GaussianSpec.standard(inst.poly.d), inst.x0), args.out)
    print(f"wrote random instance d={args.d} seed={args.seed} to {args.out}")
    return EXIT_OK


def cmd_bench(args) -> int:
    rng = np.random.default_rng(args.seed)
    instances = [bench.gen_random_instance(d, rng) for d in args.d]
    try:
        instances += [bench.worst_case_instance(m) for m in args.worst_case]
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if not instances:
        raise InputError("nothing to benchmark: pass --d and/or --worst-case")
    if args.reps < 3:
        raise InputError("--reps must be at least 3")
    rows = bench.time_methods(instances, args.reps, chains=args.chains,
                              sampler_samples=args.samples, workers=args.workers,
                              precision=args.precision, seed=args.seed,
                              include_sampler=not args.no_sampler)
    bench.write_csv(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="linear-ess",
        description="Rejection-free elliptical slice sampling of truncated normals on A x <= b.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw samples for a problem file")
    p.add_argument("--problem", required=True)
    p.add_argument("--out", required=True, help="sample CSV; stats go to <out>.stats.json")
    p.add_argument("--samples", type=_nonneg_int, default=1000)
    p.add_argument("--chains", type=_pos_int, default=1)
    p.add_argument("--burn-in", type=_nonneg_int, default=0)
    p.add_argument("--thinning", type=_pos_int, default=1)
    p.add_argument("--trim-eps", type=_nonneg_float, default=None)
    p.add_argument("--tol", type=_nonneg_float, default=None,
                   help="feasibility tolerance of the safeguard")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--precision", choices=("f32", "f64"), default="f64")
    p.add_argument("--workers", type=_pos_int, default=1)
    p.add_argument("--x0", type=_vector, default=None,
                   help="start point, comma separated; overrides x0 in the problem")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("check", help="verify that every sample satisfies A x <= b + tol")
    p.add_argument("samples")
    p.add_argument("--problem", required=True)
    p.add_argument("--tol", type=_nonneg_float, default=DEFAULT_TOL["double"])
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("gen", help="write a random benchmark problem")
    p.add_argument("--d", type=_pos_int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="time the interval methods and the sampler")
    p.add_argument("--d", type=_pos_int, nargs="*", default=[])
    p.add_argument("--worst-case", type=_pos_int, nargs="*", default=[], metavar="M")
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--chains", type=_pos_int, default=10)
    p.add_argument("--samples", type=_pos_int, default=1000,
                   help="samples per throughput measurement")
    p.add_argument("--workers", type=_pos_int, default=1)
    p.add_argument("--precision", choices=("f32", "f64"), default="f64")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-sampler", action="store_true", help="skip throughput rows")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT_ERROR
    try:
        return args.func(args)
    except InfeasibleStart as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE_START
    except (InputError, LinearESSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
