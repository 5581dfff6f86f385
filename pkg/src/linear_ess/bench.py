"""Benchmark instances and timing harness.

Two instance families:

* random: ``A`` (d x d) with standard normal entries, ``x0 ~ N(0, I)`` and
  ``b = A x0 + u`` with ``u ~ U[0, 1]^d``, so ``x0`` is strictly inside;
* worst case: ``[0, 3^-i] U [2 3^-i, 1]`` rescaled to ``[0, 2 pi]``, on which
  the running set of the brute-force intersection gains one segment per
  constraint.
"""

from __future__ import annotations

import csv
import math
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

import numpy as np
from numpy.typing import NDArray

from .angles import interval_pairs
from .errors import DuplicateAngles
from .intervals import (AngleIntervalSet, ConstraintAngles, active_intervals_brute,
                        active_intervals_fast, active_intervals_likelihood, sample_theta)
from .polytope import DEFAULT_TOL, Polytope
from .sampler import SamplerConfig, run_parallel

TWO_PI = 2.0 * math.pi
MAX_WORST_CASE_M = 300

CSV_COLUMNS = ("label", "d", "m", "method", "reps", "median_ns_per_call",
               "samples_per_sec", "workers", "precision", "seed")

METHODS: dict[str, Callable] = {
    "fast": lambda inst, nu, angles: active_intervals_fast(angles),
    "brute": lambda inst, nu, angles: active_intervals_brute(angles),
    "likelihood": lambda inst, nu, angles: active_intervals_likelihood(
        inst.poly, inst.x0, nu, angles),
}


@dataclass(frozen=True, eq=False)
class BenchInstance:
    poly: Polytope
    x0: NDArray[np.float64]
    label: str
    # worst-case instances pin the ellipse direction and their angles
    nu: NDArray[np.float64] | None = None
    angles: ConstraintAngles | None = None

    @property
    def dims(self) -> tuple[int, int]:
        return self.poly.d, self.poly.m


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def gen_random_instance(d: int, rng=None) -> BenchInstance:
    if d < 1:
        raise ValueError("d must be positive")
    rng = _as_rng(rng)
    A = rng.standard_normal((d, d))
    x0 = rng.standard_normal(d)
    u = rng.random(d)
    while np.any(u == 0):
        u[u == 0] = rng.random(int(np.sum(u == 0)))
    return BenchInstance(Polytope(A, A @ x0 + u), x0, f"random-d{d}")


def gen_worst_case_angles(m: int) -> ConstraintAngles:
    """``alpha_i = 2 pi 3^-i``, ``beta_i = 2 alpha_i`` for ``i = 1..m``."""
    if m < 1:
        raise ValueError("m must be positive")
    if m > MAX_WORST_CASE_M:
        raise ValueError(f"m is capped at {MAX_WORST_CASE_M} (angles underflow beyond)")
    alphas = np.array([TWO_PI / 3.0 ** i for i in range(1, m + 1)])
    return ConstraintAngles(alphas, 2.0 * alphas)


def worst_case_instance(m: int) -> BenchInstance:
    """A 2-d polytope whose unit-circle ellipse realizes the worst-case angles.

    Constraint ``i`` is violated exactly on ``(alpha_i, beta_i)`` of the
    ellipse ``(cos t, sin t)``; the stored angles are the exact family values.
    """
    angles = gen_worst_case_angles(m)
    tau = 0.5 * (angles.alphas + angles.betas)
    half = 0.5 * (angles.betas - angles.alphas)
    A = np.column_stack([np.cos(tau), np.sin(tau)])
    poly = Polytope(A, np.cos(half))
    return BenchInstance(poly, np.array([1.0, 0.0]), f"worst-m{m}",
                         nu=np.array([0.0, 1.0]), angles=angles)


# ---------------------------------------------------------------------------
# instrumented fast path


def fast_path_operations(angles: ConstraintAngles) -> tuple[AngleIntervalSet, int]:
    """Pure-Python twin of :func:`active_intervals_fast` counting comparisons.

    Uses a top-down merge sort so the count reflects a general comparison
    sort rather than run detection on presorted input.
    """
    ops = 0
    pairs = list(angles.pairs())

    def merge_sort(items):
        nonlocal ops
        if len(items) <= 1:
            return items
        mid = len(items) // 2
        left, right = merge_sort(items[:mid]), merge_sort(items[mid:])
        out = []
        i = j = 0
        while i < len(left) and j < len(right):
            ops += 1
            if right[j][0] < left[i][0]:
                out.append(right[j])
                j += 1
            else:
                out.append(left[i])
                i += 1
        out.extend(left[i:])
        out.extend(right[j:])
        return out

    ordered = merge_sort(pairs)
    segments = []
    lo = 0.0
    gamma = -math.inf
    for a, b in ordered:
        ops += 2  # candidate test and running max
        if lo <= a:
            segments.append((lo, a))
        gamma = b if b > gamma else gamma
        lo = gamma
    ops += 1
    segments.append((lo, TWO_PI))
    return AngleIntervalSet(segments), ops


def brute_force_operations(angles: ConstraintAngles) -> tuple[AngleIntervalSet, list[int], int]:
    from .intervals import BruteTrace

    trace = BruteTrace()
    result = active_intervals_brute(angles, trace)
    return result, trace.segment_counts, trace.operations


def loglog_slope(xs: Iterable[float], ys: Iterable[float]) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    return float(np.polyfit(np.log(list(xs)), np.log(list(ys)), 1)[0])


# ---------------------------------------------------------------------------
# timing


def instance_angles(inst: BenchInstance, nu: NDArray) -> ConstraintAngles:
    if inst.angles is not None:
        return inst.angles
    P = inst.poly.A @ inst.x0
    Q = inst.poly.A @ nu
    alpha, beta, *_ = interval_pairs(P, Q, inst.poly.b, DEFAULT_TOL["double"])
    return ConstraintAngles(alpha, beta)


def step_with_method(inst: BenchInstance, x: NDArray, nu: NDArray, u: float,
                     method: str) -> NDArray:
    """One untrimmed double-precision step using the named interval method."""
    P = inst.poly.A @ x
    Q = inst.poly.A @ nu
    alpha, beta, *_ = interval_pairs(P, Q, inst.poly.b, DEFAULT_TOL["double"])
    angles = ConstraintAngles(alpha, beta)
    if method == "fast":
        act = active_intervals_fast(angles)
    elif method == "brute":
        act = active_intervals_brute(angles)
    elif method == "likelihood":
        act = active_intervals_likelihood(inst.poly, x, nu, angles)
    else:
        raise ValueError(f"unknown method {method!r}")
    theta = sample_theta(act, u)
    return x * math.cos(theta) + nu * math.sin(theta)


def _median_ns(fn: Callable[[], object], reps: int) -> float:
    fn()  # warm-up, discarded
    times = []
    for _ in range(reps):
        t0 = time.perf_counter_ns()
        fn()
        times.append(time.perf_counter_ns() - t0)
    return float(statistics.median(times))


@dataclass
class BenchRow:
    label: str
    d: int
    m: int
    method: str
    reps: int
    median_ns_per_call: float
    samples_per_sec: float | None
    workers: int
    precision: str
    seed: int

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in CSV_COLUMNS}


def sampler_throughput(inst: BenchInstance, chains: int, total_samples: int,
                       precision: str = "double", workers: int = 1, seed: int = 0
                       ) -> float:
    """Samples per second for ``chains`` chains, no burn-in, no thinning."""
    per_chain = max(1, total_samples // chains)
    cfg = SamplerConfig(precision=precision, seed=seed, workers=workers)
    starts = np.tile(inst.x0, (chains, 1))
    t0 = time.perf_counter()
    samples, _ = run_parallel(inst.poly, starts, per_chain, cfg)
    return samples.shape[0] / (time.perf_counter() - t0)


def time_methods(instances: list[BenchInstance], reps: int = 5, *,
                 methods: tuple[str, ...] = ("fast", "brute", "likelihood"),
                 chains: int = 10, sampler_samples: int = 1000, workers: int = 1,
                 precision: str = "double", seed: int = 0,
                 include_steps: bool = True, include_sampler: bool = True
                 ) -> list[BenchRow]:
    """Median timings per instance and method.

    Rows with method ``fast``/``brute``/``likelihood`` time one interval
    construction; ``step-<method>`` rows time a full ESS step with that
    method; ``sampler-1`` and ``sampler-<k>`` report throughput of the
    vectorized sampler. Instances with fixed angles (worst case) only get the
    interval-construction rows.
    """
    if reps < 3:
        raise ValueError("reps must be at least 3")
    rng = np.random.default_rng(seed)
    rows: list[BenchRow] = []
    for inst in instances:
        d, m = inst.dims
        nu = inst.nu if inst.nu is not None else rng.standard_normal(d)
        angles = instance_angles(inst, nu)

        def row(method, ns, sps=None, w=1, prec="double"):
            rows.append(BenchRow(inst.label, d, m, method, reps, ns, sps, w, prec, seed))

        for name in methods:
            fn = METHODS[name]
            try:
                ns = _median_ns(lambda: fn(inst, nu, angles), reps)
            except DuplicateAngles:
                ns = float("nan")
            row(name, ns)
        if inst.angles is not None:
            continue
        if include_steps:
            u = float(rng.random())
            for name in methods:
                try:
                    ns = _median_ns(lambda: step_with_method(inst, inst.x0, nu, u, name), reps)
                except DuplicateAngles:
                    ns = float("nan")
                row(f"step-{name}", ns, 1e9 / ns if ns == ns else None)
        if include_sampler:
            for k in sorted({1, chains}):
                sps = sampler_throughput(inst, k, sampler_samples, precision, workers, seed)
                row(f"sampler-{k}", 1e9 / sps, sps, workers, precision)
    return rows


def write_csv(rows: list[BenchRow], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for r in rows:
            writer.writerow(r.as_dict())


def read_csv(path: str | Path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
