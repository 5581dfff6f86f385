"""Active intervals: the angles at which the ellipse lies inside the polytope.

Each constraint contributes ``[0, alpha_i] U [beta_i, 2 pi]``. Three ways of
intersecting them are provided:

* :func:`active_intervals_fast` sorts the ``alpha`` values and takes the
  running maximum of the co-sorted ``beta`` values, O(m log m).
* :func:`active_intervals_brute` intersects one constraint at a time while
  enumerating the running segments, O(m^2) in the worst case.
* :func:`active_intervals_likelihood` sorts all intersection angles and tests
  the constraint indicator between neighbours, O(m^2).

The batched helpers at the bottom work on fixed-shape candidate arrays so the
sampler can run many chains at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DimensionMismatch, DuplicateAngles, EmptyIntervalSet
from .polytope import Polytope

TWO_PI = 2.0 * math.pi


def _merge(segments: Iterable[tuple[float, float]]) -> list[tuple[float, float]]:
    """Merge sorted closed segments that overlap or touch."""
    out: list[tuple[float, float]] = []
    for lo, hi in segments:
        if out and lo <= out[-1][1]:
            if hi > out[-1][1]:
                out[-1] = (out[-1][0], hi)
        else:
            out.append((lo, hi))
    return out


class AngleIntervalSet:
    """Sorted, pairwise disjoint closed segments of ``[0, 2 pi]``.

    Construction merges overlapping or touching segments, so two sets are
    equal exactly when their canonical segment lists are.
    """

    __slots__ = ("segments",)

    def __init__(self, segments: Iterable[Sequence[float]] = ()):
        segs = sorted((float(lo), float(hi)) for lo, hi in segments)
        for lo, hi in segs:
            if not (0.0 <= lo <= hi <= TWO_PI):
                raise ValueError(f"invalid segment [{lo!r}, {hi!r}]")
        self.segments: tuple[tuple[float, float], ...] = tuple(_merge(segs))

    @classmethod
    def full(cls) -> "AngleIntervalSet":
        return cls([(0.0, TWO_PI)])

    @property
    def total_length(self) -> float:
        return float(sum(hi - lo for lo, hi in self.segments))

    def contains(self, theta: float) -> bool:
        return any(lo <= theta <= hi for lo, hi in self.segments)

    def midpoints(self) -> list[float]:
        return [0.5 * (lo + hi) for lo, hi in self.segments]

    def complement_midpoints(self) -> list[float]:
        """Midpoints of the gaps between segments inside ``[0, 2 pi]``."""
        edges = [0.0]
        for lo, hi in self.segments:
            edges.extend((lo, hi))
        edges.append(TWO_PI)
        return [0.5 * (edges[i] + edges[i + 1])
                for i in range(0, len(edges), 2) if edges[i + 1] > edges[i]]

    def __iter__(self) -> Iterator[tuple[float, float]]:
        return iter(self.segments)

    def __len__(self) -> int:
        return len(self.segments)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AngleIntervalSet):
            return NotImplemented
        return self.segments == other.segments

    def __repr__(self) -> str:
        inner = ", ".join(f"[{lo:.6g}, {hi:.6g}]" for lo, hi in self.segments)
        return f"AngleIntervalSet({{{inner}}})"


@dataclass(frozen=True, eq=False)
class ConstraintAngles:
    """Per-constraint pairs with ``0 <= alpha_i <= beta_i <= 2 pi``."""

    alphas: NDArray[np.float64]
    betas: NDArray[np.float64]

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.alphas, dtype=float))
        b = np.atleast_1d(np.asarray(self.betas, dtype=float))
        if a.ndim != 1 or a.shape != b.shape:
            raise DimensionMismatch("alphas and betas must be vectors of equal length")
        if a.size == 0:
            raise ValueError("at least one constraint is required")
        if np.any(a < 0) or np.any(b > TWO_PI) or np.any(a > b):
            raise ValueError("angle pairs must satisfy 0 <= alpha <= beta <= 2 pi")
        object.__setattr__(self, "alphas", a)
        object.__setattr__(self, "betas", b)

    @property
    def m(self) -> int:
        return self.alphas.size

    def pairs(self) -> Iterator[tuple[float, float]]:
        return zip(self.alphas.tolist(), self.betas.tolist())


# ---------------------------------------------------------------------------
# interval construction


def candidate_segments(alphas: NDArray, betas: NDArray, stable: bool = True
                       ) -> tuple[NDArray, NDArray]:
    """The ``m + 1`` candidate segments ``[lo_k, hi_k]`` along the last axis.

    ``lo = (0, gamma_1, ..., gamma_m)`` with ``gamma`` the running max of the
    betas in alpha order and ``hi = (alpha_(1), ..., alpha_(m), 2 pi)``.
    Candidates with ``lo > hi`` are empty.

    The order among tied alphas only moves empty or zero-length candidates
    around, so ``stable=False`` (much faster on batches) yields the same
    segment lengths.
    """
    order = np.argsort(alphas, axis=-1, kind="stable" if stable else None)
    if alphas.ndim == 2:
        # flat indexing is noticeably faster than take_along_axis
        flat = order + (np.arange(alphas.shape[0]) * alphas.shape[1])[:, None]
        a_sorted = alphas.ravel()[flat]
        b_sorted = betas.ravel()[flat]
    else:
        a_sorted = np.take_along_axis(alphas, order, axis=-1)
        b_sorted = np.take_along_axis(betas, order, axis=-1)
    gamma = np.maximum.accumulate(b_sorted, axis=-1)
    shape = alphas.shape[:-1] + (1,)
    lo = np.concatenate([np.zeros(shape, dtype=alphas.dtype), gamma], axis=-1)
    hi = np.concatenate([a_sorted, np.full(shape, TWO_PI, dtype=alphas.dtype)], axis=-1)
    return lo, hi


def active_intervals_fast(angles: ConstraintAngles) -> AngleIntervalSet:
    lo, hi = candidate_segments(angles.alphas, angles.betas)
    keep = lo <= hi
    return AngleIntervalSet(zip(lo[keep].tolist(), hi[keep].tolist()))


@dataclass
class BruteTrace:
    """Running segment count after each constraint and visited segments."""

    segment_counts: list[int] = field(default_factory=list)
    operations: int = 0


def active_intervals_brute(angles: ConstraintAngles, trace: BruteTrace | None = None
                           ) -> AngleIntervalSet:
    """Intersect the constraints one after another.

    If ``trace`` is given it records the number of segments after each step
    and the number of elementary segment operations performed.
    """
    segs: list[tuple[float, float]] = [(0.0, TWO_PI)]
    for a, b in angles.pairs():
        new: list[tuple[float, float]] = []
        for lo, hi in segs:
            if lo <= a:
                new.append((lo, hi if hi < a else a))
            if hi >= b:
                new.append((b if lo < b else lo, hi))
        if trace is not None:
            trace.operations += len(segs)
        segs = _merge(new)
        if trace is not None:
            trace.segment_counts.append(len(segs))
    return AngleIntervalSet(segs)


def active_intervals_likelihood(poly: Polytope, x: ArrayLike, nu: ArrayLike,
                                angles: ConstraintAngles, *, chunk: int = 256
                                ) -> AngleIntervalSet:
    """Classify intersection angles by testing the indicator at midpoints.

    All non-padding angles are sorted and the constraint indicator is
    evaluated at the midpoint of every gap, reusing ``A x`` and ``A nu``.
    Gaps whose midpoint is feasible form the active set.

    Raises
    ------
    DuplicateAngles
        Two intersection angles coincide; the midpoint test cannot tell
        them apart.
    """
    x = np.asarray(x, dtype=float)
    nu = np.asarray(nu, dtype=float)
    P = poly.A @ x
    Q = poly.A @ nu
    real = ~((angles.alphas == 0) & (angles.betas == 0))
    thetas = np.sort(np.concatenate([angles.alphas[real], angles.betas[real]]))
    if thetas.size > 1 and np.any(np.diff(thetas) == 0):
        raise DuplicateAngles("intersection angles must be distinct")
    edges = np.concatenate([[0.0], thetas, [TWO_PI]])
    mids = 0.5 * (edges[:-1] + edges[1:])
    feasible = np.empty(mids.size, dtype=bool)
    for start in range(0, mids.size, chunk):
        t = mids[start:start + chunk, None]
        vals = P * np.cos(t) + Q * np.sin(t)
        feasible[start:start + chunk] = np.all(vals <= poly.b, axis=1)
    return AngleIntervalSet(zip(edges[:-1][feasible].tolist(), edges[1:][feasible].tolist()))


# ---------------------------------------------------------------------------
# trimming and sampling


def trim(intervals: AngleIntervalSet, eps: float) -> AngleIntervalSet:
    """Shrink every segment by ``eps`` on both ends.

    The endpoints 0 and 2 pi stand for the current point and are kept.
    Segments that vanish are dropped.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    if eps == 0:
        return intervals
    out = []
    for lo, hi in intervals:
        tlo = lo if lo == 0.0 else lo + eps
        thi = hi if hi == TWO_PI else hi - eps
        if thi > tlo:
            out.append((tlo, thi))
    return AngleIntervalSet(out)


def sample_theta(intervals: AngleIntervalSet, u: float) -> float:
    """Map ``u`` in ``[0, 1)`` through the inverse CDF of the uniform law on the set."""
    total = intervals.total_length
    if total <= 0:
        raise EmptyIntervalSet("cannot sample from a set of zero length")
    target = u * total
    acc = 0.0
    last = None
    for lo, hi in intervals:
        width = hi - lo
        if width <= 0:
            continue
        if target < acc + width:
            return min(lo + (target - acc), hi)
        acc += width
        last = hi
    return last


def trimmed_candidates(lo: NDArray, hi: NDArray, eps: float) -> tuple[NDArray, NDArray]:
    """Batched :func:`trim` on candidate arrays; empty candidates get length 0.

    Candidates are trimmed one by one, so two candidates that touch (only
    possible with tied angles) lose ``2 eps`` more than the merged set would.
    """
    if eps == 0:
        return lo, hi
    e = lo.dtype.type(eps)
    tlo = np.where(lo == 0, lo, lo + e)
    thi = np.where(hi == lo.dtype.type(TWO_PI), hi, hi - e)
    return tlo, thi


def sample_candidates(lo: NDArray, hi: NDArray, u: NDArray) -> tuple[NDArray, NDArray]:
    """Draw one angle per row of the candidate arrays.

    Returns ``(theta, ok)``; rows whose total length is zero get
    ``ok = False`` and ``theta = 0``.
    """
    lengths = np.maximum(hi - lo, 0)
    cum = np.cumsum(lengths, axis=-1)
    total = cum[:, -1]
    ok = total > 0
    target = u.astype(lo.dtype, copy=False) * total
    above = cum > target[:, None]
    n = lengths.shape[1]
    last_pos = n - 1 - np.argmax(lengths[:, ::-1] > 0, axis=1)
    j = np.where(above.any(axis=1), np.argmax(above, axis=1), last_pos)
    rows = np.arange(lo.shape[0])
    before = np.where(j > 0, cum[rows, np.maximum(j - 1, 0)], 0)
    theta = lo[rows, j] + (target - before)
    theta = np.minimum(np.maximum(theta, lo[rows, j]), hi[rows, j])
    return np.where(ok, theta, 0).astype(lo.dtype, copy=False), ok
