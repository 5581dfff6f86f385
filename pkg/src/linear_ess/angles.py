"""Ellipse/halfspace intersection angles.

For the ellipse ``theta -> x cos(theta) + nu sin(theta)`` and one constraint
``a^T x <= b``, write ``p = a^T x``, ``q = a^T nu`` and ``r = hypot(p, q)``.
The constraint value along the ellipse is ``r cos(theta - tau)`` with
``tau = arctan2(q, p)``, so it is violated on the open arc
``(tau - delta, tau + delta)`` where ``delta = arccos(b / r)``.

Every constraint is reduced to a pair ``(alpha, beta)`` with
``0 <= alpha <= beta <= 2 pi`` such that the feasible angles are
``[0, alpha] U [beta, 2 pi]``. Constraints that the ellipse never crosses get
the padding pair ``(0, 0)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DimensionMismatch, InfeasibleCurrentPoint, InvalidConstraint
from .polytope import DEFAULT_TOL, Polytope

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class EllipseProjection:
    p: float
    q: float
    offset: float
    r: float

    @classmethod
    def from_pq(cls, p: float, q: float, offset: float) -> "EllipseProjection":
        return cls(float(p), float(q), float(offset), float(math.hypot(p, q)))


class RootKind(enum.IntEnum):
    NO_INTERSECTION = 0
    TANGENT = 1
    TWO_ROOTS = 2


@dataclass(frozen=True)
class RootResult:
    """Classification of one constraint against the ellipse.

    ``alpha``/``beta`` always hold the interval pair the constraint
    contributes, so ``to_interval_pair`` is a lookup. ``angle`` is the
    tangent angle for ``TANGENT`` results and ``rho_sign`` tells the two
    tangent cases apart (+1: ellipse inside, -1: ellipse outside but for
    the touching point).
    """

    kind: RootKind
    alpha: float = 0.0
    beta: float = 0.0
    angle: float | None = None
    rho_sign: int = 0

    @property
    def roots(self) -> tuple[float, float] | None:
        return (self.alpha, self.beta) if self.kind is RootKind.TWO_ROOTS else None


def project(poly: Polytope, x: ArrayLike, nu: ArrayLike) -> list[EllipseProjection]:
    x = np.asarray(x, dtype=float)
    nu = np.asarray(nu, dtype=float)
    if x.shape != (poly.d,) or nu.shape != (poly.d,):
        raise DimensionMismatch(f"x and nu must have length {poly.d}")
    P = poly.A @ x
    Q = poly.A @ nu
    R = np.hypot(P, Q)
    return [EllipseProjection(float(p), float(q), float(c), float(r))
            for p, q, c, r in zip(P, Q, poly.b, R)]


def interval_pairs(P: NDArray, Q: NDArray, b: NDArray, tol: float, with_kind: bool = True):
    """Vectorized root solving.

    ``P`` and ``Q`` have shape ``(..., m)``; ``b`` broadcasts against them.
    Computation stays in the dtype of ``P``.

    Returns
    -------
    alpha, beta : ndarray
        Interval pairs, padding ``(0, 0)`` where the constraint is inactive.
    kind : ndarray of int8 or None
        :class:`RootKind` codes (``None`` unless ``with_kind``).
    infeasible : ndarray of bool
        ``p > b + tol``: the current point violates this row.
    invalid : ndarray of bool
        ``r == 0`` and ``b < 0``.
    """
    dtype = P.dtype
    two_pi = dtype.type(TWO_PI)
    zero = dtype.type(0)
    b = np.asarray(b, dtype=dtype)
    R = np.sqrt(P * P + Q * Q)
    degenerate = R == 0
    any_degenerate = degenerate.any()
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = b / R
    if any_degenerate:
        rho[degenerate] = np.inf
        invalid = degenerate & (b < 0)
    else:
        invalid = degenerate
    infeasible = P > b + dtype.type(tol)
    rho_c = np.minimum(rho, 1)
    np.maximum(rho_c, -1, out=rho_c)
    tau = np.arctan2(Q, P)
    delta = np.arccos(rho_c)
    lo = np.subtract(tau, delta)
    hi = np.add(tau, delta, out=tau)

    # Normalize the violating arc (lo, hi) into [0, 2 pi] without covering 0.
    shift = hi <= 0
    np.add(lo, two_pi, out=lo, where=shift)
    np.add(hi, two_pi, out=hi, where=shift)
    # 0 strictly inside the arc only happens through rounding at a point on
    # (or within tol of) the boundary: keep the longer side of the arc.
    wraps = lo < 0
    if wraps.any():
        keep_right = hi >= -lo
        alpha = np.where(wraps, np.where(keep_right, zero, lo + two_pi), lo)
        beta = np.where(wraps, np.where(keep_right, hi, two_pi), hi)
    else:
        alpha, beta = lo, hi

    # an arc narrower than the angle resolution removes nothing
    inactive = (rho_c >= 1) | (alpha >= beta)
    alpha[inactive] = zero
    beta[inactive] = zero

    kind = None
    if with_kind:
        kind = np.full(P.shape, RootKind.TWO_ROOTS, dtype=np.int8)
        kind[inactive | (rho_c == -1)] = RootKind.TANGENT
        kind[(rho > 1) | degenerate] = RootKind.NO_INTERSECTION
    return alpha, beta, kind, infeasible, invalid


def _normalize(angle: float) -> float:
    angle = math.fmod(angle, TWO_PI)
    return angle + TWO_PI if angle < 0 else angle


def solve_roots(proj: EllipseProjection, tol: float = DEFAULT_TOL["double"]) -> RootResult:
    """Classify a single projection.

    Raises
    ------
    InvalidConstraint
        ``r == 0`` with a negative offset.
    InfeasibleCurrentPoint
        ``p > offset + tol``: the arc labeling assumes ``theta = 0`` is
        feasible.
    """
    vals = np.array([[proj.p, proj.q, proj.offset]], dtype=float)
    alpha, beta, kind, infeasible, invalid = interval_pairs(
        vals[:, 0], vals[:, 1], vals[:, 2], tol)
    if invalid[0]:
        raise InvalidConstraint(0)
    if infeasible[0]:
        raise InfeasibleCurrentPoint(
            f"p = {proj.p!r} exceeds offset {proj.offset!r} by more than {tol!r}")
    kind = RootKind(int(kind[0]))
    a, b_ = float(alpha[0]), float(beta[0])
    if kind is RootKind.NO_INTERSECTION:
        return RootResult(kind)
    if kind is RootKind.TANGENT:
        tau = math.atan2(proj.q, proj.p)
        if proj.offset < 0 and a < b_:
            return RootResult(kind, a, b_, _normalize(tau + math.pi), -1)
        return RootResult(kind, 0.0, 0.0, _normalize(tau), 1)
    return RootResult(kind, a, b_)


def to_interval_pair(result: RootResult) -> tuple[float, float]:
    """Pair ``(alpha, beta)`` such that ``[0, alpha] U [beta, 2 pi]`` is feasible.

    No intersection and outer tangency give the padding pair ``(0, 0)``.
    Inner tangency (``b / r = -1``) gives a pair whose feasible set shrinks
    to the current point, e.g. ``(0, 2 pi)``.
    """
    return result.alpha, result.beta
