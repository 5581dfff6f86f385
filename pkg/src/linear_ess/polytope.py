"""Truncation domain ``{x : A x <= b}``, feasibility checks and whitening.

A general normal ``N(mu, Sigma)`` truncated to ``A x <= b`` is sampled by
drawing ``u`` from the standard normal truncated to ``(A L) u <= b - A mu``
and mapping back with ``x = L u + mu`` where ``L L^T = Sigma``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DimensionMismatch

DEFAULT_TOL = {"single": 1e-5, "double": 1e-9}


def _readonly(arr: NDArray) -> NDArray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Polytope:
    """The polytope ``{x : A x <= b}`` with ``A`` of shape ``(m, d)``.

    Zero rows are accepted here; they are classified when an ellipse is
    intersected with the domain.
    """

    A: NDArray[np.float64]
    b: NDArray[np.float64]

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if A.ndim == 1:
            A = A.reshape(1, -1)
        if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
            raise DimensionMismatch(f"A must be a non-empty 2-d array, got shape {A.shape}")
        b = b.reshape(-1)
        if b.shape[0] != A.shape[0]:
            raise DimensionMismatch(f"A has {A.shape[0]} rows but b has {b.shape[0]} entries")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise ValueError("A and b must be finite")
        object.__setattr__(self, "A", _readonly(A))
        object.__setattr__(self, "b", _readonly(b))

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def d(self) -> int:
        return self.A.shape[1]

    def astype(self, dtype) -> tuple[NDArray, NDArray]:
        """Return ``(A, b)`` cast to the working dtype."""
        return self.A.astype(dtype), self.b.astype(dtype)


@dataclass(frozen=True, eq=False)
class GaussianSpec:
    """``N(mean, covariance)``; ``GaussianSpec.standard(d)`` is ``N(0, I)``.

    The Cholesky factor is computed once here and cached.
    """

    mean: NDArray[np.float64]
    covariance: NDArray[np.float64] | None = None
    chol: NDArray[np.float64] | None = field(default=None, init=False)

    def __post_init__(self):
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        if mean.ndim != 1:
            raise DimensionMismatch("mean must be a vector")
        object.__setattr__(self, "mean", _readonly(mean))
        if self.covariance is None:
            return
        cov = np.asarray(self.covariance, dtype=float)
        if cov.shape != (mean.size, mean.size):
            raise DimensionMismatch(
                f"covariance shape {cov.shape} does not match mean of length {mean.size}"
            )
        if not np.allclose(cov, cov.T, rtol=1e-12, atol=0.0):
            raise ValueError("covariance must be symmetric")
        # raises numpy.linalg.LinAlgError when not positive definite
        L = np.linalg.cholesky(cov)
        object.__setattr__(self, "covariance", _readonly(cov))
        object.__setattr__(self, "chol", _readonly(L))

    @classmethod
    def standard(cls, d: int) -> "GaussianSpec":
        return cls(np.zeros(d))

    @property
    def is_standard(self) -> bool:
        return self.covariance is None and not np.any(self.mean)

    @property
    def d(self) -> int:
        return self.mean.size


def _check_point(poly: Polytope, x: ArrayLike) -> NDArray:
    x = np.asarray(x)
    if x.ndim != 1 or x.shape[0] != poly.d:
        raise DimensionMismatch(f"expected a point of length {poly.d}, got shape {x.shape}")
    return x


def residuals(poly: Polytope, x: ArrayLike) -> NDArray[np.float64]:
    """Return ``A x - b``."""
    x = _check_point(poly, x)
    return poly.A @ x - poly.b


def is_feasible(poly: Polytope, x: ArrayLike, tol: float = DEFAULT_TOL["double"]) -> bool:
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    return bool(np.max(residuals(poly, x)) <= tol)


def whiten(spec: GaussianSpec, poly: Polytope) -> Polytope:
    """Map the constraints into the coordinates ``u = L^{-1} (x - mu)``."""
    if spec.d != poly.d:
        raise DimensionMismatch(f"spec has dimension {spec.d}, polytope has {poly.d}")
    if spec.is_standard:
        return poly
    A = poly.A if spec.chol is None else poly.A @ spec.chol
    return Polytope(A, poly.b - poly.A @ spec.mean)


def unwhiten(spec: GaussianSpec, u: ArrayLike) -> NDArray[np.float64]:
    """``u -> L u + mu``; accepts a single point or an ``(n, d)`` batch."""
    u = np.asarray(u, dtype=float)
    if spec.is_standard:
        return u
    x = u if spec.chol is None else u @ spec.chol.T
    return x + spec.mean


def whiten_point(spec: GaussianSpec, x: ArrayLike) -> NDArray[np.float64]:
    """Inverse of :func:`unwhiten`: ``L^{-1} (x - mu)``."""
    x = np.asarray(x, dtype=float)
    if spec.is_standard:
        return x
    z = x - spec.mean
    if spec.chol is None:
        return z
    from scipy.linalg import solve_triangular

    return solve_triangular(spec.chol, z.T, lower=True).T


# ---------------------------------------------------------------------------
# problem files


@dataclass(frozen=True, eq=False)
class Problem:
    poly: Polytope
    spec: GaussianSpec
    x0: NDArray[np.float64] | None = None


def problem_from_dict(doc: dict) -> Problem:
    """Build a :class:`Problem` from the JSON problem schema.

    Fields: ``A`` (row-major list of rows), ``b``, optional ``mean``,
    ``covariance`` and ``x0`` (start point in original coordinates).
    """
    if not isinstance(doc, dict):
        raise ValueError("problem document must be a JSON object")
    for key in ("A", "b"):
        if key not in doc:
            raise ValueError(f"problem is missing field {key!r}")
    A = np.asarray(doc["A"], dtype=float)
    if A.ndim != 2:
        raise DimensionMismatch("field 'A' must be an array of equal-length rows")
    poly = Polytope(A, doc["b"])
    mean = doc.get("mean")
    cov = doc.get("covariance")
    if mean is None and cov is None:
        spec = GaussianSpec.standard(poly.d)
    else:
        spec = GaussianSpec(np.zeros(poly.d) if mean is None else mean,
                            None if cov is None else np.asarray(cov, dtype=float))
    if spec.d != poly.d:
        raise DimensionMismatch(f"mean has length {spec.d}, A has {poly.d} columns")
    x0 = doc.get("x0")
    if x0 is not None:
        x0 = np.asarray(x0, dtype=float)
        if x0.shape != (poly.d,):
            raise DimensionMismatch(f"x0 must have length {poly.d}")
    return Problem(poly, spec, x0)


def problem_to_dict(problem: Problem) -> dict:
    doc = {"A": problem.poly.A.tolist(), "b": problem.poly.b.tolist()}
    if not problem.spec.is_standard:
        doc["mean"] = problem.spec.mean.tolist()
        if problem.spec.covariance is not None:
            doc["covariance"] = problem.spec.covariance.tolist()
    if problem.x0 is not None:
        doc["x0"] = np.asarray(problem.x0, dtype=float).tolist()
    return doc


def load_problem(path: str | Path) -> Problem:
    with open(path) as fh:
        return problem_from_dict(json.load(fh))


def save_problem(problem: Problem, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(problem_to_dict(problem), fh)
        fh.write("\n")
