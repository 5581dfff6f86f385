"""Elliptical slice sampling for the standard normal truncated to ``A x <= b``.

Every step draws ``nu ~ N(0, I)``, intersects the ellipse
``x cos(theta) + nu sin(theta)`` with the polytope, samples ``theta``
uniformly from the active intervals and moves to the corresponding point.
There is no rejection loop. Two safeguards cover floating-point trouble near
the boundary: the active intervals are trimmed by ``trim_eps``, and a
proposal that violates a constraint by more than ``feasibility_tol`` is
discarded (the chain stays put and the rejection is counted).

Chains are advanced in vectorized blocks. Each chain owns two random streams
derived from ``(seed, chain index)`` and consumes exactly ``d`` normals and
one uniform per step, so a chain's trajectory does not depend on how chains
are grouped or scheduled.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .angles import interval_pairs
from .errors import DimensionMismatch, InfeasibleStart, InvalidConstraint
from .intervals import candidate_segments, sample_candidates, trimmed_candidates
from .polytope import DEFAULT_TOL, Polytope, Problem, unwhiten, whiten, whiten_point

_PRECISIONS = {"single": "single", "f32": "single", "float32": "single",
               "double": "double", "f64": "double", "float64": "double"}
_DTYPES = {"single": np.float32, "double": np.float64}
DEFAULT_TRIM = {"single": 1e-6, "double": 0.0}

# upper bound on floats held by one block's pre-drawn normals
_DRAW_BUDGET = 1 << 22
# steps between exact recomputations of A x
_REFRESH = 16


@dataclass(frozen=True)
class SamplerConfig:
    """Sampler settings.

    ``trim_eps`` and ``feasibility_tol`` default by precision
    (single: 1e-6 rad and 1e-5, double: 0 and 1e-9). A missing ``seed`` is
    drawn from system entropy and stored, so ``cfg.seed`` always replays the
    run. ``block_size`` is the number of chains advanced together; it is part
    of the reproducibility key only through floating-point summation order.
    """

    trim_eps: float | None = None
    feasibility_tol: float | None = None
    burn_in: int = 0
    thinning: int = 1
    seed: int | None = None
    precision: str = "double"
    workers: int = 1
    block_size: int = 1024

    def __post_init__(self):
        try:
            precision = _PRECISIONS[str(self.precision).lower()]
        except KeyError:
            raise ValueError(f"unknown precision {self.precision!r}") from None
        object.__setattr__(self, "precision", precision)
        if self.trim_eps is None:
            object.__setattr__(self, "trim_eps", DEFAULT_TRIM[precision])
        if self.feasibility_tol is None:
            object.__setattr__(self, "feasibility_tol", DEFAULT_TOL[precision])
        if self.seed is None:
            object.__setattr__(self, "seed", int(np.random.SeedSequence().entropy % 2**64))
        if not 0 <= self.trim_eps < math.pi:
            raise ValueError("trim_eps must lie in [0, pi)")
        if self.feasibility_tol < 0:
            raise ValueError("feasibility_tol must be nonnegative")
        if self.thinning < 1:
            raise ValueError("thinning must be at least 1")
        if self.burn_in < 0:
            raise ValueError("burn_in must be nonnegative")
        if self.workers < 1 or self.block_size < 1:
            raise ValueError("workers and block_size must be positive")

    @property
    def dtype(self):
        return _DTYPES[self.precision]


class ChainRandom:
    """Random streams of one chain: normals for ``nu`` and uniforms for ``theta``."""

    def __init__(self, seed: int, index: int = 0):
        self.seed = seed
        self.index = index
        self.normal = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index, 0))))
        self.uniform = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index, 1))))

    def draw(self, steps: int, d: int) -> tuple[NDArray, NDArray]:
        return self.normal.standard_normal((steps, d)), self.uniform.random(steps)


@dataclass
class ChainState:
    x: NDArray
    step: int = 0
    rejections: int = 0


@dataclass
class ChainStats:
    steps: int = 0
    rejections: int = 0
    chains: int = 1
    chain_rejections: list[int] = field(default_factory=list)

    @property
    def rejection_rate(self) -> float:
        return self.rejections / self.steps if self.steps else 0.0

    def as_dict(self) -> dict:
        return {"steps": self.steps, "rejections": self.rejections, "chains": self.chains}


def step_block(AT: NDArray, b: NDArray, X: NDArray, Nu: NDArray, U: NDArray,
               trim_eps: float, tol: float, P: NDArray | None = None):
    """Advance a block of chains by one step.

    ``AT`` is the contiguous transpose of ``A``. ``X`` and ``Nu`` have shape
    ``(k, d)`` and ``U`` shape ``(k,)``, all in the working dtype.
    ``P = X A^T`` may be passed in from the previous step.

    Returns ``(X_next, P_next, rejected)``.
    """
    if P is None:
        P = X @ AT
    Q = Nu @ AT
    alpha, beta, _, infeasible, invalid = interval_pairs(P, Q, b, tol, with_kind=False)
    if invalid.any():
        raise InvalidConstraint(int(np.argwhere(invalid)[0][-1]))
    lo, hi = candidate_segments(alpha, beta, stable=False)
    tlo, thi = trimmed_candidates(lo, hi, trim_eps)
    theta, ok = sample_candidates(tlo, thi, U)
    if not ok.all():
        # trimming emptied the set: fall back to the untrimmed intervals
        redo = ~ok
        theta_r, ok_r = sample_candidates(lo[redo], hi[redo], U[redo])
        theta[redo] = theta_r
        ok[redo] = ok_r
    c = np.cos(theta)[:, None]
    s = np.sin(theta)[:, None]
    X_new = X * c + Nu * s
    # A x_new by linearity; _run_block refreshes P with a full product
    # every few steps so rounding does not accumulate
    P_new = P * c + Q * s
    feasible = np.all(P_new - b <= AT.dtype.type(tol), axis=1)
    accept = ok & feasible & ~infeasible.any(axis=1)
    X_out = np.where(accept[:, None], X_new, X)
    P_out = np.where(accept[:, None], P_new, P)
    return X_out, P_out, ~accept


def _check_start(poly: Polytope, x0: NDArray, dtype) -> NDArray:
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (poly.d,):
        raise DimensionMismatch(f"start must have length {poly.d}, got shape {x0.shape}")
    res = poly.A @ x0 - poly.b
    A, b = poly.astype(dtype)
    xw = x0.astype(dtype)
    res_w = (A @ xw - b).astype(float)
    worst = np.maximum(res, res_w)
    i = int(np.argmax(worst))
    if not np.all(np.isfinite(x0)) or worst[i] >= 0:
        raise InfeasibleStart(i, float(worst[i]))
    return xw


def _run_block(A: NDArray, b: NDArray, X: NDArray, streams: list[ChainRandom],
               n_samples: int, cfg: SamplerConfig) -> tuple[NDArray, NDArray]:
    k, d = X.shape
    total = cfg.burn_in + cfg.thinning * n_samples
    out = np.empty((k, n_samples, d), dtype=X.dtype)
    rejections = np.zeros(k, dtype=np.int64)
    chunk = max(1, min(256, _DRAW_BUDGET // max(1, k * d)))
    AT = np.ascontiguousarray(A.T)
    P = X @ AT
    t = 0
    while t < total:
        c = min(chunk, total - t)
        draws = [s.draw(c, d) for s in streams]
        Nu = np.stack([nu for nu, _ in draws], axis=1).astype(X.dtype, copy=False)
        U = np.stack([u for _, u in draws], axis=1)
        for j in range(c):
            X, P, rejected = step_block(AT, b, X, Nu[j], U[j], cfg.trim_eps,
                                        cfg.feasibility_tol, P)
            rejections += rejected
            t += 1
            if t % _REFRESH == 0:
                P = X @ AT
            kept = t - cfg.burn_in
            if kept > 0 and kept % cfg.thinning == 0:
                out[:, kept // cfg.thinning - 1] = X
    return out, rejections


def run_parallel(poly: Polytope, starts: ArrayLike, per_chain: int, cfg: SamplerConfig
                 ) -> tuple[NDArray[np.float64], ChainStats]:
    """Run ``k`` independent chains from the rows of ``starts``.

    Chain ``i`` uses ``ChainRandom(cfg.seed, i)``. Samples are returned in
    chain-major order, shape ``(k * per_chain, d)``, as float64 (single
    precision values are upcast exactly).
    """
    starts = np.atleast_2d(np.asarray(starts, dtype=float))
    if starts.shape[1] != poly.d:
        raise DimensionMismatch(f"starts must have {poly.d} columns")
    if per_chain < 0:
        raise ValueError("per_chain must be nonnegative")
    dtype = cfg.dtype
    k = starts.shape[0]
    X0 = np.stack([_check_start(poly, x, dtype) for x in starts])
    A, b = poly.astype(dtype)
    blocks = [(lo, min(lo + cfg.block_size, k)) for lo in range(0, k, cfg.block_size)]

    def work(bounds):
        lo, hi = bounds
        streams = [ChainRandom(cfg.seed, i) for i in range(lo, hi)]
        return _run_block(A, b, X0[lo:hi].copy(), streams, per_chain, cfg)

    if cfg.workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(work, blocks))
    else:
        results = [work(bl) for bl in blocks]
    samples = np.concatenate([r[0] for r in results], axis=0).reshape(k * per_chain, poly.d)
    chain_rej = np.concatenate([r[1] for r in results])
    steps = k * (cfg.burn_in + cfg.thinning * per_chain)
    stats = ChainStats(steps=steps, rejections=int(chain_rej.sum()), chains=k,
                       chain_rejections=chain_rej.tolist())
    return samples.astype(np.float64, copy=False), stats


def run_chain(poly: Polytope, x0: ArrayLike, n_samples: int, cfg: SamplerConfig,
              rng: ChainRandom | None = None) -> tuple[NDArray[np.float64], ChainStats]:
    """Single chain: ``burn_in`` steps, then every ``thinning``-th state.

    Without ``rng`` the chain uses ``ChainRandom(cfg.seed, 0)`` and matches
    chain 0 of :func:`run_parallel`.
    """
    if n_samples < 0:
        raise ValueError("n_samples must be nonnegative")
    dtype = cfg.dtype
    x = _check_start(poly, np.asarray(x0), dtype)
    A, b = poly.astype(dtype)
    rng = rng or ChainRandom(cfg.seed, 0)
    out, rej = _run_block(A, b, x[None, :], [rng], n_samples, cfg)
    stats = ChainStats(steps=cfg.burn_in + cfg.thinning * n_samples,
                       rejections=int(rej[0]), chains=1, chain_rejections=[int(rej[0])])
    return out[0].astype(np.float64), stats


def ess_step(poly: Polytope, state: ChainState, rng: ChainRandom,
             cfg: SamplerConfig | None = None) -> ChainState:
    """One Markov transition from ``state``; returns a new state."""
    cfg = cfg or SamplerConfig(seed=rng.seed)
    dtype = cfg.dtype
    A, b = poly.astype(dtype)
    x = np.asarray(state.x, dtype=dtype)
    if x.shape != (poly.d,):
        raise DimensionMismatch(f"state must have length {poly.d}")
    nu, u = rng.draw(1, poly.d)
    X, _, rejected = step_block(np.ascontiguousarray(A.T), b, x[None, :], nu.astype(dtype), u,
                                cfg.trim_eps, cfg.feasibility_tol)
    return ChainState(X[0], state.step + 1, state.rejections + int(rejected[0]))


def sample_problem(problem: Problem, n: int, chains: int, cfg: SamplerConfig,
                   x0: ArrayLike | None = None) -> tuple[NDArray[np.float64], ChainStats]:
    """Sample ``n`` points from a problem's truncated normal.

    Non-standard Gaussians are whitened first and the samples mapped back.
    All chains start from ``x0`` (or ``problem.x0``). Each chain produces
    ``ceil(n / chains)`` samples; the chain-major result is cut to ``n`` rows.
    """
    if chains < 1:
        raise ValueError("chains must be positive")
    if n < 0:
        raise ValueError("n must be nonnegative")
    start = problem.x0 if x0 is None else np.asarray(x0, dtype=float)
    if start is None:
        raise ValueError("no start point given")
    poly = whiten(problem.spec, problem.poly)
    u0 = whiten_point(problem.spec, start)
    per_chain = -(-n // chains)
    u, stats = run_parallel(poly, np.tile(u0, (chains, 1)), per_chain, cfg)
    return unwhiten(problem.spec, u[:n]), stats
