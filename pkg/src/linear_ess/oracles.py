"""Ground truth used by the tests: closed-form 1-d moments and rejection sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .errors import AcceptanceTooLow, UnderflowingMass
from .polytope import Polytope

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def _pdf(x: float) -> float:
    if math.isinf(x):
        return 0.0
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


def _xpdf(x: float) -> float:
    return 0.0 if math.isinf(x) else x * _pdf(x)


@dataclass(frozen=True)
class TruncatedNormal1D:
    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError("lower must be smaller than upper")

    def mass(self) -> float:
        """``Phi(upper) - Phi(lower)``, differencing upper tails on the right side."""
        if self.lower >= 0:
            return float(ndtr(-self.lower) - ndtr(-self.upper))
        if self.upper <= 0:
            return float(ndtr(self.upper) - ndtr(self.lower))
        return float(1.0 - ndtr(self.lower) - ndtr(-self.upper))


def moments_1d(t: TruncatedNormal1D) -> tuple[float, float]:
    """Mean and variance of ``N(0, 1)`` restricted to ``[lower, upper]``."""
    Z = t.mass()
    if not Z > 1e-300:
        raise UnderflowingMass(f"mass of [{t.lower}, {t.upper}] underflows ({Z!r})")
    l, u = t.lower, t.upper
    mean = (_pdf(l) - _pdf(u)) / Z
    var = 1.0 + (_xpdf(l) - _xpdf(u)) / Z - mean * mean
    return mean, var


def rejection_sample(poly: Polytope, n: int, rng: np.random.Generator,
                     pilot: int = 10_000, min_acceptance: float = 1e-3,
                     batch: int = 100_000) -> np.ndarray:
    """Draw ``n`` points of ``N(0, I)`` restricted to the polytope.

    A pilot run estimates the acceptance rate first; rates below
    ``min_acceptance`` raise :class:`AcceptanceTooLow`.
    """
    d = poly.d
    trial = rng.standard_normal((pilot, d))
    rate = np.mean(np.all(trial @ poly.A.T <= poly.b, axis=1))
    if rate < min_acceptance:
        raise AcceptanceTooLow(f"pilot acceptance rate {rate:.2e} < {min_acceptance:.0e}")
    kept = []
    have = 0
    while have < n:
        want = min(batch, int((n - have) / rate * 1.1) + 16)
        x = rng.standard_normal((want, d))
        x = x[np.all(x @ poly.A.T <= poly.b, axis=1)]
        kept.append(x)
        have += x.shape[0]
    return np.concatenate(kept, axis=0)[:n] if kept else np.empty((0, d))
