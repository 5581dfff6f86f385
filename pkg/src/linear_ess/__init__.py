"""Rejection-free elliptical slice sampling for Gaussians truncated to ``A x <= b``.

The ellipse through the current point is intersected with the polytope in
O(m log m) time and the next angle is drawn uniformly from the feasible arcs.
"""

from .angles import (EllipseProjection, RootKind, RootResult, interval_pairs, project,
                     solve_roots, to_interval_pair)
from .errors import (AcceptanceTooLow, DimensionMismatch, DuplicateAngles, EmptyIntervalSet,
                     InfeasibleCurrentPoint, InfeasibleStart, InvalidConstraint,
                     LinearESSError, UnderflowingMass)
from .intervals import (AngleIntervalSet, BruteTrace, ConstraintAngles,
                        active_intervals_brute, active_intervals_fast,
                        active_intervals_likelihood, sample_theta, trim)
from .polytope import (GaussianSpec, Polytope, Problem, is_feasible, load_problem,
                       residuals, save_problem, unwhiten, whiten, whiten_point)
from .sampler import (ChainRandom, ChainState, ChainStats, SamplerConfig, ess_step,
                      run_chain, run_parallel, sample_problem)

__version__ = "0.1.0"

__all__ = [
    "AcceptanceTooLow", "AngleIntervalSet", "BruteTrace", "ChainRandom", "ChainState",
    "ChainStats", "ConstraintAngles", "DimensionMismatch", "DuplicateAngles",
    "EllipseProjection", "EmptyIntervalSet", "GaussianSpec", "InfeasibleCurrentPoint",
    "InfeasibleStart", "InvalidConstraint", "LinearESSError", "Polytope", "Problem",
    "RootKind", "RootResult", "SamplerConfig", "UnderflowingMass",
    "active_intervals_brute", "active_intervals_fast", "active_intervals_likelihood",
    "ess_step", "interval_pairs", "is_feasible", "load_problem", "project", "residuals",
    "run_chain", "run_parallel", "sample_problem", "sample_theta", "save_problem",
    "solve_roots", "to_interval_pair", "trim", "unwhiten", "whiten", "whiten_point",
]
