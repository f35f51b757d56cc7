"""Differential-privacy comparison mechanisms and their analytic errors.

These are the classic baselines the private count mechanisms are compared
against: binary randomized response for per-user bits and the Laplace
mechanism for aggregated counts (sensitivity 1).
"""

from __future__ import annotations

import math

import numpy as np

from .core import ValidationError

__all__ = [
    "randomized_response",
    "rr_error_prob",
    "ldp_count_mse",
    "laplace_count_release",
    "laplace_eae",
    "epsilon_for_target_error",
]

EPSILON_SEARCH_RANGE = (1e-3, 50.0)
EPSILON_SEARCH_TOL = 1e-6


def _check_epsilon(epsilon: float, positive: bool = False) -> float:
    epsilon = float(epsilon)
    if epsilon < 0.0 or (positive and epsilon == 0.0):
        kind = "positive" if positive else "non-negative"
        raise ValidationError(f"epsilon must be {kind}, got {epsilon!r}")
    return epsilon


def rr_error_prob(epsilon: float) -> float:
    """Flip probability of binary randomized response: 1 / (e^eps + 1)."""
    epsilon = _check_epsilon(epsilon)
    return 1.0 / (math.exp(epsilon) + 1.0)


def randomized_response(a: int, epsilon: float, rng: np.random.Generator) -> int:
    """Release the bit ``a``, flipped with probability ``1/(e^eps + 1)``."""
    a = int(a)
    if a not in (0, 1):
        raise ValidationError(f"randomized response input must be a bit, got {a}")
    flip = rng.random() < rr_error_prob(epsilon)
    return a ^ int(flip)


def ldp_count_mse(n_users: int, epsilon: float) -> float:
    """Minimum MSE of locally private counting: ``N e^eps (e^eps+1)/(e^eps-1)^2``.

    Diverges as epsilon -> 0, so zero budgets are rejected.
    """
    if n_users < 0:
        raise ValidationError("user count must be >= 0")
    epsilon = _check_epsilon(epsilon, positive=True)
    e = math.exp(epsilon)
    return n_users * e * (e + 1.0) / (e - 1.0) ** 2


def laplace_count_release(a: float, epsilon: float, rng: np.random.Generator) -> float:
    """Count plus Laplace(1/eps) noise; released unrounded.

    Optional clamping to [0, K] is left to callers: it can only shrink the
    absolute error, so raw releases keep the comparison conservative.
    """
    epsilon = _check_epsilon(epsilon, positive=True)
    return float(a) + float(rng.laplace(0.0, 1.0 / epsilon))


def laplace_eae(epsilon: float) -> float:
    """Expected absolute error of the Laplace count release: 1/eps."""
    epsilon = _check_epsilon(epsilon, positive=True)
    return 1.0 / epsilon


def epsilon_for_target_error(
    target_error: float,
    mechanism: str = "laplace",
    n_users: int | None = None,
) -> float:
    """Smallest budget whose analytic error matches ``target_error``.

    Bisects the monotone error curve of the chosen mechanism ("laplace" ->
    expected absolute error 1/eps, "rr" -> flip probability, "ldp_mse" ->
    aggregated MSE needing ``n_users``) over ``EPSILON_SEARCH_RANGE``.
    """
    if not math.isfinite(target_error) or target_error <= 0.0:
        raise ValidationError(f"target error must be positive, got {target_error!r}")
    if mechanism == "laplace":
        curve = laplace_eae
    elif mechanism == "rr":
        curve = rr_error_prob
    elif mechanism == "ldp_mse":
        if n_users is None:
            raise ValidationError("ldp_mse matching needs n_users")
        curve = lambda eps: ldp_count_mse(n_users, eps)
    else:
        raise ValidationError(f"unknown mechanism {mechanism!r}")
    lo, hi = EPSILON_SEARCH_RANGE
    if curve(lo) < target_error:
        # Even the weakest searched budget beats the target. Randomized
        # response tops out at an error of 1/2, reached exactly at eps = 0.
        return 0.0 if mechanism == "rr" else lo
    if curve(hi) > target_error:
        raise ValidationError(
            f"target error {target_error!r} unattainable within epsilon <= {hi}"
        )
    while hi - lo > EPSILON_SEARCH_TOL * 1e-3:
        mid = 0.5 * (lo + hi)
        if curve(mid) > target_error:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
