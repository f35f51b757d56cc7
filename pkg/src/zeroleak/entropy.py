"""Binary entropy and its lower-branch inverse (bits)."""

from __future__ import annotations

import math

from .core import ValidationError

__all__ = ["binary_entropy", "inverse_binary_entropy"]


def binary_entropy(p: float) -> float:
    """h(p) in bits, with h(0) = h(1) = 0."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"probability {p!r} outside [0, 1]")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def inverse_binary_entropy(t: float) -> float:
    """Lower-branch inverse: the p in [0, 1/2] with h(p) = t.

    Inputs may overshoot [0, 1] by up to 1e-9 (floating-point headroom) and
    are clamped; anything further out is rejected. Bisection runs to interval
    width below 1e-15, so the result is accurate in p even where h is flat.
    """
    if t < -1e-9 or t > 1.0 + 1e-9:
        raise ValidationError(f"entropy value {t!r} outside [0, 1]")
    t = min(max(t, 0.0), 1.0)
    if t == 0.0:
        return 0.0
    if t == 1.0:
        return 0.5
    lo, hi = 0.0, 0.5
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if binary_entropy(mid) < t:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
