"""Trusted-aggregator release channel over counts 0..K and its exact error.

The channel keeps the true count with probability ``P_A(a) + (1-P_A(a))*R``
and moves to any other count y with probability ``P_A(y)*(1-R)``, where R is
the ratio of the worst-case to the realized conditional count distribution
given the sensitive matrix. All conditional count distributions are
Poisson-binomial convolutions of per-user conditional match probabilities;
the worst case over sensitive matrices reduces, for independent same-prior
users, to scanning how many users sit at the largest versus smallest
per-user probability (the pmf is multilinear in the per-user terms, so the
extremum is attained at those vertices). Exact enumeration over all
matrices is retained as a cross-check for small instances.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .core import DNA, Alphabet, CapacityError, LocusSet, Query, ValidationError, encode_tuples
from .models import query_match_given_sensitive

__all__ = [
    "AggregateDistribution",
    "CentralChannel",
    "poisson_binomial",
    "aggregate_distribution",
    "conditional_aggregate",
    "min_conditional_aggregate",
    "build_central_channel",
    "central_release",
    "central_expected_error",
    "central_eae_cdf_form",
    "compare_central_closed_forms",
    "MAX_ENUM_SYMBOLS",
]

MAX_ENUM_SYMBOLS = 10  # default cap on K*|S| for sensitive-matrix enumeration


def poisson_binomial(probs) -> np.ndarray:
    """pmf of a sum of independent Bernoulli(p_k), by iterative convolution."""
    probs = np.asarray(probs, dtype=float)
    if probs.size and (probs.min() < 0.0 or probs.max() > 1.0):
        raise ValidationError("probabilities must lie in [0, 1]")
    pmf = np.array([1.0])
    for p in probs:
        nxt = np.zeros(pmf.size + 1)
        nxt[:-1] = pmf * (1.0 - p)
        nxt[1:] += pmf * p
        pmf = nxt
    return pmf


@dataclass(frozen=True)
class AggregateDistribution:
    """pmf and cdf of the true count over {0..K}."""

    pmf: np.ndarray
    cdf: np.ndarray
    k_users: int

    @classmethod
    def from_match_probs(cls, per_user_match_probs) -> "AggregateDistribution":
        pmf = poisson_binomial(per_user_match_probs)
        return cls(pmf=pmf, cdf=np.cumsum(pmf), k_users=pmf.size - 1)

    def mean(self) -> float:
        return float(np.arange(self.pmf.size) @ self.pmf)


def aggregate_distribution(per_user_match_probs) -> AggregateDistribution:
    """Distribution of the true count for independent users."""
    return AggregateDistribution.from_match_probs(per_user_match_probs)


def _binomial_family(max_n: int, p: float) -> list[np.ndarray]:
    """pmfs of Binomial(m, p) for m = 0..max_n."""
    fam = [np.array([1.0])]
    step = np.array([1.0 - p, p])
    for _ in range(max_n):
        prev = fam[-1]
        nxt = np.zeros(prev.size + 1)
        nxt[:-1] = prev * step[0]
        nxt[1:] += prev * step[1]
        fam.append(nxt)
    return fam


def _user_q_support(model, query: Query, sensitive: LocusSet):
    """Per-user conditional match probabilities over the sensitive support."""
    q, p_col = query_match_given_sensitive(model, query, sensitive)
    sup = p_col > 0.0
    if not np.any(sup):
        raise ValidationError("sensitive marginal has empty support")
    return q, p_col, sup


def conditional_aggregate(
    model, query: Query, sensitive: LocusSet, sensitive_matrix: np.ndarray
) -> np.ndarray:
    """pmf of the count given every user's sensitive tuple.

    ``sensitive_matrix`` has one row per user with that user's values at the
    sensitive loci. Users are independent and share ``model``.
    """
    q, p_col, _ = _user_q_support(model, query, sensitive)
    mat = np.asarray(sensitive_matrix, dtype=np.int64)
    if mat.ndim != 2 or mat.shape[1] != len(sensitive):
        raise ValidationError(
            f"sensitive matrix must be (K, {len(sensitive)}), got {mat.shape}"
        )
    c = model.alphabet.size
    if mat.size and (mat.min() < 0 or mat.max() >= c):
        raise ValidationError("sensitive matrix contains out-of-alphabet values")
    codes = encode_tuples(mat, c)
    if np.any(p_col[codes] <= 0.0):
        raise ValidationError("conditioning on a zero-probability sensitive tuple")
    return poisson_binomial(q[codes])


def min_conditional_aggregate(
    model,
    query: Query,
    sensitive: LocusSet,
    k_users: int,
    method: str = "auto",
    max_symbols: int = MAX_ENUM_SYMBOLS,
) -> np.ndarray:
    """Entrywise minimum of the conditional count pmf over all
    positive-probability sensitive matrices.

    ``method`` is "vertex" (scan extreme per-user assignments; exact for
    independent same-prior users), "enumerate" (all matrices; capacity
    limited), or "auto".
    """
    if k_users < 1:
        raise ValidationError("user count must be >= 1")
    q, p_col, sup = _user_q_support(model, query, sensitive)
    qs = q[sup]
    if method == "auto":
        method = "vertex"
    if method == "vertex":
        q_lo, q_hi = float(qs.min()), float(qs.max())
        if q_lo == q_hi:
            return poisson_binomial([q_lo] * k_users)
        fam_hi = _binomial_family(k_users, q_hi)
        fam_lo = _binomial_family(k_users, q_lo)
        best = np.full(k_users + 1, np.inf)
        for m in range(k_users + 1):
            pmf = np.convolve(fam_hi[m], fam_lo[k_users - m])
            np.minimum(best, pmf, out=best)
        return best
    if method == "enumerate":
        if k_users * len(sensitive) > max_symbols:
            raise CapacityError(
                f"enumerating {k_users} users x {len(sensitive)} sensitive loci "
                f"exceeds the {max_symbols}-symbol cap; use method='vertex'"
            )
        best = np.full(k_users + 1, np.inf)
        uniq = np.unique(qs)
        for combo in product(uniq, repeat=k_users):
            np.minimum(best, poisson_binomial(combo), out=best)
        return best
    raise ValidationError(f"unknown method {method!r}")


@dataclass(frozen=True)
class CentralChannel:
    """Count-release channel: everything needed to produce a row on demand.

    Row ``(a, x_S)`` places ``p_a[y]*(1-R)`` on every ``y != a`` and the
    remainder on ``y = a``, with ``R = min_cond[a] / P(A=a | x_S)``; rows sum
    to one algebraically. Unreachable states (zero conditional probability)
    use ``R = 0`` by convention.
    """

    k_users: int
    query: Query
    sensitive: LocusSet
    p_a: np.ndarray
    min_cond: np.ndarray
    user_q: np.ndarray
    col_prob: np.ndarray
    alphabet: Alphabet = DNA
    max_symbols: int = MAX_ENUM_SYMBOLS

    def cond_pmf(self, sensitive_matrix: np.ndarray) -> np.ndarray:
        """P(A = . | X_S = sensitive_matrix)."""
        mat = np.asarray(sensitive_matrix, dtype=np.int64)
        codes = encode_tuples(mat, self.alphabet.size)
        if mat.shape != (self.k_users, len(self.sensitive)):
            raise ValidationError(
                f"sensitive matrix must be ({self.k_users}, {len(self.sensitive)})"
            )
        if np.any(self.col_prob[codes] <= 0.0):
            raise ValidationError("conditioning on a zero-probability sensitive tuple")
        return poisson_binomial(self.user_q[codes])

    def ratio(self, a: int, sensitive_matrix: np.ndarray) -> float:
        cond = self.cond_pmf(sensitive_matrix)
        return self.ratio_from_cond(a, cond)

    def ratio_from_cond(self, a: int, cond: np.ndarray) -> float:
        if cond[a] <= 0.0:
            return 0.0
        return float(self.min_cond[a] / cond[a])

    def ratio_matrix(self, cond: np.ndarray) -> np.ndarray:
        """Ratios for a batch of conditional pmfs, shape ``(n, K+1)``."""
        return np.divide(
            np.broadcast_to(self.min_cond, cond.shape),
            cond,
            out=np.zeros_like(cond),
            where=cond > 0,
        )

    def row(self, a: int, sensitive_matrix: np.ndarray) -> np.ndarray:
        """Release pmf over y for true count ``a`` and the given matrix."""
        if not 0 <= a <= self.k_users:
            raise ValidationError(f"count {a} outside 0..{self.k_users}")
        r = self.ratio(a, sensitive_matrix)
        return self.row_from_ratio(a, r)

    def row_from_ratio(self, a: int, r: float) -> np.ndarray:
        row = self.p_a * (1.0 - r)
        row[a] = self.p_a[a] + (1.0 - self.p_a[a]) * r
        return row

    def enumerate_support_matrices(self):
        """Yield ``(codes, probability)`` for every positive-probability
        sensitive matrix; capacity limited by ``max_symbols``."""
        if self.k_users * len(self.sensitive) > self.max_symbols:
            raise CapacityError(
                f"{self.k_users} users x {len(self.sensitive)} sensitive loci "
                f"exceeds the {self.max_symbols}-symbol enumeration cap"
            )
        sup_codes = np.nonzero(self.col_prob > 0.0)[0]
        for combo in product(sup_codes, repeat=self.k_users):
            codes = np.array(combo, dtype=np.int64)
            yield codes, float(np.prod(self.col_prob[codes]))

    def release_law(self) -> np.ndarray:
        """Marginal law of the released count: ``p_a*(1-sum(min)) + min``."""
        return self.p_a * (1.0 - self.min_cond.sum()) + self.min_cond

    def expected_error(self) -> float:
        """Exact expected absolute error (double-sum form)."""
        ys = np.arange(self.k_users + 1)
        total = 0.0
        for a in range(self.k_users + 1):
            total += float(np.abs(ys - a) @ self.p_a) * (self.p_a[a] - self.min_cond[a])
        return float(total)


def build_central_channel(
    model,
    query: Query,
    sensitive: LocusSet,
    k_users: int,
    min_method: str = "auto",
    max_symbols: int = MAX_ENUM_SYMBOLS,
) -> CentralChannel:
    """Construct the channel for ``k_users`` independent users of ``model``."""
    if k_users < 1:
        raise ValidationError("user count must be >= 1")
    q, p_col, sup = _user_q_support(model, query, sensitive)
    p_match = float(model.joint_prob(query.loci, query.reference))
    p_a = poisson_binomial([p_match] * k_users)
    min_cond = min_conditional_aggregate(
        model, query, sensitive, k_users, method=min_method, max_symbols=max_symbols
    )
    return CentralChannel(
        k_users=k_users,
        query=query,
        sensitive=sensitive,
        p_a=p_a,
        min_cond=min_cond,
        user_q=q,
        col_prob=p_col,
        alphabet=model.alphabet,
        max_symbols=max_symbols,
    )


def central_release(
    channel: CentralChannel,
    a: int,
    sensitive_matrix: np.ndarray,
    rng: np.random.Generator,
) -> int:
    """Sample a released count from the channel row at ``(a, x_S)``."""
    row = channel.row(int(a), sensitive_matrix)
    u = rng.random()
    return int(np.searchsorted(np.cumsum(row), u, side="right").clip(0, channel.k_users))


def central_expected_error(
    model,
    query: Query,
    sensitive: LocusSet,
    k_users: int,
    min_method: str = "auto",
) -> float:
    """Exact expected absolute error of the channel (double-sum form)."""
    channel = build_central_channel(model, query, sensitive, k_users, min_method=min_method)
    return channel.expected_error()


def central_eae_cdf_form(p_match: float, k_users: int) -> float:
    """cdf-weighted closed form for uniform i.i.d. data: ``2*(sum_a a*P(a)*F(a)
    - K*p_match**2)``.

    Retained for cross-checking only; the double-sum form of
    :func:`central_expected_error` is authoritative and the two generally
    disagree (see :func:`compare_central_closed_forms`).
    """
    dist = aggregate_distribution([p_match] * k_users)
    a = np.arange(k_users + 1)
    return float(2.0 * ((a * dist.pmf) @ dist.cdf - k_users * p_match**2))


def compare_central_closed_forms(
    model, query: Query, sensitive: LocusSet, k_users: int
) -> dict:
    """Evaluate both closed forms and report their (possible) discrepancy."""
    exact = central_expected_error(model, query, sensitive, k_users)
    p_match = float(model.joint_prob(query.loci, query.reference))
    cdf_form = central_eae_cdf_form(p_match, k_users)
    return {
        "double_sum": exact,
        "cdf_form": cdf_form,
        "abs_diff": abs(exact - cdf_form),
        "agree_1e9": abs(exact - cdf_form) <= 1e-9,
    }
