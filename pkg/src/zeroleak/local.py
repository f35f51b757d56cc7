"""Per-user release mechanisms, their exact error probabilities, and the
entropy lower bound.

Both mechanisms look only at the non-sensitive queried positions and the
sensitive positions; their release tables are indexed by the mixed-radix
encodings of those value tuples. Cells with zero joint probability can never
be reached when data follows the model; their table entries carry the
branch-default values and are ignored by the exact audits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DNA, Alphabet, LocusSet, Query, ValidationError, decode_indices, encode_tuples
from .entropy import binary_entropy, inverse_binary_entropy
from .models import (
    conditional_given,
    joint_matrix,
    mismatch_prob,
    query_match_given_sensitive,
)

__all__ = [
    "LocalMechanism",
    "ErrorReport",
    "build_mechanism",
    "release",
    "release_batch",
    "true_answer",
    "true_answer_batch",
    "error_probabilities",
    "error_decomposition",
    "lower_bound",
    "aggregate_eae_iid",
]

_EQ_TOL = 1e-9  # tolerance for closed-form equality assertions


@dataclass(frozen=True)
class LocalMechanism:
    """Release-probability table for one user-side mechanism.

    ``table[i, w]`` is P(release 1 | X_lbar encodes to i, X_S encodes to w);
    ``ratio[i, w]`` is the dependence ratio min_w' P(i|w') / P(i|w) used to
    build it, and ``support[w]`` flags sensitive realizations with positive
    probability.
    """

    kind: str
    query: Query
    sensitive: LocusSet
    lbar: LocusSet
    mismatch: float
    table: np.ndarray
    ratio: np.ndarray
    support: np.ndarray
    alphabet: Alphabet = DNA

    def release_prob(self, sequence: np.ndarray) -> float:
        i, w = self._encode(np.asarray(sequence)[None, :])
        return float(self.table[i[0], w[0]])

    def _encode(self, rows: np.ndarray):
        c = self.alphabet.size
        lcols = np.array([p - 1 for p in self.lbar.indices], dtype=np.int64)
        scols = np.array([p - 1 for p in self.sensitive.indices], dtype=np.int64)
        need = max(self.lbar.max_locus(), self.sensitive.max_locus())
        if rows.shape[1] < need:
            raise ValidationError(
                f"sequence length {rows.shape[1]} does not cover locus {need}"
            )
        return encode_tuples(rows[:, lcols], c), encode_tuples(rows[:, scols], c)


@dataclass(frozen=True)
class ErrorReport:
    """Closed-form per-user error probabilities and the entropy lower bound."""

    p_e1: float
    p_e2: float
    best: float
    lower_bound: float
    case: str  # "E_le_half" | "E_gt_half"
    mismatch: float

    CSV_HEADER = ("model", "overlap_len", "mismatch", "p_e1", "p_e2", "best", "lower_bound")

    def to_csv_row(self, model_params: str, overlap_len: int) -> tuple:
        return (
            model_params,
            overlap_len,
            repr(self.mismatch),
            repr(self.p_e1),
            repr(self.p_e2),
            repr(self.best),
            repr(self.lower_bound),
        )


def _mechanism_ingredients(model, query: Query, sensitive: LocusSet):
    """Shared pieces: conditional matrix, its column-minimum, encoded v."""
    lbar = query.loci.difference(sensitive)
    cond, p_col = conditional_given(model, lbar, sensitive)
    support = p_col > 0.0
    minvec = cond[:, support].min(axis=1)
    c = model.alphabet.size
    iv = int(encode_tuples(np.array(query.reference_at(lbar)), c))
    eps = mismatch_prob(model, query, sensitive)
    return lbar, cond, p_col, support, minvec, iv, eps


def build_mechanism(kind: str, model, query: Query, sensitive: LocusSet) -> LocalMechanism:
    """Construct the release table for mechanism ``kind`` in {"m1", "m2"}."""
    if kind not in ("m1", "m2"):
        raise ValidationError(f"unknown mechanism kind {kind!r}")
    if len(query.loci) == 0:
        raise ValidationError("empty query")
    lbar, cond, p_col, support, minvec, iv, eps = _mechanism_ingredients(
        model, query, sensitive
    )
    ratio = np.divide(
        np.broadcast_to(minvec[:, None], cond.shape),
        cond,
        out=np.zeros_like(cond),
        where=cond > 0,
    )
    if kind == "m1":
        table = np.zeros_like(cond)
        if eps <= 0.5:
            table[iv] = ratio[iv]
    else:
        table = 1.0 - ratio
        if eps <= 0.5:
            table[iv] = 1.0
    return LocalMechanism(
        kind=kind,
        query=query,
        sensitive=sensitive,
        lbar=lbar,
        mismatch=eps,
        table=table,
        ratio=ratio,
        support=support,
        alphabet=model.alphabet,
    )


def release(mech: LocalMechanism, sequence: np.ndarray, rng: np.random.Generator) -> int:
    """One Bernoulli release for one sequence."""
    return int(rng.random() < mech.release_prob(sequence))


def release_batch(mech: LocalMechanism, dataset: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Vectorized releases for a ``(K, N)`` dataset."""
    i, w = mech._encode(np.asarray(dataset))
    p = mech.table[i, w]
    return (rng.random(len(p)) < p).astype(np.int64)


def true_answer(query: Query, sequence: np.ndarray) -> int:
    """Deterministic match indicator; the empty query matches vacuously."""
    return int(true_answer_batch(query, np.asarray(sequence)[None, :])[0])


def true_answer_batch(query: Query, dataset: np.ndarray) -> np.ndarray:
    dataset = np.asarray(dataset)
    if len(query.loci) == 0:
        return np.ones(dataset.shape[0], dtype=np.int64)
    if query.loci.max_locus() > dataset.shape[1]:
        raise ValidationError(
            f"sequence length {dataset.shape[1]} does not cover locus "
            f"{query.loci.max_locus()}"
        )
    cols = np.array([p - 1 for p in query.loci.indices], dtype=np.int64)
    ref = np.array(query.reference, dtype=np.int64)
    return np.all(dataset[:, cols] == ref, axis=1).astype(np.int64)


def error_probabilities(model, query: Query, sensitive: LocusSet) -> ErrorReport:
    """Exact per-user error probabilities of both mechanisms plus the bound."""
    lbar, cond, p_col, support, minvec, iv, eps = _mechanism_ingredients(
        model, query, sensitive
    )
    p_vl = model.joint_prob(query.loci, query.reference)
    min_at_v = float(minvec[iv])
    sum_min_rest = float(minvec.sum() - minvec[iv])
    if eps <= 0.5:
        p_e1 = p_vl + (2.0 * eps - 1.0) * min_at_v
        p_e2 = 1.0 - p_vl - sum_min_rest
        case = "E_le_half"
    else:
        p_e1 = p_vl
        p_e2 = 1.0 - p_vl - sum_min_rest - (2.0 * eps - 1.0) * min_at_v
        case = "E_gt_half"
    best = min(p_e1, p_e2)
    lb = lower_bound(model, query, sensitive)
    return ErrorReport(
        p_e1=float(p_e1),
        p_e2=float(p_e2),
        best=float(best),
        lower_bound=float(lb),
        case=case,
        mismatch=float(eps),
    )


def error_decomposition(mech: LocalMechanism, model) -> tuple[float, float]:
    """Exact error components (P(Y=1, A=0), P(Y=0, A=1)) from the table.

    Their sum is an independent route to the per-user error probability; a
    zero component means the mechanism only errs in one direction, so the
    aggregate absolute error is exactly K times the per-user error.
    """
    jm = joint_matrix(model, mech.lbar, mech.sensitive)
    c = model.alphabet.size
    iv = int(encode_tuples(np.array(mech.query.reference_at(mech.lbar)), c))
    overlap = mech.query.loci.intersection(mech.sensitive)
    col_match = np.ones(jm.shape[1], dtype=bool)
    if len(overlap) > 0:
        pos = overlap.positions_in(mech.sensitive)
        cols = decode_indices(np.arange(jm.shape[1]), c, len(mech.sensitive))
        col_match = np.all(
            cols[:, pos] == np.array(mech.query.reference_at(overlap)), axis=1
        )
    a_cell = np.zeros(jm.shape, dtype=bool)
    a_cell[iv, col_match] = True
    e01 = float((mech.table * jm)[~a_cell].sum())
    e10 = float(((1.0 - mech.table) * jm)[a_cell].sum())
    return e01, e10


def lower_bound(model, query: Query, sensitive: LocusSet) -> float:
    """Entropy lower bound on the error of any perfectly private release.

    Uses the exact distributions of the match indicator, its split across
    the sensitive/non-sensitive parts of the query, and the conditional law
    given the sensitive positions; the final inversion takes the lower
    branch of the binary entropy.
    """
    lbar = query.loci.difference(sensitive)
    overlap = query.loci.intersection(sensitive)
    p_a = model.joint_prob(query.loci, query.reference)
    h_a = binary_entropy(min(max(p_a, 0.0), 1.0))

    # Conditional entropy of the non-sensitive match given the overlap match.
    p_lbar = model.joint_prob(lbar, query.reference_at(lbar))
    p_over = model.joint_prob(overlap, query.reference_at(overlap))
    h_split = 0.0
    if p_over > 0.0:
        h_split += p_over * binary_entropy(min(max(p_a / p_over, 0.0), 1.0))
    if p_over < 1.0:
        cond0 = (p_lbar - p_a) / (1.0 - p_over)
        h_split += (1.0 - p_over) * binary_entropy(min(max(cond0, 0.0), 1.0))

    # Conditional entropy of the match given the sensitive realization.
    q, p_col = query_match_given_sensitive(model, query, sensitive)
    sup = p_col > 0.0
    h_given_s = float(
        sum(
            p_col[w] * binary_entropy(min(max(float(q[w]), 0.0), 1.0))
            for w in np.nonzero(sup)[0]
        )
    )

    t = h_a - min(h_split, h_given_s)
    return inverse_binary_entropy(min(max(t, 0.0), 1.0))


def aggregate_eae_iid(model, query: Query, sensitive: LocusSet, n_users: int) -> float:
    """Expected absolute aggregate error when every one of ``n_users``
    independent same-prior users runs the lower-error mechanism.

    Exact whenever that mechanism never errs in both directions (see
    :func:`error_decomposition`); otherwise an upper bound.
    """
    if n_users < 0:
        raise ValidationError("user count must be >= 0")
    if n_users == 0:
        return 0.0
    return n_users * error_probabilities(model, query, sensitive).best
