"""Sequence priors and exact probability computations over locus subsets.

Two model families are provided:

* :class:`MarkovChainModel` — first-order chain over the alphabet; joint
  probabilities over arbitrary locus subsets are computed exactly by
  eliminating the unconstrained intermediate positions (powered transition
  matrices), never by enumerating all ``C**N`` sequences.
* :class:`TabularModel` — an explicit pmf over a fixed set of support loci,
  typically fitted from an empirical dataset.

All probabilities are 64-bit floats; pmf validation uses ``PMF_TOL`` and
normalization checks in tests use ``SUM_TOL``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    DNA,
    Alphabet,
    CapacityError,
    LocusSet,
    Query,
    ValidationError,
    decode_indices,
    encode_tuples,
)

__all__ = [
    "PMF_TOL",
    "SUM_TOL",
    "MAX_TABLE_LOCI",
    "MarkovChainModel",
    "TabularModel",
    "fit_tabular",
    "joint_prob",
    "conditional_prob",
    "mismatch_prob",
    "sample_sequence",
    "joint_matrix",
    "conditional_given",
    "query_match_given_sensitive",
]

PMF_TOL = 1e-12   # construction-time sum-to-one tolerance
SUM_TOL = 1e-10   # tolerance for derived normalization checks
MAX_TABLE_LOCI = 12  # hard cap on exact joint-table width (4**12 cells)


def _check_pmf(p: np.ndarray, what: str, tol: float = PMF_TOL) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if np.any(p < 0):
        raise ValidationError(f"{what} has negative entries")
    if abs(p.sum() - 1.0) > tol:
        raise ValidationError(f"{what} sums to {p.sum()!r}, expected 1 +/- {tol}")
    return p


class MarkovChainModel:
    """First-order Markov prior over fixed-length sequences.

    Parameters
    ----------
    length : int
        Sequence length N (>= 1).
    initial : array-like
        pmf of the first position, length ``alphabet.size``.
    transition : array-like
        Row-stochastic ``C x C`` matrix, ``transition[i, j] = P(next=j | cur=i)``.
    """

    def __init__(self, length: int, initial, transition, alphabet: Alphabet = DNA):
        if length < 1:
            raise ValidationError("sequence length must be >= 1")
        self.alphabet = alphabet
        self.length = int(length)
        c = alphabet.size
        self.initial = _check_pmf(initial, "initial distribution")
        if self.initial.shape != (c,):
            raise ValidationError(f"initial pmf must have length {c}")
        t = np.asarray(transition, dtype=float)
        if t.shape != (c, c):
            raise ValidationError(f"transition matrix must be {c}x{c}")
        for i in range(c):
            _check_pmf(t[i], f"transition row {i}")
        self.transition = t
        self._powers: dict[int, np.ndarray] = {0: np.eye(c), 1: t}

    @classmethod
    def from_stay_prob(
        cls,
        length: int,
        stay_prob: float,
        initial=None,
        alphabet: Alphabet = DNA,
    ) -> "MarkovChainModel":
        """Symmetric chain: diagonal ``stay_prob``, off-diagonal mass split evenly."""
        if not 0.0 <= stay_prob <= 1.0:
            raise ValidationError("stay probability must be in [0, 1]")
        c = alphabet.size
        off = (1.0 - stay_prob) / (c - 1)
        t = np.full((c, c), off)
        np.fill_diagonal(t, stay_prob)
        if initial is None:
            initial = np.full(c, 1.0 / c)
        return cls(length, initial, t, alphabet)

    def _power(self, d: int) -> np.ndarray:
        if d not in self._powers:
            self._powers[d] = np.linalg.matrix_power(self.transition, d)
        return self._powers[d]

    def _check_loci(self, loci: LocusSet):
        if loci.max_locus() > self.length:
            raise ValidationError(
                f"locus {loci.max_locus()} beyond sequence length {self.length}"
            )

    def marginal_at(self, locus: int) -> np.ndarray:
        """pmf of the single position `locus` (1-based)."""
        if not 1 <= locus <= self.length:
            raise ValidationError(f"locus {locus} out of range 1..{self.length}")
        return self.initial @ self._power(locus - 1)

    def joint_table(self, loci: LocusSet) -> np.ndarray:
        """Exact joint pmf over `loci`, shape ``(C,) * len(loci)``."""
        self._check_loci(loci)
        if len(loci) > MAX_TABLE_LOCI:
            raise CapacityError(
                f"joint table over {len(loci)} loci exceeds the {MAX_TABLE_LOCI}-locus cap"
            )
        if len(loci) == 0:
            return np.array(1.0)
        idx = loci.indices
        table = self.marginal_at(idx[0])
        for prev, cur in zip(idx, idx[1:]):
            table = table[..., None] * self._power(cur - prev)
        return table

    def joint_prob(self, loci: LocusSet, values) -> float:
        """P(X_loci = values) via the chain product, O(|loci|)."""
        self._check_loci(loci)
        values = tuple(int(v) for v in values)
        if len(values) != len(loci):
            raise ValidationError(
                f"got {len(values)} values for {len(loci)} loci"
            )
        if any(not 0 <= v < self.alphabet.size for v in values):
            raise ValidationError("value outside alphabet range")
        if len(loci) == 0:
            return 1.0
        idx = loci.indices
        p = self.marginal_at(idx[0])[values[0]]
        for k in range(1, len(idx)):
            p *= self._power(idx[k] - idx[k - 1])[values[k - 1], values[k]]
        return float(p)

    def sample(self, rng: np.random.Generator, count: int = 1) -> np.ndarray:
        """Ancestral sampling; returns an ``(count, N)`` index array."""
        c = self.alphabet.size
        out = np.empty((count, self.length), dtype=np.int64)
        init_cdf = np.cumsum(self.initial)
        out[:, 0] = np.searchsorted(init_cdf, rng.random(count), side="right").clip(0, c - 1)
        row_cdf = np.cumsum(self.transition, axis=1)
        for j in range(1, self.length):
            u = rng.random(count)
            out[:, j] = (u[:, None] > row_cdf[out[:, j - 1]]).sum(axis=1)
        return out


class TabularModel:
    """Explicit joint pmf over a fixed set of support loci.

    Queries are answerable only for locus subsets of the support; anything
    else raises, since the model carries no information beyond it.
    """

    def __init__(
        self,
        length: int,
        support: LocusSet,
        table,
        alphabet: Alphabet = DNA,
    ):
        if length < 1:
            raise ValidationError("sequence length must be >= 1")
        if support.max_locus() > length:
            raise ValidationError("support loci beyond sequence length")
        if len(support) > MAX_TABLE_LOCI:
            raise CapacityError(
                f"tabular support of {len(support)} loci exceeds the "
                f"{MAX_TABLE_LOCI}-locus cap"
            )
        self.alphabet = alphabet
        self.length = int(length)
        self.support = support
        c = alphabet.size
        table = np.asarray(table, dtype=float)
        if table.shape != (c,) * len(support):
            raise ValidationError(
                f"table shape {table.shape} does not match {(c,) * len(support)}"
            )
        self.table = _check_pmf(table, "tabular pmf")

    def joint_table(self, loci: LocusSet) -> np.ndarray:
        keep = loci.positions_in(self.support)  # raises if outside support
        drop = tuple(i for i in range(len(self.support)) if i not in keep)
        return self.table.sum(axis=drop) if drop else self.table.copy()

    def joint_prob(self, loci: LocusSet, values) -> float:
        values = tuple(int(v) for v in values)
        if len(values) != len(loci):
            raise ValidationError(f"got {len(values)} values for {len(loci)} loci")
        if len(loci) == 0:
            return 1.0
        return float(self.joint_table(loci)[values])

    def sample(self, rng: np.random.Generator, count: int = 1) -> np.ndarray:
        if self.support.indices != tuple(range(1, self.length + 1)):
            raise ValidationError(
                "sampling requires the tabular support to cover every position"
            )
        c = self.alphabet.size
        flat = self.table.reshape(-1)
        cells = rng.choice(flat.size, size=count, p=flat)
        return decode_indices(cells, c, self.length)


def fit_tabular(
    dataset: np.ndarray,
    support: LocusSet,
    alphabet: Alphabet = DNA,
    smoothing: float = 0.0,
) -> TabularModel:
    """Empirical joint frequencies of `dataset` restricted to `support`.

    ``smoothing`` adds that pseudocount to every cell (add-one style) before
    normalizing; the default 0.0 keeps raw frequencies, so unseen tuples get
    exactly zero mass.
    """
    dataset = np.asarray(dataset)
    if dataset.ndim != 2 or dataset.shape[0] == 0:
        raise ValidationError("dataset must be a non-empty 2-D array")
    n = dataset.shape[1]
    if support.max_locus() > n:
        raise ValidationError("support loci beyond dataset row length")
    c = alphabet.size
    cols = np.array([i - 1 for i in support.indices], dtype=np.int64)
    codes = encode_tuples(dataset[:, cols], c)
    counts = np.bincount(codes, minlength=c ** len(support)).astype(float)
    counts += float(smoothing)
    table = (counts / counts.sum()).reshape((c,) * len(support))
    return TabularModel(n, support, table, alphabet)


# ---------------------------------------------------------------------------
# Model-generic operations
# ---------------------------------------------------------------------------

def joint_prob(model, loci: LocusSet, values) -> float:
    """P(X_loci = values) under `model`."""
    return model.joint_prob(loci, values)


def conditional_prob(model, target: LocusSet, target_values, given: LocusSet, given_values) -> float:
    """P(X_target = target_values | X_given = given_values); exact ratio."""
    if len(target.intersection(given)) != 0:
        raise ValidationError("target and conditioning loci must be disjoint")
    if len(target) == 0:
        return 1.0
    p_given = model.joint_prob(given, given_values)
    if p_given <= 0.0:
        raise ValidationError("conditioning on a zero-probability event")
    union = target.union(given)
    merged = dict(zip(target.indices, (int(v) for v in target_values)))
    merged.update(zip(given.indices, (int(v) for v in given_values)))
    union_values = tuple(merged[locus] for locus in union.indices)
    return model.joint_prob(union, union_values) / p_given


def mismatch_prob(model, query: Query, sensitive: LocusSet) -> float:
    """P(X on the queried-and-sensitive overlap differs from the reference).

    Zero when the query and sensitive loci are disjoint.
    """
    overlap = query.loci.intersection(sensitive)
    if len(overlap) == 0:
        return 0.0
    return 1.0 - model.joint_prob(overlap, query.reference_at(overlap))


def sample_sequence(model, rng: np.random.Generator) -> np.ndarray:
    """One sequence of alphabet indices, shape ``(N,)``."""
    return model.sample(rng, 1)[0]


def joint_matrix(model, row_loci: LocusSet, col_loci: LocusSet) -> np.ndarray:
    """Joint pmf arranged as a ``(C**|row|, C**|col|)`` matrix.

    Row/column cell indices are the mixed-radix encodings of the value tuples
    (first locus most significant). The two locus sets must be disjoint.
    """
    if len(row_loci.intersection(col_loci)) != 0:
        raise ValidationError("row and column loci must be disjoint")
    union = row_loci.union(col_loci)
    table = model.joint_table(union)
    perm = row_loci.positions_in(union) + col_loci.positions_in(union)
    c = model.alphabet.size
    return np.transpose(table, perm).reshape(c ** len(row_loci), c ** len(col_loci))


def conditional_given(model, row_loci: LocusSet, col_loci: LocusSet):
    """Conditional matrix ``P(row | col)`` plus the column marginal.

    Returns ``(cond, p_col)`` where ``cond[i, w] = P(row=i | col=w)`` for
    columns with ``p_col[w] > 0`` and 0 elsewhere.
    """
    jm = joint_matrix(model, row_loci, col_loci)
    p_col = jm.sum(axis=0)
    cond = np.divide(jm, p_col, out=np.zeros_like(jm), where=p_col > 0)
    return cond, p_col


def query_match_given_sensitive(model, query: Query, sensitive: LocusSet):
    """Per-realization match probabilities ``q[w] = P(X_L = v_L | X_S = w)``.

    Returns ``(q, p_col)`` over all encoded sensitive tuples ``w``; entries
    with ``p_col[w] == 0`` are set to 0 and carry no meaning.
    """
    lbar = query.loci.difference(sensitive)
    overlap = query.loci.intersection(sensitive)
    cond, p_col = conditional_given(model, lbar, sensitive)
    c = model.alphabet.size
    v_lbar = encode_tuples(np.array(query.reference_at(lbar)), c)
    q = cond[int(v_lbar)].copy()
    if len(overlap) > 0:
        pos = overlap.positions_in(sensitive)
        cols = decode_indices(np.arange(c ** len(sensitive)), c, len(sensitive))
        match = np.all(cols[:, pos] == np.array(query.reference_at(overlap)), axis=1)
        q[~match] = 0.0
    return q, p_col
