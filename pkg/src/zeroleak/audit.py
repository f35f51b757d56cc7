"""Machine-checkable certification that a release mechanism leaks nothing
about the sensitive positions.

The exact audits enumerate the sensitive support and compare every
conditional output law against the marginal one; any mechanism whose output
depends on the sensitive realization shows a positive deviation. The
empirical audit is the statistical fallback for supports too large to
enumerate.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .core import CapacityError, ValidationError, decode_indices, encode_tuples
from .central import CentralChannel
from .local import LocalMechanism
from .models import conditional_given

__all__ = [
    "EXACT_AUDIT_TOL",
    "AuditReport",
    "audit_local",
    "audit_central",
    "audit_empirical",
]

EXACT_AUDIT_TOL = 1e-10  # floating-point headroom over the algebraic zero


@dataclass(frozen=True)
class AuditReport:
    """Outcome of one privacy audit."""

    max_deviation: float
    worst_cell: tuple
    passed: bool
    tolerance: float
    method: str  # "exact_enumeration" | "empirical"
    excluded_strata: tuple = ()

    def to_json(self) -> str:
        d = asdict(self)
        d["worst_cell"] = list(self.worst_cell)
        d["excluded_strata"] = [list(s) if isinstance(s, tuple) else s for s in self.excluded_strata]
        return json.dumps(d, indent=2, sort_keys=True)

    CSV_HEADER = ("method", "max_deviation", "tolerance", "passed", "worst_cell")

    def to_csv_row(self) -> tuple:
        return (
            self.method,
            repr(self.max_deviation),
            repr(self.tolerance),
            str(self.passed).lower(),
            "|".join(str(x) for x in self.worst_cell),
        )


def audit_local(
    mech: LocalMechanism,
    model,
    sensitive=None,
    tolerance: float = EXACT_AUDIT_TOL,
) -> AuditReport:
    """Exact audit of a per-user release table.

    Computes P(release=1 | x_S) by summing the table against the exact
    conditional law for every positive-probability sensitive realization and
    reports the largest deviation from the marginal release law.
    """
    if sensitive is not None and sensitive != mech.sensitive:
        raise ValidationError("mechanism was built for a different sensitive set")
    try:
        cond, p_col = conditional_given(model, mech.lbar, mech.sensitive)
    except CapacityError as exc:
        raise CapacityError(f"{exc}; use audit_empirical instead") from exc
    if mech.table.shape != cond.shape:
        raise ValidationError("release table shape does not match the model support")
    sup = p_col > 0.0
    p1_given = (mech.table * cond).sum(axis=0)
    p1_marginal = float(p1_given[sup] @ p_col[sup])
    dev = np.abs(p1_given - p1_marginal)
    dev[~sup] = 0.0
    worst = int(np.argmax(dev))
    max_dev = float(dev[worst])
    worst_tuple = tuple(
        int(v) for v in decode_indices(np.array(worst), model.alphabet.size, len(mech.sensitive))
    )
    return AuditReport(
        max_deviation=max_dev,
        worst_cell=(1, worst_tuple),
        passed=max_dev <= tolerance,
        tolerance=tolerance,
        method="exact_enumeration",
    )


def audit_central(channel: CentralChannel, tolerance: float = EXACT_AUDIT_TOL) -> AuditReport:
    """Exact audit of a count-release channel over every positive-probability
    sensitive matrix (capacity limited by the channel's enumeration cap)."""
    k = channel.k_users
    if k * len(channel.sensitive) > channel.max_symbols:
        raise CapacityError(
            f"{k} users x {len(channel.sensitive)} sensitive loci exceeds the "
            f"{channel.max_symbols}-symbol enumeration cap; use audit_empirical instead"
        )
    sup_codes = np.nonzero(channel.col_prob > 0.0)[0]
    u = sup_codes.size
    n_mat = u**k
    # Decode matrix index -> per-user support positions, then q and weights.
    per_user = decode_indices(np.arange(n_mat), u, k)  # (n_mat, k)
    codes = sup_codes[per_user]
    qmat = channel.user_q[codes]  # (n_mat, k)
    weights = np.prod(channel.col_prob[codes], axis=1)
    # Conditional count pmfs for all matrices at once (iterative convolution).
    cond = np.zeros((n_mat, k + 1))
    cond[:, 0] = 1.0
    for i in range(k):
        qk = qmat[:, i][:, None]
        stay = cond * (1.0 - qk)
        stay[:, 1:] += cond[:, :-1] * qk
        cond = stay
    rc = channel.ratio_matrix(cond) * cond
    out_given = channel.p_a[None, :] * (1.0 - rc.sum(axis=1))[:, None] + rc
    out_marginal = weights @ out_given  # law of the release
    dev = np.abs(out_given - out_marginal[None, :])
    flat = int(np.argmax(dev))
    row, y = divmod(flat, k + 1)
    max_dev = float(dev[row, y])
    worst_matrix = tuple(
        tuple(
            int(v)
            for v in decode_indices(
                np.array(codes[row, i]), channel.alphabet.size, len(channel.sensitive)
            )
        )
        for i in range(k)
    )
    return AuditReport(
        max_deviation=max_dev,
        worst_cell=(int(y), worst_matrix),
        passed=max_dev <= tolerance,
        tolerance=tolerance,
        method="exact_enumeration",
    )


def audit_empirical(
    release_fn,
    model,
    sensitive,
    trials: int,
    rng: np.random.Generator,
    min_stratum: int = 30,
) -> AuditReport:
    """Statistical audit: stratify released values by the sensitive tuple.

    ``release_fn(dataset, rng) -> int array`` must release one value per
    sequence. Strata with fewer than ``min_stratum`` samples are excluded and
    listed. The pass tolerance is data driven: four times the largest
    binomial standard error across retained cells.
    """
    if trials < 10_000:
        raise ValidationError("empirical audit needs at least 10000 trials")
    dataset = model.sample(rng, trials)
    outputs = np.asarray(release_fn(dataset, rng))
    if outputs.shape != (trials,):
        raise ValidationError("release_fn must return one value per sequence")
    scols = np.array([i - 1 for i in sensitive.indices], dtype=np.int64)
    codes = encode_tuples(dataset[:, scols], model.alphabet.size)
    values = np.unique(outputs)
    strata, counts = np.unique(codes, return_counts=True)
    keep = counts >= min_stratum
    excluded = tuple(
        tuple(int(v) for v in decode_indices(np.array(s), model.alphabet.size, len(sensitive)))
        for s in strata[~keep]
    )
    strata, counts = strata[keep], counts[keep]
    if strata.size == 0:
        raise ValidationError("no sensitive stratum reached the minimum sample size")
    # Conditional output frequencies per stratum.
    freq = np.zeros((strata.size, values.size))
    val_idx = np.searchsorted(values, outputs)
    row_idx = np.searchsorted(strata, codes)
    kept = (row_idx < strata.size) & (strata[np.minimum(row_idx, strata.size - 1)] == codes)
    np.add.at(freq, (row_idx[kept], val_idx[kept]), 1.0)
    freq /= counts[:, None]
    pooled = (counts / counts.sum()) @ freq
    dev = np.abs(freq - pooled[None, :])
    se = np.sqrt(np.maximum(freq * (1.0 - freq), 1e-12) / counts[:, None])
    tolerance = float(4.0 * se.max())
    flat = int(np.argmax(dev))
    i, j = divmod(flat, values.size)
    worst_tuple = tuple(
        int(v)
        for v in decode_indices(np.array(strata[i]), model.alphabet.size, len(sensitive))
    )
    max_dev = float(dev[i, j])
    return AuditReport(
        max_deviation=max_dev,
        worst_cell=(int(values[j]), worst_tuple),
        passed=max_dev <= tolerance,
        tolerance=tolerance,
        method="empirical",
        excluded_strata=excluded,
    )
