"""Core domain types: alphabets, locus sets, queries, and index encodings.

Loci are 1-based throughout (matching the usual genomic convention); numpy
arrays of alphabet indices are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "CapacityError",
    "ValidationError",
    "Alphabet",
    "DNA",
    "LocusSet",
    "Query",
    "encode_tuples",
    "decode_indices",
]


class ValidationError(ValueError):
    """Raised when inputs violate a documented precondition."""


class CapacityError(RuntimeError):
    """Raised when an exact enumeration would exceed the configured limit."""


@dataclass(frozen=True)
class Alphabet:
    """Ordered finite symbol set, default DNA bases."""

    symbols: tuple[str, ...] = ("A", "T", "G", "C")

    def __post_init__(self):
        if len(self.symbols) < 2:
            raise ValidationError("alphabet needs at least 2 symbols")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValidationError("alphabet symbols must be unique")

    @property
    def size(self) -> int:
        return len(self.symbols)

    def index(self, symbol: str) -> int:
        try:
            return self.symbols.index(symbol)
        except ValueError:
            raise ValidationError(
                f"symbol {symbol!r} not in alphabet {self.symbols}"
            ) from None

    def indices(self, symbols) -> tuple[int, ...]:
        return tuple(self.index(s) for s in symbols)

    def to_symbols(self, values) -> tuple[str, ...]:
        return tuple(self.symbols[int(v)] for v in values)


DNA = Alphabet()


@dataclass(frozen=True)
class LocusSet:
    """Strictly increasing 1-based sequence positions."""

    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if any(i < 1 for i in idx):
            raise ValidationError(f"loci are 1-based, got {idx}")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValidationError(f"loci must be strictly increasing, got {idx}")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def of(cls, *indices: int) -> "LocusSet":
        return cls(tuple(sorted(int(i) for i in indices)))

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, locus: int) -> bool:
        return locus in self.indices

    def union(self, other: "LocusSet") -> "LocusSet":
        return LocusSet(tuple(sorted(set(self.indices) | set(other.indices))))

    def intersection(self, other: "LocusSet") -> "LocusSet":
        return LocusSet(tuple(i for i in self.indices if i in other.indices))

    def difference(self, other: "LocusSet") -> "LocusSet":
        return LocusSet(tuple(i for i in self.indices if i not in other.indices))

    def positions_in(self, superset: "LocusSet") -> tuple[int, ...]:
        """0-based axis positions of this set's loci inside `superset`."""
        pos = {locus: i for i, locus in enumerate(superset.indices)}
        missing = [locus for locus in self.indices if locus not in pos]
        if missing:
            raise ValidationError(f"loci {missing} not contained in {superset.indices}")
        return tuple(pos[locus] for locus in self.indices)

    def max_locus(self) -> int:
        return self.indices[-1] if self.indices else 0


EMPTY_LOCI = LocusSet(())


@dataclass(frozen=True)
class Query:
    """Count-query predicate: does the sequence equal `reference` on `loci`?"""

    loci: LocusSet
    reference: tuple[int, ...]

    def __post_init__(self):
        ref = tuple(int(v) for v in self.reference)
        if len(ref) != len(self.loci):
            raise ValidationError(
                f"reference length {len(ref)} != |loci| {len(self.loci)}"
            )
        object.__setattr__(self, "reference", ref)

    @classmethod
    def from_symbols(cls, loci, symbols, alphabet: Alphabet = DNA) -> "Query":
        loci = loci if isinstance(loci, LocusSet) else LocusSet(tuple(loci))
        return cls(loci, alphabet.indices(symbols))

    def reference_at(self, subset: LocusSet) -> tuple[int, ...]:
        """Reference values restricted to `subset` (must be within the query loci)."""
        lookup = dict(zip(self.loci.indices, self.reference))
        missing = [locus for locus in subset.indices if locus not in lookup]
        if missing:
            raise ValidationError(f"loci {missing} not part of the query")
        return tuple(lookup[locus] for locus in subset.indices)


def encode_tuples(values: np.ndarray, base: int) -> np.ndarray:
    """Mixed-radix encode rows of `values` (shape (..., m), first column most
    significant) into flat integers in [0, base**m)."""
    values = np.asarray(values, dtype=np.int64)
    if values.shape[-1] == 0:
        return np.zeros(values.shape[:-1], dtype=np.int64)
    weights = base ** np.arange(values.shape[-1] - 1, -1, -1, dtype=np.int64)
    return values @ weights


def decode_indices(flat: np.ndarray, base: int, width: int) -> np.ndarray:
    """Inverse of :func:`encode_tuples`; returns shape (..., width)."""
    flat = np.asarray(flat, dtype=np.int64)
    out = np.empty(flat.shape + (width,), dtype=np.int64)
    for j in range(width - 1, -1, -1):
        out[..., j] = flat % base
        flat = flat // base
    return out
