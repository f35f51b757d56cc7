"""Dataset file IO and the reference-copying sequence generator.

Dataset files are plain text: one sequence per line, one alphabet symbol per
character, every line the same length. Multi-character alphabet symbols have
no file representation and are rejected by the IO helpers.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import DNA, Alphabet, ValidationError

__all__ = [
    "load_dataset",
    "save_dataset",
    "HmmGeneratorConfig",
    "hmm_generate",
]


def _char_alphabet(alphabet: Alphabet) -> dict[str, int]:
    if any(len(s) != 1 for s in alphabet.symbols):
        raise ValidationError("dataset files require single-character symbols")
    return {s: i for i, s in enumerate(alphabet.symbols)}


def load_dataset(path, alphabet: Alphabet = DNA) -> np.ndarray:
    """Read a sequence file into a ``(K, N)`` array of alphabet indices.

    Ragged lines and out-of-alphabet characters are rejected with the
    offending 1-based line number.
    """
    lookup = _char_alphabet(alphabet)
    rows = []
    width = None
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            if width is None:
                width = len(line)
            elif len(line) != width:
                raise ValidationError(
                    f"{path}:{lineno}: line length {len(line)} != {width}"
                )
            try:
                rows.append([lookup[ch] for ch in line])
            except KeyError as exc:
                raise ValidationError(
                    f"{path}:{lineno}: symbol {exc.args[0]!r} not in alphabet"
                ) from None
    if not rows:
        raise ValidationError(f"{path}: no sequences found")
    return np.array(rows, dtype=np.int64)


def save_dataset(path, dataset: np.ndarray, alphabet: Alphabet = DNA) -> None:
    """Write a ``(K, N)`` index array as one symbol-string per line."""
    _char_alphabet(alphabet)
    dataset = np.asarray(dataset)
    if dataset.ndim != 2:
        raise ValidationError("dataset must be 2-D")
    symbols = np.array(alphabet.symbols)
    with open(path, "w", encoding="ascii") as fh:
        for row in dataset:
            fh.write("".join(symbols[row]) + "\n")


@dataclass(frozen=True)
class HmmGeneratorConfig:
    """Parameters for synthesizing a dataset by copying a reference one.

    Each output sequence starts from a uniformly chosen reference row. At
    every subsequent locus it keeps copying the current row with probability
    ``switch_keep_prob`` and otherwise jumps to a uniformly chosen *different*
    row, which then persists as the copy source. After each copied symbol, an
    independent substitution replaces it by a uniform alphabet draw with
    probability ``substitution_prob``.
    """

    reference: np.ndarray
    switch_keep_prob: float
    substitution_prob: float
    seed: int
    alphabet: Alphabet = DNA

    def __post_init__(self):
        ref = np.asarray(self.reference, dtype=np.int64)
        if ref.ndim != 2 or ref.shape[0] == 0 or ref.shape[1] == 0:
            raise ValidationError("reference dataset must be a non-empty 2-D array")
        if ref.min() < 0 or ref.max() >= self.alphabet.size:
            raise ValidationError("reference contains out-of-alphabet values")
        if not 0.0 <= self.switch_keep_prob <= 1.0:
            raise ValidationError("switch_keep_prob must be in [0, 1]")
        if not 0.0 <= self.substitution_prob <= 1.0:
            raise ValidationError("substitution_prob must be in [0, 1]")
        if ref.shape[0] < 2 and self.switch_keep_prob < 1.0:
            raise ValidationError(
                "switching needs at least two reference rows (or switch_keep_prob=1)"
            )
        object.__setattr__(self, "reference", ref)


def hmm_generate(
    config: HmmGeneratorConfig,
    count: int,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Generate ``count`` sequences per the reference-copying process.

    With no explicit ``rng`` the generator is seeded from ``config.seed``, so
    identical configs reproduce bit-identical datasets.
    """
    if count < 1:
        raise ValidationError("count must be >= 1")
    if rng is None:
        rng = np.random.default_rng(config.seed)
    ref = config.reference
    m, n = ref.shape
    c = config.alphabet.size
    rows = rng.integers(0, m, size=count)
    out = np.empty((count, n), dtype=np.int64)
    for j in range(n):
        if j > 0 and m > 1:
            switch = rng.random(count) >= config.switch_keep_prob
            jump = rng.integers(0, m - 1, size=count)
            jump += jump >= rows  # uniform over rows != current
            rows = np.where(switch, jump, rows)
        out[:, j] = ref[rows, j]
        if config.substitution_prob > 0.0:
            subs = rng.random(count) < config.substitution_prob
            out[subs, j] = rng.integers(0, c, size=int(subs.sum()))
    return out
