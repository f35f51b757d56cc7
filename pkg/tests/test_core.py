import numpy as np
import pytest

from zeroleak.core import (
    DNA,
    Alphabet,
    LocusSet,
    Query,
    ValidationError,
    decode_indices,
    encode_tuples,
)


def test_default_alphabet_is_dna():
    assert DNA.symbols == ("A", "T", "G", "C")
    assert DNA.size == 4
    assert DNA.indices("GAT") == (2, 0, 1)


def test_alphabet_rejects_bad_inputs():
    with pytest.raises(ValidationError):
        Alphabet(("A",))
    with pytest.raises(ValidationError):
        Alphabet(("A", "A"))
    with pytest.raises(ValidationError):
        DNA.index("Z")


def test_locus_set_validation():
    ls = LocusSet((1, 3, 7))
    assert len(ls) == 3 and 3 in ls
    with pytest.raises(ValidationError):
        LocusSet((3, 1))  # not increasing
    with pytest.raises(ValidationError):
        LocusSet((1, 1))  # duplicate
    with pytest.raises(ValidationError):
        LocusSet((0, 2))  # 1-based


def test_locus_set_algebra():
    a = LocusSet((1, 2, 5))
    b = LocusSet((2, 5, 9))
    assert a.union(b).indices == (1, 2, 5, 9)
    assert a.intersection(b).indices == (2, 5)
    assert a.difference(b).indices == (1,)
    assert b.positions_in(a.union(b)) == (1, 2, 3)
    with pytest.raises(ValidationError):
        LocusSet((7,)).positions_in(a)


def test_query_reference_restriction():
    q = Query.from_symbols(LocusSet((2, 4, 6)), ("A", "T", "G"))
    assert q.reference == (0, 1, 2)
    assert q.reference_at(LocusSet((4,))) == (1,)
    assert q.reference_at(LocusSet(())) == ()
    with pytest.raises(ValidationError):
        Query(LocusSet((1, 2)), (0,))
    with pytest.raises(ValidationError):
        q.reference_at(LocusSet((5,)))


def test_encode_decode_roundtrip():
    rng = np.random.default_rng(7)
    vals = rng.integers(0, 4, size=(50, 3))
    codes = encode_tuples(vals, 4)
    assert codes.min() >= 0 and codes.max() < 64
    back = decode_indices(codes, 4, 3)
    np.testing.assert_array_equal(back, vals)
    # first position is most significant
    assert encode_tuples(np.array([1, 0, 0]), 4) == 16
    assert encode_tuples(np.zeros((5, 0)), 4).tolist() == [0] * 5
