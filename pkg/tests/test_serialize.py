"""Canonical serialization is the foundation of every digest claim."""

import hashlib

from hypothesis import given
from hypothesis import strategies as st

from crowdmarket.serialize import canon_bytes, canon_dumps, digest_of, sha256_hex


def test_canonical_form_is_sorted_and_tight():
    doc = {"b": 1, "a": [1, 2], "s": "café"}
    # frozen from an independent stdlib computation
    assert canon_bytes(doc) == b'{"a":[1,2],"b":1,"s":"caf\xc3\xa9"}'
    assert (
        sha256_hex(canon_bytes(doc))
        == "65351bafa7c12e894461dd44798de54e304ee07057f0b61e7049b5968e3def27"
    )


def test_key_order_does_not_matter():
    assert canon_dumps({"x": 1, "y": 2}) == canon_dumps({"y": 2, "x": 1})


def test_digest_of_matches_manual_hash():
    doc = {"k": [None, True, 1.5]}
    assert digest_of(doc) == hashlib.sha256(canon_bytes(doc)).digest()


json_scalars = st.one_of(
    st.none(),
    st.booleans(),
    st.integers(min_value=-(2**53), max_value=2**53),
    st.floats(allow_nan=False, allow_infinity=False),
    st.text(),
)
json_docs = st.recursive(
    json_scalars,
    lambda inner: st.one_of(
        st.lists(inner, max_size=4),
        st.dictionaries(st.text(max_size=8), inner, max_size=4),
    ),
    max_leaves=20,
)


@given(json_docs)
def test_canonical_bytes_are_stable(doc):
    assert canon_bytes(doc) == canon_bytes(doc)


@given(st.dictionaries(st.text(max_size=6), st.integers(), max_size=5))
def test_canonical_bytes_ignore_insertion_order(d):
    reversed_d = dict(reversed(list(d.items())))
    assert canon_bytes(d) == canon_bytes(reversed_d)
