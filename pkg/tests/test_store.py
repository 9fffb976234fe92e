"""Content-addressed blob store behavior."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crowdmarket.store import (
    CID_PREFIX,
    BlobStore,
    NotFound,
    StorageFailure,
    cid_for,
    parse_cid,
)

# sha256("abc"), a published test vector
ABC_DIGEST = "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"


def test_cid_uses_sha256_hex():
    assert cid_for(b"abc") == CID_PREFIX + ABC_DIGEST


def test_parse_cid_roundtrip():
    assert parse_cid(cid_for(b"abc")) == ABC_DIGEST


@pytest.mark.parametrize("bad", [
    "",
    "abc",
    ABC_DIGEST,                      # missing prefix
    CID_PREFIX + ABC_DIGEST[:-1],    # short digest
    CID_PREFIX + ABC_DIGEST[:-1] + "g",  # non-hex
    CID_PREFIX + ABC_DIGEST.upper(),
    None,
    42,
])
def test_parse_cid_rejects_malformed(bad):
    with pytest.raises(NotFound):
        parse_cid(bad)


def test_put_get_roundtrip(tmp_path):
    store = BlobStore(tmp_path / "blobs")
    payload = b"\x00\x01serialized-model\xff"
    cid = store.put(payload)
    assert store.get(cid) == payload
    assert cid in store
    assert store.has(cid)


def test_fanout_layout(tmp_path):
    store = BlobStore(tmp_path)
    cid = store.put(b"abc")
    assert (tmp_path / ABC_DIGEST[:2] / ABC_DIGEST).read_bytes() == b"abc"
    assert parse_cid(cid) == ABC_DIGEST


def test_put_is_idempotent(tmp_path):
    store = BlobStore(tmp_path)
    a = store.put(b"same bytes")
    b = store.put(b"same bytes")
    assert a == b
    assert len(store) == 1


def test_put_rejects_non_bytes(tmp_path):
    store = BlobStore(tmp_path)
    with pytest.raises(StorageFailure):
        store.put("text, not bytes")


def test_get_missing_raises_not_found(tmp_path):
    store = BlobStore(tmp_path)
    with pytest.raises(NotFound):
        store.get(cid_for(b"never stored"))
    assert not store.has(cid_for(b"never stored"))
    assert "nonsense" not in store


def test_corrupted_blob_detected_on_read(tmp_path):
    store = BlobStore(tmp_path)
    cid = store.put(b"pristine")
    digest = parse_cid(cid)
    (tmp_path / digest[:2] / digest).write_bytes(b"tampered")
    with pytest.raises(StorageFailure):
        store.get(cid)


def test_iter_cids_relists_from_directory(tmp_path):
    store = BlobStore(tmp_path)
    cids = {store.put(bytes([i]) * 10) for i in range(8)}
    listed = list(store.iter_cids())
    assert listed == sorted(listed)
    assert set(listed) == cids
    # a fresh handle over the same root sees the same blobs: the tree
    # is the whole store
    again = BlobStore(tmp_path)
    assert set(again.iter_cids()) == cids
    assert len(again) == 8


def test_unrelated_files_are_not_listed(tmp_path):
    store = BlobStore(tmp_path)
    cid = store.put(b"real")
    (tmp_path / "README").write_text("not a blob")
    (tmp_path / "ab").mkdir(exist_ok=True)
    (tmp_path / "ab" / "short").write_bytes(b"junk")
    assert list(store.iter_cids()) == [cid]


@given(data=st.binary(min_size=0, max_size=2048))
@settings(max_examples=60, deadline=None)
def test_roundtrip_any_bytes(tmp_path_factory, data):
    store = BlobStore(tmp_path_factory.mktemp("blobs"))
    cid = store.put(data)
    assert store.get(cid) == data
    assert parse_cid(cid) == cid[len(CID_PREFIX):]
