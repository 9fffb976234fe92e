"""Content-addressed blob store on the local filesystem.

Blobs live under their SHA-256 digest with a two-character fan-out
directory, e.g. ``root/ab/ab12...ef``.  The directory tree is the whole
store; ids can be relisted from it without any side index.  Writes go to
a temp file in the target directory and are renamed into place, so a
blob path never holds partial content.
"""

from __future__ import annotations

import hashlib
import logging
import os
import tempfile
from pathlib import Path
from typing import Iterator

from .core import MarketError

log = logging.getLogger(__name__)

CID_PREFIX = "cidv0-sha256:"
_HEX_DIGITS = set("0123456789abcdef")


class StorageFailure(MarketError):
    """The filesystem failed underneath the store."""


class NotFound(MarketError):
    """No blob stored under the given content id."""


def cid_for(data: bytes) -> str:
    """Content id of a blob: prefixed lowercase hex SHA-256."""
    return CID_PREFIX + hashlib.sha256(data).hexdigest()


def parse_cid(cid: str) -> str:
    """Validate a content id and return its bare hex digest."""
    if not isinstance(cid, str) or not cid.startswith(CID_PREFIX):
        raise NotFound(f"malformed content id: {cid!r}")
    digest = cid[len(CID_PREFIX):]
    if len(digest) != 64 or not set(digest) <= _HEX_DIGITS:
        raise NotFound(f"malformed content id: {cid!r}")
    return digest


class BlobStore:
    """Digest-keyed blob storage rooted at one directory."""

    def __init__(self, root: str | os.PathLike) -> None:
        self.root = Path(root)
        try:
            self.root.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise StorageFailure(f"cannot create store root {self.root}: {exc}") from exc

    def _blob_path(self, digest: str) -> Path:
        return self.root / digest[:2] / digest

    def put(self, data: bytes) -> str:
        """Persist a blob and return its content id; idempotent."""
        if not isinstance(data, (bytes, bytearray, memoryview)):
            raise StorageFailure("blob must be bytes")
        data = bytes(data)
        if not data:
            log.warning("storing empty blob")
        digest = hashlib.sha256(data).hexdigest()
        path = self._blob_path(digest)
        if path.exists():
            return CID_PREFIX + digest
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
            try:
                with os.fdopen(fd, "wb") as fh:
                    fh.write(data)
                os.replace(tmp_name, path)
            except BaseException:
                try:
                    os.unlink(tmp_name)
                except OSError:
                    pass
                raise
        except OSError as exc:
            raise StorageFailure(f"cannot store blob: {exc}") from exc
        return CID_PREFIX + digest

    def get(self, cid: str) -> bytes:
        """Read a blob back; verifies the digest before returning."""
        digest = parse_cid(cid)
        path = self._blob_path(digest)
        try:
            data = path.read_bytes()
        except FileNotFoundError:
            raise NotFound(f"no blob for {cid}") from None
        except OSError as exc:
            raise StorageFailure(f"cannot read blob {cid}: {exc}") from exc
        if hashlib.sha256(data).hexdigest() != digest:
            raise StorageFailure(f"blob {cid} corrupted on disk")
        return data

    def has(self, cid: str) -> bool:
        try:
            return self._blob_path(parse_cid(cid)).is_file()
        except NotFound:
            return False

    def __contains__(self, cid: str) -> bool:
        return self.has(cid)

    def __len__(self) -> int:
        return sum(1 for _ in self.iter_cids())

    def iter_cids(self) -> Iterator[str]:
        """All stored ids, relisted from the directory tree, sorted."""
        found = []
        if self.root.is_dir():
            for sub in self.root.iterdir():
                if not (sub.is_dir() and len(sub.name) == 2):
                    continue
                for blob in sub.iterdir():
                    name = blob.name
                    if len(name) == 64 and set(name) <= _HEX_DIGITS:
                        found.append(CID_PREFIX + name)
        found.sort()
        return iter(found)
