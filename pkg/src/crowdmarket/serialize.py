"""Canonical JSON serialization shared by the ledger, reports and file formats.

Every digest in the package is computed over these bytes, so the encoding has
to be stable: keys sorted, no whitespace, UTF-8, floats rendered by Python's
shortest-roundtrip repr. Two states that serialize to the same bytes are the
same state.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any


def canon_dumps(obj: Any) -> str:
    """Serialize ``obj`` to the canonical JSON text form."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def canon_bytes(obj: Any) -> bytes:
    """Canonical JSON rendering of ``obj`` as UTF-8 bytes."""
    return canon_dumps(obj).encode("utf-8")


def sha256_hex(data: bytes) -> str:
    """Lowercase hex SHA-256 of ``data``."""
    return hashlib.sha256(data).hexdigest()


def digest_of(obj: Any) -> bytes:
    """32-byte SHA-256 digest of the canonical serialization of ``obj``."""
    return hashlib.sha256(canon_bytes(obj)).digest()
