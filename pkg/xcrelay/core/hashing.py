"""Hashing helpers: transaction ids, block ids and allocation digests"""

import hashlib
import json
from typing import Any


def canonical_json(obj: Any) -> bytes:
    """Serialize to a canonical byte form (sorted keys, no whitespace)"""
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def hash_fields(*fields: Any) -> str:
    """Hash a tuple of JSON-serializable fields"""
    return sha256_hex(canonical_json(list(fields)))


def digest_int(request_hash: str) -> int:
    """H(request_hash) read as an unsigned big-endian integer

    The request hash is the hex id of the request transaction; its raw bytes are
    hashed again with SHA-256.
    """
    return int.from_bytes(hashlib.sha256(bytes.fromhex(request_hash)).digest(), "big")
