"""Canonical JSON line encoding for the host/agent channel and on-disk documents.

Every message is one JSON object per line, no padding, UTF-8, keys in the
order the producing code lists them. Floats whose value is integral are
written as integers so that any conforming peer produces the same bytes
regardless of its JSON library (JavaScript's JSON.stringify prints 21.0 as
"21"); non-integral floats use shortest round-trip notation, which Python
and JavaScript agree on.
"""

import hashlib
import json

from spoofkit.errors import ProtocolError

# Largest integer exactly representable as a double; integral floats at or
# beyond this stay floats rather than pretending to integer precision.
JS_SAFE_INT = 2 ** 53


def normalize(value):
    """Return ``value`` with integral floats collapsed to int, recursively."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, float):
        if value.is_integer() and abs(value) < JS_SAFE_INT:
            return int(value)
        return value
    if isinstance(value, (int, str)):
        return value
    if isinstance(value, (list, tuple)):
        return [normalize(v) for v in value]
    if isinstance(value, dict):
        return {k: normalize(v) for k, v in value.items()}
    raise TypeError(f"not wire-encodable: {type(value).__name__}")


def encode_line(obj):
    """Encode one message or document object to its canonical line (no newline)."""
    return json.dumps(normalize(obj), separators=(",", ":"), ensure_ascii=False, allow_nan=False)


def decode_line(line):
    """Decode one wire line to a dict; raises ProtocolError on anything else."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"undecodable message: {exc}") from None
    if not isinstance(obj, dict):
        raise ProtocolError("message is not a JSON object")
    return obj


def digest(obj):
    """SHA-256 hex digest of the canonical encoding of ``obj``."""
    return hashlib.sha256(encode_line(obj).encode("utf-8")).hexdigest()
