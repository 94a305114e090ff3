"""Canonical serialization: round-trip float text, XFB1 containers, digests.

Every artifact file (dataset, pool, model, transfer set, detector) uses the
same container layout, documented in docs/formats.md:

    magic    b"XFB1\\n"
    header   one line of canonical JSON (sorted keys, 17-significant-digit
             floats) terminated by b"\\n"; carries ``kind``, ``version``,
             artifact metadata, and an ``arrays`` table of (name, dtype,
             shape) in payload order
    payload  the arrays' raw bytes, C-order, little-endian, concatenated
             in table order

Because the header is canonical JSON and the payload is raw array bytes,
writing the same logical artifact twice produces byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .errors import FormatError, ValidationError

MAGIC = b"XFB1\n"
CONTAINER_VERSION = 1

_ALLOWED_DTYPES = {"<f8": np.dtype("<f8"), "<i8": np.dtype("<i8")}


def format_float(x: float) -> str:
    """Render a float with 17 significant digits (exact float64 round-trip)."""
    if not math.isfinite(x):
        raise ValidationError(f"cannot serialize non-finite float {x!r}")
    s = format(float(x), ".17g")
    # Keep floats recognizable as floats after a JSON round-trip.
    if "." not in s and "e" not in s and "E" not in s:
        s += ".0"
    return s


def canonical_json(obj: Any) -> str:
    """Deterministic JSON: sorted keys, 17-significant-digit floats."""
    out: list[str] = []
    _emit(obj, out)
    return "".join(out)


def _emit(obj: Any, out: list[str]) -> None:
    if obj is None or obj is True or obj is False:
        out.append(json.dumps(obj))
    elif isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(",")
            _emit(item, out)
        out.append("]")
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if not isinstance(key, str):
                raise ValidationError(f"non-string JSON key {key!r}")
            if i:
                out.append(",")
            out.append(json.dumps(key, ensure_ascii=False))
            out.append(":")
            _emit(obj[key], out)
        out.append("}")
    elif isinstance(obj, np.ndarray):
        _emit(obj.tolist(), out)
    else:
        raise ValidationError(f"cannot canonicalize {type(obj).__name__}")


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def input_digest(row: np.ndarray) -> str:
    """Digest of one input vector: sha256 over its little-endian float64 bytes."""
    a = np.ascontiguousarray(np.asarray(row, dtype="<f8"))
    return sha256_hex(a.tobytes())


def write_container(
    path: str | Path,
    kind: str,
    header: dict[str, Any],
    arrays: dict[str, np.ndarray] | None = None,
) -> None:
    arrays = arrays or {}
    table = []
    blobs = []
    for name in arrays:  # caller-supplied order is part of the layout
        a = arrays[name]
        dtype = "<i8" if np.issubdtype(a.dtype, np.integer) else "<f8"
        a = np.ascontiguousarray(a.astype(_ALLOWED_DTYPES[dtype], copy=False))
        table.append({"name": name, "dtype": dtype, "shape": list(a.shape)})
        blobs.append(a.tobytes())
    doc = {"kind": kind, "version": CONTAINER_VERSION, "header": header, "arrays": table}
    data = MAGIC + canonical_json(doc).encode("utf-8") + b"\n" + b"".join(blobs)
    Path(path).write_bytes(data)


def read_container(
    path: str | Path, expect_kind: str | None = None
) -> tuple[dict[str, Any], dict[str, np.ndarray]]:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    if not data.startswith(MAGIC):
        raise FormatError(f"{path}: bad magic, not an XFB1 container")
    nl = data.find(b"\n", len(MAGIC))
    if nl < 0:
        raise FormatError(f"{path}: truncated header")
    try:
        doc = json.loads(data[len(MAGIC) : nl].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"{path}: unreadable header ({exc})") from exc
    if doc.get("version") != CONTAINER_VERSION:
        raise FormatError(f"{path}: unsupported container version {doc.get('version')!r}")
    if expect_kind is not None and doc.get("kind") != expect_kind:
        raise FormatError(f"{path}: expected kind {expect_kind!r}, found {doc.get('kind')!r}")
    arrays: dict[str, np.ndarray] = {}
    offset = nl + 1
    for entry in doc.get("arrays", []):
        dtype = _ALLOWED_DTYPES.get(entry.get("dtype"))
        if dtype is None:
            raise FormatError(f"{path}: unknown payload dtype {entry.get('dtype')!r}")
        shape = tuple(int(d) for d in entry["shape"])
        nbytes = int(np.prod(shape, dtype=np.int64)) * dtype.itemsize
        blob = data[offset : offset + nbytes]
        if len(blob) != nbytes:
            raise FormatError(f"{path}: truncated payload for array {entry['name']!r}")
        arrays[entry["name"]] = np.frombuffer(blob, dtype=dtype).reshape(shape).copy()
        offset += nbytes
    if offset != len(data):
        raise FormatError(f"{path}: {len(data) - offset} trailing bytes after payload")
    return doc["header"], arrays


def container_digest(path: str | Path) -> str:
    """sha256 of the whole artifact file."""
    return sha256_hex(Path(path).read_bytes())
