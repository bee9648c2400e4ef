"""Raw path export: little-endian float64, path-major, 32-byte header.

Header layout (little-endian, 32 bytes total):

    offset  size  field
    0       4     magic  b"BFBM"
    4       1     format version (1)
    5       1     process kind: 0 = bifbm, 1 = scaled fBm
    6       2     reserved (0)
    8       4     n      grid points per path (origin column excluded)
    12      4     M      number of paths
    16      4     p1     float32: H (bifbm) or hk (scaled fBm)
    20      4     p2     float32: K (bifbm) or scale (scaled fBm)
    24      8     master seed (uint64)

Body: M * (n + 1) float64 values, row-major, one path per row, column 0
the zero origin. The horizon is not stored; it lives in the run config.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import DomainError
from .sampling import PathBatch

MAGIC = b"BFBM"
VERSION = 1
_HEADER = struct.Struct("<4sBBHIIffQ")
_KIND_CODE = {"bifbm": 0, "fbm_scaled": 1}
_KIND_NAME = {v: k for k, v in _KIND_CODE.items()}

assert _HEADER.size == 32


def write_paths(path, batch: PathBatch) -> None:
    """Write a batch to path in the documented binary format."""
    label = batch.label
    if label.kind == "bifbm":
        p1, p2 = label.H, label.K
    else:
        p1, p2 = label.hk, label.scale
    header = _HEADER.pack(
        MAGIC,
        VERSION,
        _KIND_CODE[label.kind],
        0,
        batch.grid.n,
        batch.M,
        p1,
        p2,
        batch.seed_info.master,
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(batch.values, dtype="<f8").tobytes())


def read_paths(path):
    """Read a path file; returns (header dict, values array of shape (M, n+1))."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise DomainError(f"{path}: truncated header")
    magic, version, kind_code, _, n, M, p1, p2, master = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise DomainError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise DomainError(f"{path}: unsupported version {version}")
    if kind_code not in _KIND_NAME:
        raise DomainError(f"{path}: unknown process kind {kind_code}")
    expected = _HEADER.size + M * (n + 1) * 8
    if len(raw) != expected:
        raise DomainError(f"{path}: expected {expected} bytes, found {len(raw)}")
    values = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size).reshape(M, n + 1)
    header = {
        "version": version,
        "kind": _KIND_NAME[kind_code],
        "n": n,
        "M": M,
        "p1": p1,
        "p2": p2,
        "master": master,
    }
    return header, values.copy()
