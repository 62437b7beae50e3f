"""Raw binary snapshots of scalar fields.

Layout (little endian):
    bytes 0-3    magic "UNDU"
    bytes 4-7    format version (uint32, currently 1)
    bytes 8-11   kind (uint32): 0 = surface, 1 = radial
    bytes 12-15  n_x (uint32)
    bytes 16-19  n_theta (uint32, 1 for radial fields)
    bytes 20-31  reserved, zero
    bytes 32-    row-major float64 values
"""

from __future__ import annotations

import struct

import numpy as np

MAGIC = b"UNDU"
VERSION = 1
HEADER = struct.Struct("<4sIIII12x")
assert HEADER.size == 32


def save_field(path, f: np.ndarray) -> None:
    f = np.ascontiguousarray(f, dtype="<f8")
    if f.ndim == 2:
        kind, n_x, n_theta = 0, f.shape[0], f.shape[1]
    elif f.ndim == 1:
        kind, n_x, n_theta = 1, f.shape[0], 1
    else:
        raise ValueError(f"fields must be 1D or 2D, got {f.ndim}D")
    with open(path, "wb") as fh:
        fh.write(HEADER.pack(MAGIC, VERSION, kind, n_x, n_theta))
        fh.write(f.tobytes())


def load_field(path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic, version, kind, n_x, n_theta = HEADER.unpack(fh.read(HEADER.size))
        if magic != MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        if version != VERSION:
            raise ValueError(f"{path}: unsupported version {version}")
        data = np.frombuffer(fh.read(), dtype="<f8")
    if kind == 0:
        return data.reshape(n_x, n_theta).copy()
    return data[:n_x].copy()
