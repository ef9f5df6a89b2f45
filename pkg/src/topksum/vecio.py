"""Vector file formats: plain text (.txt) and raw float64 (.f64).

.txt holds one decimal literal per line.  .f64 holds an 8-byte little
endian unsigned length followed by that many little endian float64s.
"""

from __future__ import annotations

import struct

import numpy as np


def read_vector(path: str) -> np.ndarray:
    if path.endswith(".txt"):
        x = np.loadtxt(path, dtype=np.float64, ndmin=1)
        if x.ndim != 1:
            raise ValueError(f"{path}: expected one value per line")
        return x
    if path.endswith(".f64"):
        with open(path, "rb") as f:
            header = f.read(8)
            if len(header) != 8:
                raise ValueError(f"{path}: truncated header")
            (count,) = struct.unpack("<Q", header)
            payload = f.read(8 * count)
            if len(payload) != 8 * count:
                raise ValueError(f"{path}: truncated payload")
            return np.frombuffer(payload, dtype="<f8").astype(np.float64)
    raise ValueError(f"{path}: unsupported extension (use .txt or .f64)")


def write_vector(path: str, x: np.ndarray) -> None:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("expected a 1-d array")
    if path.endswith(".txt"):
        np.savetxt(path, x, fmt="%.17g")
        return
    if path.endswith(".f64"):
        with open(path, "wb") as f:
            f.write(struct.pack("<Q", x.size))
            f.write(x.astype("<f8").tobytes())
        return
    raise ValueError(f"{path}: unsupported extension (use .txt or .f64)")
