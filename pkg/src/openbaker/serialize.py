"""Deterministic on-disk formats: CSV tables, JSON reports, and a binary
matrix container.

Floats are written with Python's shortest round-trip representation
(at most 17 significant digits), so identical inputs produce bit-identical
artifacts across runs.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

MATRIX_MAGIC = b"OBKM"


def fmt(x: float) -> str:
    """Shortest round-trip decimal form of a float."""
    return repr(float(x))


def write_matrix_bin(path, M: np.ndarray) -> None:
    """Binary container: magic, uint64 rows/cols, little-endian complex
    doubles in row-major order."""
    M = np.ascontiguousarray(M, dtype=np.complex128)
    with open(path, "wb") as fh:
        fh.write(MATRIX_MAGIC)
        fh.write(struct.pack("<QQ", M.shape[0], M.shape[1]))
        fh.write(M.astype("<c16").tobytes())


def read_matrix_bin(path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MATRIX_MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        rows, cols = struct.unpack("<QQ", fh.read(16))
        data = np.frombuffer(fh.read(), dtype="<c16")
    if len(data) != rows * cols:
        raise ValueError(f"{path}: truncated payload")
    return data.reshape(rows, cols).astype(np.complex128)


def write_matrix_csv(path, M: np.ndarray) -> None:
    """Sparse inspection dump: header row,col,re,im, nonzero entries only."""
    M = np.asarray(M)
    lines = ["row,col,re,im"]
    rows, cols = np.nonzero(M)
    for r, c in zip(rows, cols):
        z = complex(M[r, c])
        lines.append(f"{r},{c},{fmt(z.real)},{fmt(z.imag)}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_spectrum_csv(path, spectrum) -> None:
    """Spectrum table: re,im,modulus,arg with arg in [0, 2pi)."""
    lines = ["re,im,modulus,arg"]
    for z in spectrum.values:
        arg = float(np.mod(np.angle(z), 2 * np.pi))
        lines.append(f"{fmt(z.real)},{fmt(z.imag)},{fmt(abs(z))},{fmt(arg)}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_spectrum_csv(path) -> np.ndarray:
    rows = Path(path).read_text().strip().splitlines()[1:]
    vals = [complex(float(r.split(",")[0]), float(r.split(",")[1])) for r in rows]
    return np.array(vals, dtype=complex)


def write_counts_csv(path, counts) -> None:
    """Counts table: rows of (N, r, count)."""
    lines = ["N,r,count"]
    for N, r, c in counts:
        lines.append(f"{N},{fmt(r)},{c}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_profile_csv(path, r_grid, dims, table) -> None:
    """Rescaled counting profiles, one column per dimension."""
    header = "r," + ",".join(f"N={N}" for N in dims)
    lines = [header]
    for i, r in enumerate(r_grid):
        lines.append(fmt(r) + "," + ",".join(fmt(x) for x in table[i]))
    Path(path).write_text("\n".join(lines) + "\n")


def write_escape_grid_csv(path, grid) -> None:
    """Escape-time grid: header i,j,escape_time with -1 encoding trapped."""
    lines = ["i,j,escape_time"]
    M = grid.resolution
    for i in range(M):
        for j in range(M):
            lines.append(f"{i},{j},{grid.times[i, j]}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_transmission_csv(path, T) -> None:
    """Transmission eigenvalues, one per line, for histogramming."""
    lines = ["T"] + [fmt(x) for x in T]
    Path(path).write_text("\n".join(lines) + "\n")


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
