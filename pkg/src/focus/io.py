"""Matrix file formats and directory loading.

Two interchangeable on-disk representations of an n x d matrix:

  * CSV: one point per row, comma separated, ``.`` decimal point
    regardless of locale, no header.
  * FOCM binary: magic ``FOCM``, u32 version (=1), u64 rows, u64 cols,
    then row-major float64 values.  All fields little-endian.

A training directory holds one matrix file per set; sets are ordered
lexicographically by filename.
"""

from __future__ import annotations

import io as _io
import os
import struct
import tempfile
from pathlib import Path
from typing import BinaryIO

import numpy as np

from .errors import DimensionError, EmptySetError, ModelCorruptError

FOCM_MAGIC = b"FOCM"
FOCM_VERSION = 1
_HEADER = struct.Struct("<4sIQQ")

MATRIX_SUFFIXES = (".csv", ".focm")


def write_focm(stream: BinaryIO, matrix: np.ndarray) -> None:
    """Write one FOCM block (header + row-major float64 payload)."""
    m = np.ascontiguousarray(np.asarray(matrix, dtype="<f8"))
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {m.shape}")
    stream.write(_HEADER.pack(FOCM_MAGIC, FOCM_VERSION, m.shape[0], m.shape[1]))
    stream.write(m.tobytes(order="C"))


def read_focm(stream: BinaryIO) -> np.ndarray:
    """Read one FOCM block; raises ModelCorruptError on malformed input."""
    head = stream.read(_HEADER.size)
    if len(head) != _HEADER.size:
        raise ModelCorruptError("truncated FOCM header")
    magic, version, rows, cols = _HEADER.unpack(head)
    if magic != FOCM_MAGIC:
        raise ModelCorruptError(f"bad magic bytes {magic!r}")
    if version != FOCM_VERSION:
        raise ModelCorruptError(f"unsupported FOCM version {version}")
    payload = stream.read(8 * rows * cols)
    if len(payload) != 8 * rows * cols:
        raise ModelCorruptError("truncated FOCM payload")
    return np.frombuffer(payload, dtype="<f8").reshape(rows, cols).copy()


def atomic_write_bytes(path: str | Path, payload: bytes) -> None:
    """Write a file atomically (temp file in the same directory + rename)."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_matrix_focm(path: str | Path, matrix: np.ndarray) -> None:
    buf = _io.BytesIO()
    write_focm(buf, matrix)
    atomic_write_bytes(path, buf.getvalue())


def read_matrix_focm(path: str | Path) -> np.ndarray:
    with open(path, "rb") as f:
        return read_focm(f)


def write_matrix_csv(path: str | Path, matrix: np.ndarray) -> None:
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {m.shape}")
    lines = [",".join(f"{v:.17g}" for v in row) for row in m]
    atomic_write_bytes(path, ("\n".join(lines) + ("\n" if lines else "")).encode())


def read_matrix_csv(path_or_stream) -> np.ndarray:
    if hasattr(path_or_stream, "read"):
        text = path_or_stream.read()
    else:
        text = Path(path_or_stream).read_text()
    rows = [line for line in text.splitlines() if line.strip()]
    if not rows:
        return np.zeros((0, 0))
    data = [[float(v) for v in line.split(",")] for line in rows]
    width = len(data[0])
    if any(len(r) != width for r in data):
        raise DimensionError("CSV rows have inconsistent column counts")
    return np.asarray(data, dtype=float)


def read_matrix(path: str | Path, fmt: str | None = None) -> np.ndarray:
    """Read a matrix, dispatching on ``fmt`` or the file suffix."""
    path = Path(path)
    fmt = fmt or path.suffix.lstrip(".").lower()
    if fmt == "csv":
        return read_matrix_csv(path)
    if fmt == "focm":
        return read_matrix_focm(path)
    raise ModelCorruptError(f"unknown matrix format {fmt!r} for {path}")


def write_matrix(path: str | Path, matrix: np.ndarray, fmt: str | None = None) -> None:
    path = Path(path)
    fmt = fmt or path.suffix.lstrip(".").lower()
    if fmt == "csv":
        write_matrix_csv(path, matrix)
    elif fmt == "focm":
        write_matrix_focm(path, matrix)
    else:
        raise ModelCorruptError(f"unknown matrix format {fmt!r} for {path}")


def list_set_files(directory: str | Path) -> list[Path]:
    directory = Path(directory)
    files = sorted(
        p for p in directory.iterdir()
        if p.is_file() and p.suffix.lower() in MATRIX_SUFFIXES
    )
    return files


def load_set_directory(directory: str | Path):
    """Load every matrix file in ``directory`` as one SetCollection.

    Set order is lexicographic by filename.
    """
    from .scatter import SetCollection

    files = list_set_files(directory)
    if not files:
        raise EmptySetError(f"no matrix files (*.csv, *.focm) in {directory}")
    matrices = []
    for p in files:
        m = read_matrix(p)
        if m.shape[0] == 0:
            raise EmptySetError(f"{p} holds an empty set")
        matrices.append(m)
    widths = {m.shape[1] for m in matrices}
    if len(widths) > 1:
        raise DimensionError(f"set files disagree on dimension: {sorted(widths)}")
    return SetCollection.from_arrays(matrices)
