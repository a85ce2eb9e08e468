"""Complementary feature mapping built from a partitioned spectrum.

The removed eigenvectors are orthonormalized into U (d x k); the model
maps points onto the Euclidean-orthogonal complement of span(U) through
a canonical basis V (d x (d-k)), built by completing U to a full
orthonormal basis over the identity columns and keeping the trailing
block.  Applying the map and projecting back composes to I - U U^T.

Models persist to a single file: a short text header, the three matrix
blocks (U, V, eigenvalues) in the FOCM binary format, and a trailing
CRC32 of the binary section.
"""

from __future__ import annotations

import io
import zlib
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from .errors import (
    DegenerateModelError,
    DimensionError,
    ModelCorruptError,
    ModelVersionError,
    NumericInputError,
)
from .geneig import FocusSpectrum, SpectrumPartition
from .io import atomic_write_bytes, read_focm, write_focm

MODEL_MAGIC = "FOCUS-MODEL"
MODEL_VERSION = 1

_ORTHO_TOL = 1e-10


def _fix_column_signs(basis: np.ndarray) -> np.ndarray:
    if basis.shape[1] == 0:
        return basis
    anchors = np.argmax(np.abs(basis), axis=0)
    signs = np.sign(basis[anchors, np.arange(basis.shape[1])])
    signs[signs == 0] = 1.0
    return basis * signs[np.newaxis, :]


@dataclass(frozen=True)
class FocusModel:
    """Immutable linear map dropping k directions from d-dimensional input."""

    removed_basis: np.ndarray
    kept_basis: np.ndarray
    eigenvalues: np.ndarray
    removed_indices: tuple
    cutoff: float
    epsilon: float
    zero_tol: float
    created: str = "-"

    @property
    def dim_in(self) -> int:
        return self.removed_basis.shape[0]

    @property
    def dim_out(self) -> int:
        return self.kept_basis.shape[1]

    @property
    def num_removed(self) -> int:
        return self.removed_basis.shape[1]


def build_mapping(spectrum: FocusSpectrum, part: SpectrumPartition) -> FocusModel:
    """Orthonormalize the removed directions and form the kept complement."""
    d = spectrum.dim
    removed = tuple(part.remove_distractor)
    if any(i < 0 or i >= d for i in removed):
        raise DimensionError("partition indexes an eigenvector outside the spectrum")
    k = len(removed)
    if k == d:
        raise DegenerateModelError(f"all {d} directions marked for removal")

    if k == 0:
        u = np.zeros((d, 0))
        v = np.eye(d)
    else:
        w = spectrum.vectors[:, list(removed)]
        u, _ = np.linalg.qr(w)
        u = _fix_column_signs(u)
        # complete to a full basis over the identity columns; trailing
        # d-k columns span the orthogonal complement of span(u)
        full, _ = np.linalg.qr(np.hstack([u, np.eye(d)]))
        v = _fix_column_signs(full[:, k:])

    return FocusModel(
        removed_basis=u,
        kept_basis=v,
        eigenvalues=spectrum.values.copy(),
        removed_indices=removed,
        cutoff=part.cutoff,
        epsilon=spectrum.epsilon,
        zero_tol=part.zero_tol,
    )


def _check_points(points, width: int, what: str) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[np.newaxis, :]
    if pts.ndim != 2 or pts.shape[1] != width:
        raise DimensionError(f"{what} expects width {width}, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise NumericInputError(f"{what} input contains non-finite entries")
    return pts


def apply(model: FocusModel, points) -> np.ndarray:
    """Map rows x to V^T x, the coordinates in the kept basis."""
    pts = _check_points(points, model.dim_in, "apply")
    return pts @ model.kept_basis


def backproject(model: FocusModel, transformed) -> np.ndarray:
    """Lift kept-basis coordinates back into the original space."""
    z = _check_points(transformed, model.dim_out, "backproject")
    return z @ model.kept_basis.T


def round_trip(model: FocusModel, points) -> np.ndarray:
    """backproject(apply(x)): the rank d-k projector I - U U^T applied to x."""
    return backproject(model, apply(model, points))


def _header_lines(model: FocusModel) -> list:
    return [
        f"{MODEL_MAGIC} {MODEL_VERSION}",
        f"dim {model.dim_in}",
        f"removed {model.num_removed}",
        f"cutoff {model.cutoff:.17g}",
        f"epsilon {model.epsilon:.17g}",
        f"zero_tol {model.zero_tol:.17g}",
        "removed_indices "
        + (",".join(str(i) for i in model.removed_indices) or "-"),
        f"created {model.created}",
    ]


def save(model: FocusModel, path, timestamp: bool = True) -> None:
    """Write the model file; the write is atomic (temp file + rename)."""
    created = (
        datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ") if timestamp else "-"
    )
    header = "\n".join(_header_lines(
        FocusModel(
            removed_basis=model.removed_basis,
            kept_basis=model.kept_basis,
            eigenvalues=model.eigenvalues,
            removed_indices=model.removed_indices,
            cutoff=model.cutoff,
            epsilon=model.epsilon,
            zero_tol=model.zero_tol,
            created=created,
        )
    )) + "\n\n"

    blob = io.BytesIO()
    write_focm(blob, model.removed_basis)
    write_focm(blob, model.kept_basis)
    write_focm(blob, model.eigenvalues[np.newaxis, :])
    binary = blob.getvalue()
    crc = zlib.crc32(binary) & 0xFFFFFFFF
    payload = header.encode("utf-8") + binary + crc.to_bytes(4, "little")
    atomic_write_bytes(path, payload)


def _parse_header(text: str) -> dict:
    lines = text.split("\n")
    first = lines[0].split()
    if len(first) != 2 or first[0] != MODEL_MAGIC:
        raise ModelCorruptError("missing model magic")
    try:
        version = int(first[1])
    except ValueError:
        raise ModelCorruptError(f"bad version field {first[1]!r}") from None
    if version != MODEL_VERSION:
        raise ModelVersionError(f"unsupported model version {version}")
    fields = {}
    for line in lines[1:]:
        if not line:
            continue
        key, _, value = line.partition(" ")
        fields[key] = value
    for required in ("dim", "removed", "cutoff", "epsilon", "zero_tol"):
        if required not in fields:
            raise ModelCorruptError(f"header missing field {required!r}")
    return fields


def load(path) -> FocusModel:
    """Read a model file, verifying the trailing checksum."""
    with open(path, "rb") as fh:
        raw = fh.read()
    sep = raw.find(b"\n\n")
    if sep < 0:
        raise ModelCorruptError("missing header terminator")
    try:
        header_text = raw[:sep].decode("utf-8")
    except UnicodeDecodeError:
        raise ModelCorruptError("header is not valid utf-8") from None
    fields = _parse_header(header_text)

    body = raw[sep + 2 :]
    if len(body) < 4:
        raise ModelCorruptError("model file truncated before checksum")
    binary, trailer = body[:-4], body[-4:]
    if zlib.crc32(binary) & 0xFFFFFFFF != int.from_bytes(trailer, "little"):
        raise ModelCorruptError("checksum mismatch")

    blob = io.BytesIO(binary)
    u = read_focm(blob)
    v = read_focm(blob)
    values = read_focm(blob)
    if blob.read(1):
        raise ModelCorruptError("trailing bytes after matrix blocks")

    try:
        dim = int(fields["dim"])
        k = int(fields["removed"])
        cutoff = float(fields["cutoff"])
        epsilon = float(fields["epsilon"])
        zero_tol = float(fields["zero_tol"])
    except ValueError as exc:
        raise ModelCorruptError(f"malformed header value: {exc}") from None
    if u.shape != (dim, k) or v.shape != (dim, dim - k):
        raise ModelCorruptError(
            f"matrix shapes {u.shape}/{v.shape} disagree with header d={dim}, k={k}"
        )
    if values.shape != (1, dim):
        raise ModelCorruptError(f"eigenvalue block has shape {values.shape}")

    idx_field = fields.get("removed_indices", "-")
    if idx_field == "-":
        indices: tuple = ()
    else:
        try:
            indices = tuple(int(t) for t in idx_field.split(","))
        except ValueError:
            raise ModelCorruptError(f"bad removed_indices {idx_field!r}") from None
    if len(indices) != k:
        raise ModelCorruptError("removed_indices length disagrees with header k")

    return FocusModel(
        removed_basis=u,
        kept_basis=v,
        eigenvalues=values[0],
        removed_indices=indices,
        cutoff=cutoff,
        epsilon=epsilon,
        zero_tol=zero_tol,
        created=fields.get("created", "-"),
    )
