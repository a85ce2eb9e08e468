"""Symmetric-definite generalized eigenproblem for scatter pairs.

Solves C_within w = lambda * (C_all + eps I) w by explicit reduction:
Cholesky-factor the regularized denominator B = L L^T, form the
symmetric M = L^{-1} C_within L^{-T}, take its ordinary spectrum, and
map eigenvectors back through w = L^{-T} y.  Because C_all dominates
C_within, every eigenvalue lands in [0, 1); a value near 1 marks a
direction whose variance is almost entirely within-set (a distractor),
a value near 0 marks a direction the sets agree on.

``partition`` buckets the spectrum into keep/ambiguous/remove bands
using a removal cutoff and a zero tolerance.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack, solve_triangular

from .errors import (
    ConfigError,
    DimensionError,
    IndefiniteDenominatorError,
    NumericInputError,
)

DEFAULT_CUTOFF = 0.999
DEFAULT_ZERO_TOL = 1e-9
DEFAULT_EPSILON_COEFF = 1e-6

# negative eigenvalues of the reduced matrix within this trace-relative
# band are rounding noise and get clamped to zero
_CLAMP_COEFF = 1e-8


def relative_epsilon(c_all: np.ndarray, coeff: float = DEFAULT_EPSILON_COEFF) -> float:
    """Ridge scaled to the mean eigenvalue of c_all: coeff * trace / d."""
    c_all = np.asarray(c_all, dtype=float)
    d = c_all.shape[0]
    tr = float(np.trace(c_all))
    if tr <= 0.0:
        # fall back to an absolute floor so B stays invertible
        return coeff if coeff > 0 else DEFAULT_EPSILON_COEFF
    return coeff * tr / d


@dataclass(frozen=True)
class FocusSpectrum:
    """Solved spectrum, eigenvalues descending with matched eigenvectors.

    ``vectors[:, i]`` is the unit-norm eigenvector for ``values[i]`` in
    the original coordinates.  ``epsilon`` is the ridge actually added
    to the denominator.
    """

    values: np.ndarray
    vectors: np.ndarray
    epsilon: float

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def residual(self, c_within: np.ndarray, c_all: np.ndarray) -> float:
        """max_i || C_w w_i - lambda_i (C_all + eps I) w_i ||_2."""
        b = c_all + self.epsilon * np.eye(self.dim)
        lhs = c_within @ self.vectors
        rhs = b @ self.vectors * self.values[np.newaxis, :]
        return float(np.max(np.linalg.norm(lhs - rhs, axis=0), initial=0.0))


def _check_square_symmetric(a: np.ndarray, name: str) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NumericInputError(f"{name} contains non-finite entries")
    if a.size and np.max(np.abs(a - a.T)) > 1e-8 * max(1.0, np.max(np.abs(a))):
        raise NumericInputError(f"{name} is not symmetric")
    return (a + a.T) / 2.0


def solve(c_within, c_all, epsilon: float | None = None) -> FocusSpectrum:
    """Solve the pencil (C_within, C_all + eps I).

    When ``epsilon`` is None a trace-relative default is used.  Raises
    IndefiniteDenominatorError (with the failing pivot index, zero
    based) if the regularized denominator is not positive definite.
    """
    cw = _check_square_symmetric(c_within, "c_within")
    ca = _check_square_symmetric(c_all, "c_all")
    if cw.shape != ca.shape:
        raise DimensionError(f"shape mismatch: {cw.shape} vs {ca.shape}")
    d = cw.shape[0]
    if epsilon is None:
        epsilon = relative_epsilon(ca)
    if epsilon < 0:
        raise ConfigError(f"epsilon must be nonnegative, got {epsilon}")

    b = ca + epsilon * np.eye(d)
    chol, info = lapack.dpotrf(b, lower=1, clean=1, overwrite_a=0)
    if info > 0:
        raise IndefiniteDenominatorError(info - 1)
    if info < 0:
        raise NumericInputError(f"cholesky rejected argument {-info}")

    # M = L^{-1} C_w L^{-T}, symmetric by construction
    half = solve_triangular(chol, cw, lower=True)
    reduced = solve_triangular(chol, half.T, lower=True).T
    reduced = (reduced + reduced.T) / 2.0
    vals, ys = np.linalg.eigh(reduced)

    # rounding can push tiny eigenvalues below zero; clamp only noise
    floor = -_CLAMP_COEFF * max(float(np.trace(reduced)), 1.0)
    tiny = (vals < 0.0) & (vals >= floor)
    vals = np.where(tiny, 0.0, vals)

    vecs = solve_triangular(chol, ys, lower=True, trans="T")
    vecs /= np.linalg.norm(vecs, axis=0, keepdims=True)

    # deterministic sign: largest-magnitude component positive
    anchors = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[anchors, np.arange(d)])
    signs[signs == 0] = 1.0
    vecs *= signs[np.newaxis, :]

    # descending by value; exact ties break on anchor index ascending
    order = np.lexsort((anchors, -vals))
    return FocusSpectrum(values=vals[order], vectors=vecs[:, order], epsilon=float(epsilon))


class PartitionLabel(enum.Enum):
    KEEP_NULL = "keep_null"
    AMBIGUOUS = "ambiguous"
    REMOVE_DISTRACTOR = "remove_distractor"


@dataclass(frozen=True)
class SpectrumPartition:
    """Index buckets over a spectrum, each ascending."""

    keep_null: tuple
    ambiguous: tuple
    remove_distractor: tuple
    cutoff: float
    zero_tol: float

    @property
    def num_removed(self) -> int:
        return len(self.remove_distractor)

    def labels(self, length: int) -> list:
        out = [None] * length
        for i in self.keep_null:
            out[i] = PartitionLabel.KEEP_NULL
        for i in self.ambiguous:
            out[i] = PartitionLabel.AMBIGUOUS
        for i in self.remove_distractor:
            out[i] = PartitionLabel.REMOVE_DISTRACTOR
        return out


def partition(
    spectrum: FocusSpectrum,
    cutoff: float = DEFAULT_CUTOFF,
    zero_tol: float = DEFAULT_ZERO_TOL,
) -> SpectrumPartition:
    """Bucket eigenvalues: >= cutoff removed, <= zero_tol kept, rest ambiguous."""
    if not 0.0 < cutoff <= 1.0:
        raise ConfigError(f"cutoff must be in (0, 1], got {cutoff}")
    if zero_tol < 0:
        raise ConfigError(f"zero_tol must be nonnegative, got {zero_tol}")
    if zero_tol >= cutoff:
        raise ConfigError(f"zero_tol {zero_tol} must be below cutoff {cutoff}")
    vals = spectrum.values
    remove = np.flatnonzero(vals >= cutoff)
    null = np.flatnonzero(vals <= zero_tol)
    mid = np.flatnonzero((vals > zero_tol) & (vals < cutoff))
    return SpectrumPartition(
        keep_null=tuple(int(i) for i in null),
        ambiguous=tuple(int(i) for i in mid),
        remove_distractor=tuple(int(i) for i in remove),
        cutoff=float(cutoff),
        zero_tol=float(zero_tol),
    )
