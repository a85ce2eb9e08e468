"""Weighted scatter estimation from grouped data.

Grouped observations (M sets of d-dimensional points) are reduced in a
single pass to per-set sufficient statistics: count n_m, sum s_m and raw
second moment S_m = sum of x x^T.  From those and a weighting P over the
sets this module computes

  * ``within_scatter``: sum_m P_m * (1/n_m) * sum_x (x - mu_m)(x - mu_m)^T,
    the weighted average of per-set covariances about each set's own mean;
  * ``all_scatter``: the same average taken about the global weighted mean
    mu_all = sum_m P_m mu_m;
  * ``q_matrix``: the between-set mean-spread term.

These satisfy all_scatter = within_scatter + q_matrix, with q_matrix
positive semidefinite of rank at most M - 1 (one less for each repeated
set mean).

Centered moments come from the one-pass identity
sum (x - mu)(x - mu)^T = sum x x^T - n mu mu^T.  To bound cancellation,
each set's first observed point is subtracted before accumulation
(``shift_first``); means are restored on read-out, and every derived
quantity is independent of the shift.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DimensionError, EmptySetError

UNIFORM = "uniform"
PROPORTIONAL = "proportional"
CUSTOM = "custom"

_WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True)
class WeightingScheme:
    """Prior P over the training sets.

    ``uniform`` expands to P_m = 1/M, ``proportional`` to P_m = n_m/n_all,
    and ``custom`` carries an explicit probability vector.
    """

    kind: str = UNIFORM
    weights: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in (UNIFORM, PROPORTIONAL, CUSTOM):
            raise ConfigError(f"unknown weighting kind {self.kind!r}")
        if self.kind == CUSTOM:
            if self.weights is None:
                raise ConfigError("custom weighting requires an explicit weight vector")
            w = np.asarray(self.weights, dtype=float)
            if w.ndim != 1 or np.any(w < 0):
                raise ConfigError("custom weights must be a nonnegative vector")
            if abs(w.sum() - 1.0) > _WEIGHT_SUM_TOL:
                raise ConfigError(f"custom weights sum to {w.sum()!r}, expected 1")
            object.__setattr__(self, "weights", w.copy())
        elif self.weights is not None:
            raise ConfigError(f"{self.kind} weighting takes no explicit weights")

    @classmethod
    def uniform(cls) -> "WeightingScheme":
        return cls(UNIFORM)

    @classmethod
    def proportional(cls) -> "WeightingScheme":
        return cls(PROPORTIONAL)

    @classmethod
    def custom(cls, weights) -> "WeightingScheme":
        return cls(CUSTOM, np.asarray(weights, dtype=float))

    def probabilities(self, counts) -> np.ndarray:
        """Expand to the per-set probability vector for the given counts."""
        counts = np.asarray(counts, dtype=int)
        if counts.size == 0:
            raise EmptySetError("no training sets")
        if np.any(counts < 1):
            raise EmptySetError("every training set needs at least one point")
        if self.kind == UNIFORM:
            return np.full(counts.size, 1.0 / counts.size)
        if self.kind == PROPORTIONAL:
            return counts / counts.sum()
        if self.weights.size != counts.size:
            raise ConfigError(
                f"custom weighting has {self.weights.size} entries for {counts.size} sets"
            )
        return self.weights.copy()


@dataclass(frozen=True)
class SetCollection:
    """M training sets of points sharing one feature dimension d."""

    sets: tuple
    dim: int

    @classmethod
    def from_arrays(cls, arrays) -> "SetCollection":
        mats = []
        for a in arrays:
            m = np.ascontiguousarray(np.asarray(a, dtype=float))
            if m.ndim != 2:
                raise DimensionError(f"each set must be 2-D, got shape {m.shape}")
            if m.shape[0] < 1:
                raise EmptySetError("every set needs at least one point")
            mats.append(m)
        if not mats:
            raise EmptySetError("a collection needs at least one set")
        dims = {m.shape[1] for m in mats}
        if len(dims) > 1:
            raise DimensionError(f"sets disagree on dimension: {sorted(dims)}")
        return cls(sets=tuple(mats), dim=mats[0].shape[1])

    @property
    def num_sets(self) -> int:
        return len(self.sets)

    @property
    def counts(self) -> tuple:
        return tuple(m.shape[0] for m in self.sets)

    @property
    def total_points(self) -> int:
        return sum(self.counts)

    def stacked(self) -> np.ndarray:
        return np.vstack(self.sets)


class SufficientStats:
    """One-pass streaming moments, one accumulator slot per set.

    Accumulation is partitionable: build independent instances on data
    shards and combine them with :meth:`merge`.  Internally each set's
    sums are stored relative to a per-set shift (the first point seen for
    that set when ``shift_first`` is on); merge re-references as needed.
    """

    def __init__(self, dim: int, shift_first: bool = True):
        if dim < 1:
            raise DimensionError("dim must be at least 1")
        self.dim = int(dim)
        self.shift_first = bool(shift_first)
        self._counts: list[int] = []
        self._sums: list[np.ndarray] = []
        self._raws: list[np.ndarray] = []
        self._shifts: list[np.ndarray] = []

    @classmethod
    def from_sets(cls, collection, shift_first: bool = True) -> "SufficientStats":
        """Batch-build stats from a SetCollection or a list of arrays."""
        if not isinstance(collection, SetCollection):
            collection = SetCollection.from_arrays(collection)
        stats = cls(collection.dim, shift_first=shift_first)
        for m, x in enumerate(collection.sets):
            shift = x[0].copy() if shift_first else np.zeros(collection.dim)
            xs = x - shift
            raw = xs.T @ xs
            stats._counts.append(x.shape[0])
            stats._sums.append(xs.sum(axis=0))
            stats._raws.append((raw + raw.T) / 2.0)
            stats._shifts.append(shift)
        return stats

    @property
    def num_sets(self) -> int:
        return len(self._counts)

    @property
    def counts(self) -> tuple:
        return tuple(self._counts)

    def accumulate(self, set_id: int, point) -> "SufficientStats":
        """Fold one point into set ``set_id`` (an existing or the next-new id)."""
        x = np.asarray(point, dtype=float).reshape(-1)
        if x.size != self.dim:
            raise DimensionError(f"point has length {x.size}, expected {self.dim}")
        if set_id < 0 or set_id > self.num_sets:
            raise ConfigError(
                f"set id {set_id} is neither existing nor the next new id {self.num_sets}"
            )
        if set_id == self.num_sets:
            shift = x.copy() if self.shift_first else np.zeros(self.dim)
            self._counts.append(0)
            self._sums.append(np.zeros(self.dim))
            self._raws.append(np.zeros((self.dim, self.dim)))
            self._shifts.append(shift)
        xs = x - self._shifts[set_id]
        self._counts[set_id] += 1
        self._sums[set_id] += xs
        self._raws[set_id] += np.outer(xs, xs)
        return self

    def merge(self, other: "SufficientStats") -> "SufficientStats":
        """Combine two accumulators set-by-set; neither input is mutated."""
        if other.dim != self.dim:
            raise DimensionError(f"cannot merge dim {other.dim} into dim {self.dim}")
        out = SufficientStats(self.dim, shift_first=self.shift_first)
        for m in range(max(self.num_sets, other.num_sets)):
            have_a = m < self.num_sets
            have_b = m < other.num_sets
            if have_a:
                out._counts.append(self._counts[m])
                out._sums.append(self._sums[m].copy())
                out._raws.append(self._raws[m].copy())
                out._shifts.append(self._shifts[m].copy())
                if have_b and other._counts[m] > 0:
                    # re-reference b's moments to a's shift before adding
                    delta = other._shifts[m] - out._shifts[m]
                    s_b = other._sums[m] + other._counts[m] * delta
                    cross = np.outer(other._sums[m], delta)
                    raw_b = (
                        other._raws[m]
                        + cross
                        + cross.T
                        + other._counts[m] * np.outer(delta, delta)
                    )
                    out._counts[m] += other._counts[m]
                    out._sums[m] += s_b
                    out._raws[m] += raw_b
            elif have_b:
                out._counts.append(other._counts[m])
                out._sums.append(other._sums[m].copy())
                out._raws.append(other._raws[m].copy())
                out._shifts.append(other._shifts[m].copy())
        return out

    def set_mean(self, m: int) -> np.ndarray:
        if self._counts[m] < 1:
            raise EmptySetError(f"set {m} is empty")
        return self._sums[m] / self._counts[m] + self._shifts[m]

    def raw_sum(self, m: int) -> np.ndarray:
        """Sum of x over set m in the original (unshifted) coordinates."""
        return self._sums[m] + self._counts[m] * self._shifts[m]

    def raw_second_moment(self, m: int) -> np.ndarray:
        """Sum of x x^T over set m in the original coordinates."""
        t = self._shifts[m]
        cross = np.outer(self._sums[m], t)
        return self._raws[m] + cross + cross.T + self._counts[m] * np.outer(t, t)

    def centered_second_moment(self, m: int, center) -> np.ndarray:
        """Sum of (x - c)(x - c)^T over set m, for an arbitrary center c."""
        if self._counts[m] < 1:
            raise EmptySetError(f"set {m} is empty")
        a = np.asarray(center, dtype=float) - self._shifts[m]
        cross = np.outer(self._sums[m], a)
        return (
            self._raws[m]
            - cross
            - cross.T
            + self._counts[m] * np.outer(a, a)
        )

    def _require_nonempty(self):
        if self.num_sets == 0:
            raise EmptySetError("no training sets accumulated")
        for m, n in enumerate(self._counts):
            if n < 1:
                raise EmptySetError(f"set {m} is empty")


def _symmetrize(a: np.ndarray) -> np.ndarray:
    return (a + a.T) / 2.0


def set_means(stats: SufficientStats, weighting: WeightingScheme):
    """Per-set means and the weighted global mean mu_all = sum_m P_m mu_m."""
    stats._require_nonempty()
    p = weighting.probabilities(stats.counts)
    mu_m = [stats.set_mean(m) for m in range(stats.num_sets)]
    mu_all = np.zeros(stats.dim)
    for pm, mu in zip(p, mu_m):
        mu_all += pm * mu
    return mu_m, mu_all


def within_scatter(stats: SufficientStats, weighting: WeightingScheme) -> np.ndarray:
    """Weighted average of per-set covariances about each set's own mean."""
    stats._require_nonempty()
    p = weighting.probabilities(stats.counts)
    out = np.zeros((stats.dim, stats.dim))
    for m in range(stats.num_sets):
        n = stats._counts[m]
        mu_shifted = stats._sums[m] / n
        cov = stats._raws[m] / n - np.outer(mu_shifted, mu_shifted)
        out += p[m] * cov
    return _symmetrize(out)


def all_scatter(stats: SufficientStats, weighting: WeightingScheme) -> np.ndarray:
    """Weighted average covariance about the global weighted mean."""
    stats._require_nonempty()
    p = weighting.probabilities(stats.counts)
    _, mu_all = set_means(stats, weighting)
    out = np.zeros((stats.dim, stats.dim))
    for m in range(stats.num_sets):
        out += p[m] / stats._counts[m] * stats.centered_second_moment(m, mu_all)
    return _symmetrize(out)


def q_matrix(stats: SufficientStats, weighting: WeightingScheme) -> np.ndarray:
    """Between-set mean-spread matrix: sum_m P_m (mu_m - mu_all)(mu_m - mu_all)^T.

    Positive semidefinite with rank at most M - 1, and equal to
    all_scatter - within_scatter.
    """
    stats._require_nonempty()
    p = weighting.probabilities(stats.counts)
    mu_m, mu_all = set_means(stats, weighting)
    out = np.zeros((stats.dim, stats.dim))
    for pm, mu in zip(p, mu_m):
        diff = mu - mu_all
        out += pm * np.outer(diff, diff)
    return _symmetrize(out)


@dataclass(frozen=True)
class ScatterSummary:
    """All scatter estimates for one dataset under one weighting."""

    c_within: np.ndarray
    c_all: np.ndarray
    q: np.ndarray
    mu_m: tuple
    mu_all: np.ndarray
    weighting: WeightingScheme = field(default_factory=WeightingScheme.uniform)

    @classmethod
    def from_stats(
        cls, stats: SufficientStats, weighting: WeightingScheme | None = None
    ) -> "ScatterSummary":
        weighting = weighting or WeightingScheme.uniform()
        mu_m, mu_all = set_means(stats, weighting)
        return cls(
            c_within=within_scatter(stats, weighting),
            c_all=all_scatter(stats, weighting),
            q=q_matrix(stats, weighting),
            mu_m=tuple(mu_m),
            mu_all=mu_all,
            weighting=weighting,
        )

    @property
    def dim(self) -> int:
        return self.c_within.shape[0]

    def identity_residual(self) -> float:
        """Frobenius norm of c_all - c_within - q (zero in exact arithmetic)."""
        return float(np.linalg.norm(self.c_all - self.c_within - self.q))


def summarize(stats: SufficientStats, weighting: WeightingScheme) -> ScatterSummary:
    return ScatterSummary.from_stats(stats, weighting)


def pairwise_scatter_oracle(points) -> np.ndarray:
    """Brute-force scatter: (1/(2 n^2)) * sum over all pairs (x-y)(x-y)^T.

    Equals the population scatter about the mean; O(n^2 d^2), intended
    only as an independent check of the moment-based path.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {pts.shape}")
    n, d = pts.shape
    acc = np.zeros((d, d))
    for i in range(n):
        for j in range(n):
            diff = pts[i] - pts[j]
            acc += np.outer(diff, diff)
    return _symmetrize(acc / (2.0 * n * n))
