"""Reference anomaly scorers and ranking metrics.

Two deliberately simple scorers operate on a test matrix alone, with no
training phase: the distance to the k-th nearest other point, and the
Mahalanobis distance under the test set's own mean and covariance.
Higher score = more anomalous.  ``evaluate`` turns scores plus binary
labels into AUC (rank statistic, ties counted half) and precision at k.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.spatial.distance import cdist
from scipy.stats import rankdata

from .errors import MetricError, ScorerError

KNN = "knn"
MAHALANOBIS = "mahalanobis"

DEFAULT_K = 3
_RIDGE_COEFF = 1e-9


@dataclass(frozen=True)
class ScorerSpec:
    """Which scorer to run; ``k`` is the neighbor index for knn."""

    kind: str
    k: int | None = None

    @classmethod
    def parse(cls, text: str) -> "ScorerSpec":
        """Parse "knn:3", "knn", or "mahalanobis"."""
        name, _, arg = text.partition(":")
        name = name.strip().lower()
        if name == KNN:
            k = DEFAULT_K
            if arg:
                try:
                    k = int(arg)
                except ValueError:
                    raise ScorerError(f"bad neighbor count {arg!r}") from None
            if k < 1:
                raise ScorerError(f"neighbor count must be positive, got {k}")
            return cls(KNN, k)
        if name == MAHALANOBIS:
            if arg:
                raise ScorerError("mahalanobis takes no parameter")
            return cls(MAHALANOBIS)
        raise ScorerError(f"unknown scorer {name!r}")

    def __str__(self):
        return f"{KNN}:{self.k}" if self.kind == KNN else self.kind


@dataclass(frozen=True)
class ScoreReport:
    scores: np.ndarray
    scorer: ScorerSpec
    metrics: dict | None = None


def _check_test_matrix(test) -> np.ndarray:
    pts = np.asarray(test, dtype=float)
    if pts.ndim != 2:
        raise ScorerError(f"test data must be 2-D, got shape {pts.shape}")
    if pts.shape[0] < 2:
        raise ScorerError("need at least two test points")
    if not np.all(np.isfinite(pts)):
        raise ScorerError("test data contains non-finite entries")
    return pts


def knn_scores(test, k: int = DEFAULT_K) -> np.ndarray:
    """Euclidean distance from each point to its k-th nearest other point."""
    pts = _check_test_matrix(test)
    n = pts.shape[0]
    if k < 1:
        raise ScorerError(f"neighbor count must be positive, got {k}")
    if n < k + 1:
        raise ScorerError(f"{n} points cannot support k={k} (need at least {k + 1})")
    dist = cdist(pts, pts)
    np.fill_diagonal(dist, np.inf)
    return np.partition(dist, k - 1, axis=1)[:, k - 1]


def mahalanobis_scores(test) -> np.ndarray:
    """Squared Mahalanobis distance under the test set's own moments."""
    pts = _check_test_matrix(test)
    n, d = pts.shape
    centered = pts - pts.mean(axis=0)
    cov = centered.T @ centered / n
    tr = float(np.trace(cov))
    if tr <= 0.0:
        raise ScorerError("test covariance is zero; scores undefined")
    cov = cov + (_RIDGE_COEFF * tr / d) * np.eye(d)
    try:
        factor = cho_factor(cov, lower=True)
    except np.linalg.LinAlgError as exc:
        raise ScorerError(f"test covariance not invertible: {exc}") from exc
    solved = cho_solve(factor, centered.T)
    return np.einsum("ij,ji->i", centered, solved)


def score(test, scorer="knn:3") -> ScoreReport:
    """Run the scorer named by a ScorerSpec or its text form."""
    spec = ScorerSpec.parse(scorer) if isinstance(scorer, str) else scorer
    if spec.kind == KNN:
        values = knn_scores(test, spec.k or DEFAULT_K)
    elif spec.kind == MAHALANOBIS:
        values = mahalanobis_scores(test)
    else:
        raise ScorerError(f"unknown scorer {spec.kind!r}")
    return ScoreReport(scores=values, scorer=spec)


def _check_eval_inputs(scores, labels):
    s = np.asarray(scores, dtype=float).reshape(-1)
    y = np.asarray(labels).reshape(-1)
    if s.size != y.size:
        raise MetricError(f"{s.size} scores vs {y.size} labels")
    if not np.all(np.isfinite(s)):
        raise MetricError("scores contain non-finite entries")
    if not np.isin(y, (0, 1)).all():
        raise MetricError("labels must be 0 or 1")
    y = y.astype(int)
    if y.min() == y.max():
        raise MetricError("labels contain a single class; AUC undefined")
    return s, y


def auc_score(scores, labels) -> float:
    """Probability a random anomaly outscores a random normal, ties half."""
    s, y = _check_eval_inputs(scores, labels)
    ranks = rankdata(s)
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    pos_rank_sum = float(ranks[y == 1].sum())
    return (pos_rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def precision_at(scores, labels, k: int) -> float:
    """Fraction of anomalies in the k highest scores; ties break by index."""
    s, y = _check_eval_inputs(scores, labels)
    if not 1 <= k <= s.size:
        raise MetricError(f"precision cutoff {k} outside [1, {s.size}]")
    order = np.lexsort((np.arange(s.size), -s))
    return float(y[order[:k]].mean())


def evaluate(scores, labels, precision_cutoffs=(10,)) -> dict:
    """Bundle AUC and precision@k for the requested cutoffs."""
    metrics = {"auc": auc_score(scores, labels)}
    metrics["precision_at"] = {
        int(k): precision_at(scores, labels, int(k)) for k in precision_cutoffs
    }
    return metrics
