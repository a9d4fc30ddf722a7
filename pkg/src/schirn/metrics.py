"""Ranking-based multi-label evaluation metrics.

Conventions, fixed across the package and stated in every output header:

* ranks are 1-based by descending score, ties broken by ascending label
  index (deterministic);
* equal scores on a (relevant, irrelevant) pair count as a ranking-loss
  violation;
* coverage is normalized by the label count l, so values are comparable to
  percentage-scale result tables;
* rows whose truth is all-zero or all-one have no relevant/irrelevant
  contrast and are excluded from average precision, ranking loss, coverage,
  and one-error. Hamming loss never excludes rows. When every row is
  excluded the ranking metrics are defined as 0 and the report flags it.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix

__all__ = [
    "MetricReport",
    "average_precision",
    "ranking_loss",
    "coverage",
    "hamming_loss",
    "one_error",
    "evaluate_all",
]


@dataclass(frozen=True)
class MetricReport:
    """The five metric values plus how many rows the ranking metrics used."""

    average_precision: float
    ranking_loss: float
    coverage: float
    hamming_loss: float
    one_error: float
    rows_scored: int
    rows_total: int

    @property
    def no_scorable_rows(self) -> bool:
        return self.rows_scored == 0

    def as_dict(self) -> dict:
        return {
            "average_precision": self.average_precision,
            "ranking_loss": self.ranking_loss,
            "coverage": self.coverage,
            "hamming_loss": self.hamming_loss,
            "one_error": self.one_error,
            "rows_scored": self.rows_scored,
            "rows_total": self.rows_total,
            "no_scorable_rows": self.no_scorable_rows,
        }


def _check_pair(scores, truth):
    S = as_matrix(scores, "scores")
    T = as_matrix(truth, "truth")
    if S.shape != T.shape:
        raise ValueError(f"scores shape {S.shape} != truth shape {T.shape}")
    if not np.all((T == 0.0) | (T == 1.0)):
        raise ValueError("truth must be binary")
    return S, T


def _included_rows(T: np.ndarray) -> np.ndarray:
    row_sums = T.sum(axis=1)
    return np.flatnonzero((row_sums > 0) & (row_sums < T.shape[1]))


def _ranks(scores_row: np.ndarray) -> np.ndarray:
    # stable sort on -score keeps ascending index order among ties
    order = np.argsort(-scores_row, kind="stable")
    ranks = np.empty(scores_row.size, dtype=np.int64)
    ranks[order] = np.arange(1, scores_row.size + 1)
    return ranks


def average_precision(scores, truth) -> float:
    """Mean precision at the ranks of the relevant labels."""
    S, T = _check_pair(scores, truth)
    rows = _included_rows(T)
    if rows.size == 0:
        return 0.0
    total = 0.0
    for i in rows:
        rel_ranks = np.sort(_ranks(S[i])[T[i] == 1.0])
        # the j-th smallest relevant rank has exactly j relevant labels at or above it
        total += float(np.mean(np.arange(1, rel_ranks.size + 1) / rel_ranks))
    return total / rows.size


def ranking_loss(scores, truth) -> float:
    """Fraction of (relevant, irrelevant) pairs ordered wrongly; ties count as violations."""
    S, T = _check_pair(scores, truth)
    rows = _included_rows(T)
    if rows.size == 0:
        return 0.0
    total = 0.0
    for i in rows:
        rel = S[i][T[i] == 1.0]
        irr = S[i][T[i] == 0.0]
        violations = np.count_nonzero(rel[:, None] <= irr[None, :])
        total += violations / (rel.size * irr.size)
    return total / rows.size


def coverage(scores, truth) -> float:
    """How deep the ranking goes to capture all relevant labels, over l."""
    S, T = _check_pair(scores, truth)
    rows = _included_rows(T)
    if rows.size == 0:
        return 0.0
    l = T.shape[1]
    total = 0.0
    for i in rows:
        total += (int(_ranks(S[i])[T[i] == 1.0].max()) - 1) / l
    return total / rows.size


def hamming_loss(pred, truth) -> float:
    """Fraction of label entries where the binary prediction disagrees with truth."""
    P = as_matrix(pred, "pred")
    T = as_matrix(truth, "truth")
    if P.shape != T.shape:
        raise ValueError(f"pred shape {P.shape} != truth shape {T.shape}")
    for name, M in (("pred", P), ("truth", T)):
        if not np.all((M == 0.0) | (M == 1.0)):
            raise ValueError(f"{name} must be binary")
    return float(np.mean(P != T))


def one_error(scores, truth) -> float:
    """Fraction of rows whose top-ranked label is not relevant."""
    S, T = _check_pair(scores, truth)
    rows = _included_rows(T)
    if rows.size == 0:
        return 0.0
    # argmax returns the first maximum, matching the ascending-index tie rule
    top = np.argmax(S[rows], axis=1)
    return float(np.mean(T[rows, top] == 0.0))


def evaluate_all(scores, pred, truth) -> MetricReport:
    """All five metrics for one (scores, binarized predictions, truth) triple."""
    S, T = _check_pair(scores, truth)
    return MetricReport(
        average_precision=average_precision(S, T),
        ranking_loss=ranking_loss(S, T),
        coverage=coverage(S, T),
        hamming_loss=hamming_loss(pred, T),
        one_error=one_error(S, T),
        rows_scored=int(_included_rows(T).size),
        rows_total=int(T.shape[0]),
    )
