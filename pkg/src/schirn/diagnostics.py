"""Rank preservation reports, the sparse-perturbation rank bound checker, and
paired significance testing.

The Monte-Carlo checker exercises the rank chain behind the method's
premise: for full-rank binary Y and binary N with N <= Y,
rank(Y - N) >= rank(Y) - rank(N) >= min(n, l) - rank(N). A reported
violation indicates a numerical-rank tolerance bug, not a counterexample.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc

from .linalg import numerical_rank
from .solver import Model, predict_labels, predict_scores

__all__ = [
    "RankReport",
    "TheoremCheckResult",
    "TTestResult",
    "rank_report",
    "verify_rank_theorem",
    "paired_ttest",
]


@dataclass(frozen=True)
class RankReport:
    """Numerical ranks of the prediction matrix (raw and binarized), Y, and Y_true.

    Both prediction ranks are reported because "rank of the predictions" is
    ambiguous between the raw score matrix and its thresholded version.
    """

    rank_prediction_scores: int
    rank_prediction_labels: int
    rank_observed: int
    rank_truth: int | None

    def as_dict(self) -> dict:
        return {
            "rank_prediction_scores": self.rank_prediction_scores,
            "rank_prediction_labels": self.rank_prediction_labels,
            "rank_observed": self.rank_observed,
            "rank_truth": self.rank_truth,
        }


@dataclass(frozen=True)
class TheoremCheckResult:
    """Tally of rank-bound violations over seeded Monte-Carlo trials."""

    trials: int
    violations: int
    min_observed_margin: int
    epsilon_requested: int
    epsilon_clipped: bool

    def as_dict(self) -> dict:
        return {
            "trials": self.trials,
            "violations": self.violations,
            "min_observed_margin": self.min_observed_margin,
            "epsilon_requested": self.epsilon_requested,
            "epsilon_clipped": self.epsilon_clipped,
        }


@dataclass(frozen=True)
class TTestResult:
    t_stat: float
    p_value: float
    verdict: str  # "win" | "tie" | "loss", from a's perspective


def rank_report(model: Model, ds) -> RankReport:
    """Ranks of X W (raw and thresholded), the candidate matrix, and the truth."""
    scores = predict_scores(model, ds.X)
    labels = predict_labels(model, ds.X)
    return RankReport(
        rank_prediction_scores=numerical_rank(scores),
        rank_prediction_labels=numerical_rank(labels),
        rank_observed=numerical_rank(ds.Y),
        rank_truth=numerical_rank(ds.Y_true) if ds.Y_true is not None else None,
    )


def _draw_full_rank_binary(rng: np.random.Generator, n: int, l: int) -> np.ndarray:
    target = min(n, l)
    for _ in range(1000):
        Y = rng.integers(0, 2, size=(n, l)).astype(np.float64)
        if numerical_rank(Y) == target:
            return Y
    raise RuntimeError(f"could not draw a full-rank binary {n} x {l} matrix")


def verify_rank_theorem(n: int, l: int, epsilon: int, trials: int, seed: int) -> TheoremCheckResult:
    """Monte-Carlo check of rank(Y - N) >= min(n, l) - rank(N) under sparse N <= Y.

    Per trial (independent RNG stream derived from (seed, trial index)):
    draw a full-rank binary Y, place exactly epsilon ones uniformly among
    Y's nonzero positions to form N, and tally the margin
    rank(Y - N) - (min(n, l) - rank(N)). If a trial's Y has fewer than
    epsilon ones the count is reduced to what fits and the result is flagged.
    """
    if epsilon < 0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    violations = 0
    min_margin: int | None = None
    clipped = False
    for trial in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence((seed, trial)))
        Y = _draw_full_rank_binary(rng, n, l)
        ones = np.flatnonzero(Y.ravel() == 1.0)
        eps_t = min(epsilon, ones.size)
        clipped = clipped or eps_t < epsilon
        N = np.zeros(n * l)
        if eps_t > 0:
            N[rng.permutation(ones)[:eps_t]] = 1.0
        N = N.reshape(n, l)
        rank_n = numerical_rank(N) if eps_t > 0 else 0
        margin = numerical_rank(Y - N) - (min(n, l) - rank_n)
        if margin < 0:
            violations += 1
        min_margin = margin if min_margin is None else min(min_margin, margin)
    return TheoremCheckResult(
        trials=trials,
        violations=violations,
        min_observed_margin=int(min_margin),
        epsilon_requested=epsilon,
        epsilon_clipped=clipped,
    )


def paired_ttest(a, b, alpha_level: float = 0.05) -> TTestResult:
    """Two-sided paired Student t-test on the differences a - b.

    The p-value comes from the regularized incomplete beta function:
    P(|T_nu| >= t) = I_{nu/(nu+t^2)}(nu/2, 1/2). Verdict is "win" (a larger)
    or "loss" when p < alpha_level, "tie" otherwise. Zero-variance
    differences with nonzero mean are reported as p = 0 with the verdict
    from the sign; all-equal inputs are a tie with p = 1.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 1 or b.ndim != 1 or a.size != b.size:
        raise ValueError("paired_ttest requires two equal-length 1-D sequences")
    if a.size < 2:
        raise ValueError(f"paired_ttest needs at least 2 pairs, got {a.size}")
    if not 0 < alpha_level < 1:
        raise ValueError(f"alpha_level must lie in (0, 1), got {alpha_level}")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("paired_ttest inputs must be finite")

    diff = a - b
    mean = float(diff.mean())
    sd = float(diff.std(ddof=1))
    if sd == 0.0:
        if mean == 0.0:
            return TTestResult(t_stat=0.0, p_value=1.0, verdict="tie")
        t = math.inf if mean > 0 else -math.inf
        return TTestResult(t_stat=t, p_value=0.0, verdict="win" if mean > 0 else "loss")

    t = mean / (sd / math.sqrt(diff.size))
    nu = diff.size - 1
    p = float(betainc(nu / 2.0, 0.5, nu / (nu + t * t)))
    if p < alpha_level:
        verdict = "win" if mean > 0 else "loss"
    else:
        verdict = "tie"
    return TTestResult(t_stat=float(t), p_value=p, verdict=verdict)
