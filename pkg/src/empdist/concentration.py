"""Subgaussian tail evaluators and an empirical exceedance checker.

The bound statistics (multiscale or Fourier totals) change by at most
1/n times the class oscillation when one sample is replaced, so
bounded-difference inequalities control their upper tails.  The checker
compares observed exceedance frequencies over a replicate ensemble
against a stated bound, allowing a one-sided 95% binomial margin for
the finite ensemble size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats


def azuma_rhs(increment_ranges, t: float) -> float:
    """Azuma-Hoeffding tail exp(-2 t^2 / sum c_k^2) for the given ranges."""
    ranges = [float(c) for c in increment_ranges]
    if not ranges:
        raise ValueError("need at least one increment range")
    if min(ranges) <= 0:
        raise ValueError("increment ranges must be positive")
    if t < 0:
        raise ValueError(f"threshold t must be nonnegative, got {t}")
    return math.exp(-2.0 * t * t / math.fsum(c * c for c in ranges))


def tail_bound_iid(t: float, n: int, d: int) -> float:
    """McDiarmid tail exp(-2 n t^2 / d) for 1-Lipschitz-class statistics
    of n independent samples in [0, 1]^d (class oscillation sqrt(d))."""
    if t < 0:
        raise ValueError(f"threshold t must be nonnegative, got {t}")
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    return math.exp(-2.0 * n * t * t / d)


def tail_bound_markov(t: float, n: int, theta: float, D: float, diam: float) -> float:
    """Tail exp(-(1-theta)^2 n t^2 / (2 D^2 diam^2)) for contracting chains.

    theta and D are the chain's Wasserstein contraction parameters; diam
    is the diameter of the state space in the metric of the statistic.
    """
    if t < 0:
        raise ValueError(f"threshold t must be nonnegative, got {t}")
    if not 0.0 < theta < 1.0:
        raise ValueError(f"theta must lie in (0, 1), got {theta}")
    if D < 1.0:
        raise ValueError(f"D must be at least 1, got {D}")
    if diam <= 0:
        raise ValueError(f"diameter must be positive, got {diam}")
    exponent = (1.0 - theta) ** 2 * n * t * t / (2.0 * D * D * diam * diam)
    return math.exp(-exponent)


@dataclass(frozen=True)
class TailCheckResult:
    """Exceedance count of an ensemble against a stated tail bound."""

    t: float
    empirical_mean: float
    exceed_count: int
    replicates: int
    bound: float
    binomial_slack: float

    @property
    def empirical_frequency(self) -> float:
        return self.exceed_count / self.replicates

    @property
    def passed(self) -> bool:
        return self.empirical_frequency <= self.bound + self.binomial_slack


def empirical_tail_check(samples, t: float, bound: float) -> TailCheckResult:
    """Count samples exceeding mean + t and compare against the bound.

    The slack is the 95% one-sided binomial margin: were the true
    exceedance probability exactly `bound`, the observed frequency would
    stay at or below bound + slack in 95% of ensembles of this size.
    """
    values = np.asarray(samples, dtype=float)
    if values.ndim != 1:
        raise ValueError("samples must form a flat list")
    R = len(values)
    if R < 100:
        raise ValueError(f"need at least 100 replicates for a meaningful check, got {R}")
    if t < 0:
        raise ValueError(f"threshold t must be nonnegative, got {t}")
    if not 0.0 <= bound <= 1.0:
        raise ValueError(f"bound must be a probability, got {bound}")
    mean = float(values.mean())
    exceed = int(np.count_nonzero(values > mean + t))
    quantile = float(stats.binom.ppf(0.95, R, bound)) if bound > 0 else 0.0
    slack = quantile / R - bound
    return TailCheckResult(
        t=t,
        empirical_mean=mean,
        exceed_count=exceed,
        replicates=R,
        bound=bound,
        binomial_slack=max(slack, 0.0),
    )
