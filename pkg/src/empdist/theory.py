"""Closed-form rate bounds for empirical measures.

Each function evaluates a finite-n expression, not an asymptotic order
symbol.  The dyadic bounds come in a sup-metric flavor (``wq_inf_rhs``)
and a Euclidean W1 flavor (``w1_euclid_rhs``), split into three regimes
by the sign of d - 2q.  The C^s dual-norm rates cover the i.i.d. and
contracting-chain settings.  All evaluators are monotone nonincreasing
in n for n >= 16.
"""

from __future__ import annotations

import math


def _check_q(q: float) -> None:
    if not 0.0 < q <= 1.0:
        raise ValueError(f"q must lie in (0, 1], got {q}")


def _check_dn(d: int, n: int) -> None:
    if d < 1:
        raise ValueError(f"dimension must be a positive integer, got {d}")
    if n < 1:
        raise ValueError(f"sample size must be a positive integer, got {n}")


def wq_regime(q: float, d: int) -> str:
    """Classify (q, d) as 'small', 'critical' or 'large' by d vs 2q."""
    _check_q(q)
    if d < 2 * q:
        return "small"
    if d == 2 * q:
        return "critical"
    return "large"


def wq_large_constant(q: float, d: int) -> float:
    """n-free coefficient of the large-dimension sup-metric bound.

    Equals 2 * ((d/2 - q) / (2q (1 - 2^(q - d/2))))^(2q/d) * (1 + q / (2^q (d/2 - q))).
    For q = 1, d = 4 this is exactly 3.
    """
    _check_q(q)
    if d <= 2 * q:
        raise ValueError("large-dimension constant requires d > 2q")
    half = d / 2.0 - q
    lead = (half / (2.0 * q * (1.0 - 2.0 ** (q - d / 2.0)))) ** (2.0 * q / d)
    return 2.0 * lead * (1.0 + q / (2.0**q * half))


def wq_inf_rhs(q: float, d: int, n: int) -> float:
    """Mean sup-metric W_q bound for n i.i.d. samples on the unit cube.

    Small (d < 2q):    2^(d/2 - 2q) / (1 - 2^(d/2 - q)) * n^(-1/2)
    Critical (d = 2q): (2 + log2(n) / (2^(q+1) q)) * n^(-1/2)
    Large (d > 2q):    wq_large_constant(q, d) * n^(-q/d)
    """
    _check_q(q)
    _check_dn(d, n)
    regime = wq_regime(q, d)
    if regime == "small":
        return 2.0 ** (d / 2.0 - 2.0 * q) / (1.0 - 2.0 ** (d / 2.0 - q)) / math.sqrt(n)
    if regime == "critical":
        return (2.0 + math.log2(n) / (2.0 ** (q + 1.0) * q)) / math.sqrt(n)
    return wq_large_constant(q, d) * n ** (-q / d)


def w1_euclid_rhs(d: int, n: int) -> float:
    """Mean Euclidean W_1 bound for n i.i.d. samples on the unit cube.

    d = 1 gives n^(-1/2) / (2 (sqrt(2) - 1)), d = 2 gives
    (log2(n) + 8) / sqrt(8 n), and d >= 3 gives sqrt(d) times the
    sup-metric constant, decaying like n^(-1/d).
    """
    _check_dn(d, n)
    if d == 1:
        return 1.0 / (2.0 * (math.sqrt(2.0) - 1.0)) / math.sqrt(n)
    if d == 2:
        return (math.log2(n) + 8.0) / math.sqrt(8.0 * n)
    return math.sqrt(d) * wq_large_constant(1.0, d) * n ** (-1.0 / d)


def _cs_rate(s: float, d: int, nbar: float, scale: float) -> float:
    if s <= 0.0:
        raise ValueError(f"smoothness s must be positive, got {s}")
    if nbar <= 1.0:
        raise ValueError(f"effective sample size must exceed 1, got {nbar}")
    ln = math.log(nbar)
    if s > d / 2.0:
        return scale * ln ** (d / (2.0 * s + 1.0)) / math.sqrt(nbar)
    if s == d / 2.0:
        return scale * ln / math.sqrt(nbar)
    return scale * ln ** (d - 2.0 * s + s / d) / nbar ** (s / d)


def markov_cs_rate(s: float, d: int, n: int, theta: float, scale: float = 1.0) -> float:
    """C^s dual-norm rate for a chain with Wasserstein contraction factor theta.

    Uses the effective sample size nbar = (1 - theta) n.  Natural log
    throughout.  ``scale`` multiplies the whole expression.
    """
    _check_dn(d, n)
    if not 0.0 <= theta < 1.0:
        raise ValueError(f"contraction factor must lie in [0, 1), got {theta}")
    return _cs_rate(s, d, (1.0 - theta) * n, scale)


def iid_cs_rate(s: float, d: int, n: int, scale: float = 1.0) -> float:
    """C^s dual-norm rate for i.i.d. sampling; equals the chain rate at theta = 0."""
    return markov_cs_rate(s, d, n, 0.0, scale)


def lower_bound_lebesgue(d: int, n: int, q: float = 1.0, metric: str = "supremum") -> float:
    """Minimax lower bound for approximating Lebesgue measure by n atoms.

    Supremum metric: d / ((d + q) 2^q) * n^(-q/d), any q in (0, 1].
    Euclidean metric (q = 1 only): d Gamma(d/2 + 1)^(1/d) / ((d+1) sqrt(pi)) * n^(-1/d).
    """
    _check_q(q)
    _check_dn(d, n)
    if metric == "supremum":
        return d / ((d + q) * 2.0**q) * n ** (-q / d)
    if metric == "euclidean":
        if q != 1.0:
            raise ValueError("euclidean lower bound is only available for q = 1")
        return d * math.gamma(d / 2.0 + 1.0) ** (1.0 / d) / ((d + 1.0) * math.sqrt(math.pi)) * n ** (-1.0 / d)
    raise ValueError(f"unknown metric {metric!r}")


def binomial_mad_rhs(n: int, p: float) -> float:
    """Upper bound sqrt(n p (1 - p)) for the mean absolute deviation of Bin(n, p)."""
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return math.sqrt(n * p * (1.0 - p))
