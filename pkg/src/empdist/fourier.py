"""Fourier-truncation upper bound on the C^s dual distance over the torus.

The dual norm against the unit ball of C^s test functions is bounded by
two computable terms: an approximation term (ln J)^d / J^s from
truncating test functions at frequency J, and a stochastic term that
weights the observed coefficient errors by |k|^-s.  The approximation
constant is not pinned down by the analysis, so the total is a shape
estimator: sweeps compare slopes and term breakdowns, never absolute
values.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .measures import DiscreteMeasure, FrequencyIndex, ReferenceMeasure
from .samplers import ChainRun, MarkovKernelSpec, SeedSpec, sample_chain


@dataclass(frozen=True)
class FourierBoundParams:
    """Regularity s, truncation J, and the analysis constants."""

    s: float
    J: int
    alpha: float | None = None
    c_approx: float = 1.0

    def __post_init__(self):
        if self.s < 1:
            raise ValueError(f"regularity s must be at least 1, got {self.s}")
        if self.J < 3:
            raise ValueError(f"truncation J must be at least 3, got {self.J}")
        if self.alpha is None:
            object.__setattr__(self, "alpha", 1.0 / math.log(self.J))
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.c_approx <= 0:
            raise ValueError("c_approx must be positive")


@dataclass(frozen=True)
class FourierBoundReport:
    s: float
    J: int
    d: int
    n_frequencies: int
    approximation_term: float
    stochastic_term: float

    @property
    def total(self) -> float:
        return self.approximation_term + self.stochastic_term


def choose_J_fourier(s: float, d: int, n: int, theta: float = 0.0) -> tuple[int, float]:
    """Truncation frequency balancing the two terms, and n_bar = (1-theta)n.

    Natural logarithms throughout.  The three cases split on s versus
    d/2; the result is floored at 3, the smallest truncation for which
    the approximation term's form makes sense.
    """
    if not 0.0 <= theta < 1.0:
        raise ValueError(f"theta must lie in [0, 1), got {theta}")
    if s < 1:
        raise ValueError(f"regularity s must be at least 1, got {s}")
    nbar = (1.0 - theta) * n
    if nbar < 16:
        raise ValueError(f"effective sample count (1-theta)n = {nbar:.2f} is below 16")
    ln = math.log(nbar)
    if 2 * s > d:
        j = nbar ** (1.0 / (2 * s)) * ln ** (d / (s + 0.5))
    elif 2 * s == d:
        j = nbar ** (1.0 / (2 * s)) * ln ** ((d - 1) / s)
    else:
        j = ln ** (2.0 - 1.0 / d) * nbar ** (1.0 / d)
    return max(int(math.floor(j)), 3), nbar


def holder_constant_ek(k, alpha: float, d: int | None = None) -> float:
    """Hoelder seminorm bound 2 pi^alpha d^(alpha/2) |k|_inf^alpha for e_k."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    kv = k.k if isinstance(k, FrequencyIndex) else tuple(int(c) for c in k)
    if d is None:
        d = len(kv)
    elif d != len(kv):
        raise ValueError("explicit dimension does not match the frequency vector")
    sup = max(abs(c) for c in kv) if kv else 0
    if sup == 0:
        return 0.0
    return 2.0 * math.pi**alpha * d ** (alpha / 2.0) * float(sup) ** alpha


def _stochastic_sum_1d(emp: DiscreteMeasure, ref: ReferenceMeasure, s: float, J: int) -> tuple[float, int]:
    """Sum over 0 < |k| <= J of |coefficient error|^2 / |k|^(2s), d = 1.

    Powers of each atom's phase are built by a running product, one
    vector multiply per frequency; negative frequencies mirror positive
    ones because both measures are real.
    """
    z = np.exp(2j * np.pi * emp.points[:, 0])
    cur = np.ones_like(z)
    terms = []
    for k in range(1, J + 1):
        cur = cur * z
        delta = complex(np.dot(emp.weights, cur)) - ref.fourier_coefficient((k,))
        terms.append(2.0 * abs(delta) ** 2 / float(k) ** (2 * s))
    return math.fsum(terms), 2 * J


def _half_lattice(J: int, d: int):
    """Frequencies with 0 < |k|_inf <= J whose first nonzero entry is positive."""
    for k in itertools.product(range(-J, J + 1), repeat=d):
        for c in k:
            if c > 0:
                yield k
                break
            if c < 0:
                break


def _stochastic_sum_nd(emp: DiscreteMeasure, ref: ReferenceMeasure, s: float, J: int) -> tuple[float, int]:
    terms = []
    count = 0
    for k in _half_lattice(J, emp.d):
        kv = np.asarray(k, dtype=float)
        phases = np.exp(2j * np.pi * (emp.points @ kv))
        delta = complex(np.dot(emp.weights, phases)) - ref.fourier_coefficient(k)
        sup = max(abs(c) for c in k)
        terms.append(2.0 * abs(delta) ** 2 / float(sup) ** (2 * s))
        count += 2
    return math.fsum(terms), count


def cs_dual_bound(
    emp: DiscreteMeasure, ref: ReferenceMeasure, params: FourierBoundParams
) -> FourierBoundReport:
    """Two-term upper bound on the C^s dual distance between emp and ref."""
    if emp.d != ref.d:
        raise ValueError("measure and reference dimensions differ")
    if ref.domain.geometry != "torus":
        raise ValueError("the Fourier bound needs a torus reference")
    if not ref.has_fourier:
        raise ValueError("reference measure has no Fourier oracle")
    if emp.d == 1:
        stoch_sq, count = _stochastic_sum_1d(emp, ref, params.s, params.J)
    else:
        stoch_sq, count = _stochastic_sum_nd(emp, ref, params.s, params.J)
    approx = params.c_approx * math.log(params.J) ** emp.d / params.J**params.s
    return FourierBoundReport(
        s=params.s,
        J=params.J,
        d=emp.d,
        n_frequencies=count,
        approximation_term=approx,
        stochastic_term=math.sqrt(stoch_sq),
    )


def coefficient_variance_check(
    kernel: MarkovKernelSpec,
    k,
    alpha: float,
    n: int,
    replicates: int,
    seed: SeedSpec,
) -> tuple[float, float]:
    """Mean squared coefficient error over replicate chains, with its rate shape.

    Each replicate starts from an exact stationary draw, runs n steps,
    and measures |mu_hat_n(e_k) - mu(e_k)|^2.  The returned shape
    |k|_inf^(2 alpha) / ((1 - theta^alpha) n) carries no constant; use
    ratios across n or k for diagnostics.  Requires n at or above
    1 / (1 - theta^alpha), the threshold under which the chain has not
    mixed on the scale of e_k.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    if replicates < 1:
        raise ValueError("need at least one replicate")
    ref = kernel.stationary_ref
    if ref is None or not ref.has_fourier:
        raise ValueError("kernel has no stationary reference with a Fourier oracle")
    damp = 1.0 - kernel.claimed_theta**alpha
    if n < 1.0 / damp:
        raise ValueError(f"need n >= {1.0 / damp:.2f} = 1/(1 - theta^alpha), got {n}")
    kv = k if isinstance(k, FrequencyIndex) else FrequencyIndex(tuple(int(c) for c in k))
    target = ref.fourier_coefficient(kv)
    acc = []
    for r in range(replicates):
        rng = seed.stream(r, f"coeffvar-n{n}-k{kv.k}")
        start = tuple(ref.sample(rng, 1)[0])
        chain = sample_chain(ChainRun(kernel, n, start), rng)
        delta = chain.fourier_coefficient(kv) - target
        acc.append(abs(delta) ** 2)
    second_moment = math.fsum(acc) / replicates
    rhs_shape = float(kv.sup_norm) ** (2 * alpha) / (damp * n)
    return second_moment, rhs_shape
