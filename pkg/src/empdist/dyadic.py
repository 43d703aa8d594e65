"""Multiscale Wasserstein upper bounds on the unit cube.

The W_q distance (q-Hoelder dual norm, supremum metric) between an
empirical measure and a reference is bounded by snapping test functions
to cell centers of a base-b partition hierarchy, level by level:

    W_q(mu_n, nu) <= 2 (b^-J / 2)^q + sum_{j=1}^J w_j D_j,
    w_j = ((b-1)/2 * b^-j)^q,
    D_j = sum over depth-j cells |mu_n(cell) - nu(cell)|.

The weight w_j is the worst move between a cell center and its parent's
center, and the leading term pays for the final snap of both measures.
Cell counts grow geometrically, so discrepancies are accumulated
sparsely from the occupied cells only; the complement contributes
exactly 1 - (reference mass of occupied cells).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .measures import (
    DiscreteMeasure,
    ReferenceMeasure,
    cell_index_array,
    flatten_cell_index,
    unflatten_cell_index,
)
from .theory import wq_regime

ALPHA_TOL = 1e-9


def level_weight(j: int, q: float, base: int = 2) -> float:
    """Center-to-parent-center moving cost at depth j: ((b-1)/2 b^-j)^q."""
    if j < 1:
        raise ValueError(f"levels start at depth 1, got {j}")
    return ((base - 1) / 2 * float(base) ** -j) ** q


def truncation_term(depth: int, q: float, base: int = 2) -> float:
    """Cost of snapping both measures to depth-J cell centers."""
    return 2.0 * (float(base) ** -depth / 2.0) ** q


def choose_depth(q: float, d: int, n: int, base: int = 2) -> tuple[int, str]:
    """Truncation depth balancing the two error sources, by regime.

    Below the critical dimension the variance term is summable, so the
    depth only needs to push the truncation under 1/sqrt(n).  At the
    critical dimension every level contributes equally and the optimal
    depth is half as deep.  Above it, the last level dominates and the
    balance point A solves the geometric-sum equation; any depth with
    b^J in [A/2, A] is within a constant of optimal, and we take the
    deepest one not exceeding A.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if q <= 0 or q > 1:
        raise ValueError(f"q must lie in (0, 1], got {q}")
    regime = wq_regime(q, d)
    logb_n = math.log(n) / math.log(base)
    if regime == "small":
        depth = math.ceil(logb_n / q)
    elif regime == "critical":
        depth = math.floor(logb_n / (2 * q))
    else:
        factor = (2 * q * (1 - 2 ** (q - d / 2)) / (d / 2 - q)) ** (2 / d)
        balance = n ** (1 / d) * factor
        depth = math.floor(math.log(balance) / math.log(base))
    return max(depth, 1), regime


@dataclass(frozen=True)
class LevelContribution:
    depth: int
    weight: float
    discrepancy: float
    occupied_cells: int

    @property
    def contribution(self) -> float:
        return self.weight * self.discrepancy


@dataclass(frozen=True)
class DyadicBoundReport:
    """Multiscale upper bound with its per-level breakdown."""

    q: float
    base: int
    depth: int
    regime: str
    n_atoms: int
    truncation: float
    levels: tuple[LevelContribution, ...]

    @property
    def total(self) -> float:
        return math.fsum([self.truncation] + [lv.contribution for lv in self.levels])


def level_discrepancy(
    mu: DiscreteMeasure,
    ref: ReferenceMeasure,
    depth: int,
    base: int = 2,
    restrict_to_support: bool = False,
) -> tuple[float, int]:
    """Total variation of cell masses at one depth, over all cells.

    Only occupied cells are enumerated; unoccupied cells hold no
    empirical mass, so they contribute exactly the leftover reference
    mass.  With restrict_to_support the call certifies that every
    occupied cell carries reference mass and fails loudly otherwise,
    since silently dropping stray empirical mass would understate the
    bound.
    """
    flat = flatten_cell_index(cell_index_array(mu.points, base, depth), base, depth)
    uniq, inverse = np.unique(flat, return_inverse=True)
    emp = np.bincount(inverse, weights=mu.weights, minlength=len(uniq))
    p = ref.bulk_cell_mass(base, depth, unflatten_cell_index(uniq, base, depth, mu.d))
    if restrict_to_support and (p <= 0.0).any():
        stray = float(emp[p <= 0.0].sum())
        raise ValueError(
            f"{int((p <= 0.0).sum())} occupied cells at depth {depth} carry no "
            f"reference mass (empirical mass {stray:.3g}); the support "
            "restriction does not apply"
        )
    covered = math.fsum(p)
    disc = math.fsum(np.abs(emp - p)) + max(0.0, 1.0 - covered)
    return disc, len(uniq)


def dyadic_wq_bound(
    mu: DiscreteMeasure,
    ref: ReferenceMeasure,
    q: float,
    depth: int | None = None,
    base: int = 2,
    restrict_to_support: bool = False,
) -> DyadicBoundReport:
    """Multiscale upper bound on W_q(mu, ref) in the supremum metric."""
    if q <= 0 or q > 1:
        raise ValueError(f"q must lie in (0, 1], got {q}")
    if base < 2:
        raise ValueError(f"base must be at least 2, got {base}")
    if mu.d != ref.d:
        raise ValueError("measure and reference dimensions differ")
    d = mu.d
    if depth is None:
        n = mu.n_samples if mu.n_samples is not None else len(mu)
        depth, regime = choose_depth(q, d, max(n, 2), base=base)
    else:
        if depth < 1:
            raise ValueError(f"depth must be positive, got {depth}")
        regime = wq_regime(q, d)
    levels = []
    for j in range(1, depth + 1):
        disc, occupied = level_discrepancy(
            mu, ref, j, base=base, restrict_to_support=restrict_to_support
        )
        levels.append(LevelContribution(j, level_weight(j, q, base), disc, occupied))
    return DyadicBoundReport(
        q=q,
        base=base,
        depth=depth,
        regime=regime,
        n_atoms=len(mu),
        truncation=truncation_term(depth, q, base),
        levels=tuple(levels),
    )


def random_holder_function(
    q: float, d: int, rng: np.random.Generator, kind: str = "cones", m: int = 8
):
    """Random test function with Hoelder constant at most 1 (sup metric).

    cones:     (1/m) sum_i s_i |x - a_i|_inf^q, signs s_i uniform
    min_cones: min_i |x - a_i|_inf^q
    sinusoid:  sin(2 pi k . x) / (2 pi |k|_1), q = 1 only

    Each family is exactly 1-Hoelder or better: cones average m
    functions that are individually 1-Hoelder, a minimum of 1-Hoelder
    functions is 1-Hoelder, and the sinusoid's gradient has l1 norm
    at most 1.
    """
    if kind == "cones":
        anchors = rng.random((m, d))
        signs = rng.choice([-1.0, 1.0], size=m)

        def f(x):
            x = np.atleast_2d(x)
            dist = np.abs(x[:, None, :] - anchors[None, :, :]).max(axis=2)
            return (dist**q * signs).mean(axis=1)

        return f
    if kind == "min_cones":
        anchors = rng.random((m, d))

        def f(x):
            x = np.atleast_2d(x)
            dist = np.abs(x[:, None, :] - anchors[None, :, :]).max(axis=2)
            return (dist**q).min(axis=1)

        return f
    if kind == "sinusoid":
        if q != 1.0:
            raise ValueError("the sinusoid family is Lipschitz, so q must be 1")
        k = rng.integers(1, 4, size=d) * rng.choice([-1, 1], size=d)
        norm = 2.0 * math.pi * np.abs(k).sum()

        def f(x):
            x = np.atleast_2d(x)
            return np.sin(2.0 * math.pi * (x @ k)) / norm

        return f
    raise ValueError(f"unknown test-function family {kind!r}")


@dataclass(frozen=True)
class HolderDecomposition:
    """Telescoping expansion of f over the cell hierarchy.

    c0 is the value at the root center; alphas[j-1][cell] is the jump
    f(center of cell) - f(center of parent) at depth j.  Evaluating the
    expansion at x sums the jumps along x's path, which telescopes to
    f(center of x's depth-J cell).
    """

    q: float
    base: int
    depth: int
    d: int
    c0: float
    alphas: tuple[np.ndarray, ...]
    remainder_bound: float
    sampled_remainder: float
    violations: tuple[tuple[int, int, float, float], ...]

    @property
    def alpha_bounds(self) -> tuple[float, ...]:
        return tuple(level_weight(j, self.q, self.base) for j in range(1, self.depth + 1))

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        out = np.full(len(points), self.c0)
        for j in range(1, self.depth + 1):
            flat = flatten_cell_index(cell_index_array(points, self.base, j), self.base, j)
            out += self.alphas[j - 1][flat]
        return out


def _cell_centers(base: int, depth: int, d: int) -> np.ndarray:
    """Centers of all depth-`depth` cells, ordered by flattened index."""
    width = base**depth
    axis = (np.arange(width) + 0.5) / width
    grids = np.meshgrid(*([axis] * d), indexing="ij")
    return np.column_stack([g.ravel() for g in grids])


def holder_decompose(
    f, q: float, depth: int, d: int, base: int = 2, probe_extra: int = 2
) -> HolderDecomposition:
    """Expand f over cell centers and audit it against the Hoelder budget.

    Coefficients exceeding their level weight are collected as
    violations rather than raised: the caller may be probing whether a
    function is 1-Hoelder in the first place.  The remainder f - f_J is
    sampled on a grid `probe_extra` levels deeper than the expansion.
    """
    if depth < 1:
        raise ValueError(f"depth must be positive, got {depth}")
    if base**((depth + probe_extra) * d) > 2**24:
        raise ValueError("expansion grid too large; lower the depth")
    c0 = float(np.asarray(f(np.full((1, d), 0.5)))[0])
    alphas = []
    violations = []
    prev_values = np.array([c0])
    prev_width = 1
    for j in range(1, depth + 1):
        centers = _cell_centers(base, j, d)
        values = np.asarray(f(centers), dtype=float)
        parent_idx = flatten_cell_index(cell_index_array(centers, base, j - 1), base, j - 1)
        alpha = values - prev_values[parent_idx]
        bound = level_weight(j, q, base)
        bad = np.flatnonzero(np.abs(alpha) > bound + ALPHA_TOL)
        violations.extend((j, int(i), float(abs(alpha[i])), bound) for i in bad)
        alphas.append(alpha)
        prev_values = values
    probe = _cell_centers(base, depth + probe_extra, d)
    exact = np.asarray(f(probe), dtype=float)
    snap_idx = flatten_cell_index(cell_index_array(probe, base, depth), base, depth)
    sampled = float(np.abs(exact - prev_values[snap_idx]).max())
    return HolderDecomposition(
        q=q,
        base=base,
        depth=depth,
        d=d,
        c0=c0,
        alphas=tuple(alphas),
        remainder_bound=(float(base) ** -depth / 2.0) ** q,
        sampled_remainder=sampled,
        violations=tuple(violations),
    )
