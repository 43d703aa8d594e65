"""Measures on the unit cube and torus, dyadic cells, Fourier coefficients.

The ambient space is [0, 1]^d, optionally glued into the torus T^d.
Discrete measures carry explicit atoms and weights; reference measures
expose exact capabilities (cell masses, Fourier coefficients, a CDF in
one dimension) through oracles so that downstream bounds never rely on
numerical integration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

MASS_TOL = 1e-12

#: refuse to materialize partitions larger than this many cells
DEFAULT_CELL_BUDGET = 2**24


@dataclass(frozen=True)
class Domain:
    """Ambient space: dimension, cube-or-torus geometry, and a metric."""

    d: int
    geometry: str = "unit_cube"
    metric: str = "supremum"

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"dimension must be positive, got {self.d}")
        if self.geometry not in ("unit_cube", "torus"):
            raise ValueError(f"unknown geometry {self.geometry!r}")
        if self.metric not in ("euclidean", "supremum"):
            raise ValueError(f"unknown metric {self.metric!r}")

    def distance(self, x, y) -> float:
        """Distance between two points, wrapping coordinates on the torus."""
        dx = np.abs(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))
        if dx.shape != (self.d,):
            raise ValueError(f"expected points of dimension {self.d}")
        if self.geometry == "torus":
            dx = np.minimum(dx, 1.0 - dx)
        if self.metric == "euclidean":
            return float(np.sqrt(np.sum(dx * dx)))
        return float(np.max(dx))

    def pairwise_distances(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Distance matrix between rows of xs and rows of ys."""
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        dx = np.abs(xs[:, None, :] - ys[None, :, :])
        if self.geometry == "torus":
            dx = np.minimum(dx, 1.0 - dx)
        if self.metric == "euclidean":
            return np.sqrt(np.sum(dx * dx, axis=2))
        return np.max(dx, axis=2)

    @property
    def diameter(self) -> float:
        per_coord = 0.5 if self.geometry == "torus" else 1.0
        if self.metric == "euclidean":
            return per_coord * math.sqrt(self.d)
        return per_coord


@dataclass(frozen=True)
class DyadicCell:
    """Half-open box prod_i [tau_i b^-j, (tau_i + 1) b^-j) at depth j in base b.

    The outer boundary of the cube is attributed to the last cell along
    each axis, so depth-j cells cover all of [0, 1]^d.
    """

    base: int
    depth: int
    index: tuple[int, ...]

    def __post_init__(self):
        if self.base < 2:
            raise ValueError(f"base must be at least 2, got {self.base}")
        if self.depth < 0:
            raise ValueError(f"depth must be nonnegative, got {self.depth}")
        object.__setattr__(self, "index", tuple(int(t) for t in self.index))
        width = self.base**self.depth
        for t in self.index:
            if not 0 <= t < width:
                raise ValueError(f"index {self.index} out of range for depth {self.depth}")

    @property
    def d(self) -> int:
        return len(self.index)

    @property
    def side(self) -> float:
        return float(self.base) ** (-self.depth)

    def lower(self) -> tuple[float, ...]:
        return tuple(t * self.side for t in self.index)

    def upper(self) -> tuple[float, ...]:
        return tuple((t + 1) * self.side for t in self.index)

    def center(self) -> tuple[float, ...]:
        return tuple((t + 0.5) * self.side for t in self.index)

    def contains(self, point: Sequence[float]) -> bool:
        point = tuple(float(c) for c in point)
        if len(point) != self.d:
            raise ValueError("point dimension does not match cell")
        width = self.base**self.depth
        for t, c in zip(self.index, point):
            k = min(int(math.floor(c * width)), width - 1)
            if k != t:
                return False
        return True

    def parent(self) -> "DyadicCell":
        if self.depth == 0:
            raise ValueError("the root cell has no parent")
        return DyadicCell(self.base, self.depth - 1, tuple(t // self.base for t in self.index))

    def children(self) -> list["DyadicCell"]:
        offsets = _index_grid(self.base, self.d)
        return [
            DyadicCell(self.base, self.depth + 1, tuple(self.base * t + o for t, o in zip(self.index, off)))
            for off in offsets
        ]


@dataclass(frozen=True)
class FrequencyIndex:
    """Integer frequency vector k of a torus character e_k(x) = exp(2 pi i k.x)."""

    k: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "k", tuple(int(c) for c in self.k))

    @property
    def d(self) -> int:
        return len(self.k)

    @property
    def sup_norm(self) -> int:
        return max(abs(c) for c in self.k) if self.k else 0


def _index_grid(base: int, d: int) -> np.ndarray:
    """All d-tuples with entries in range(base), in row-major order."""
    grids = np.meshgrid(*[np.arange(base)] * d, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def partition(base: int, depth: int, d: int, cell_budget: int = DEFAULT_CELL_BUDGET) -> list[DyadicCell]:
    """All cells of the depth-`depth` base-`base` partition of [0, 1]^d."""
    if base < 2 or depth < 0 or d < 1:
        raise ValueError("need base >= 2, depth >= 0, d >= 1")
    count = base ** (d * depth)
    if count > cell_budget:
        raise ValueError(f"partition would hold {count} cells, over the budget of {cell_budget}")
    side = np.arange(base**depth)
    grids = np.meshgrid(*[side] * d, indexing="ij")
    idx = np.stack([g.ravel() for g in grids], axis=1)
    return [DyadicCell(base, depth, tuple(row)) for row in idx]


def cell_index_array(points: np.ndarray, base: int, depth: int) -> np.ndarray:
    """Integer cell coordinates of each point at the given base and depth.

    Scaling by an exact power of two keeps the floor computation exact
    for bases 2 and 4; the outer boundary joins the last cell.
    """
    width = base**depth
    idx = np.floor(points * width).astype(np.int64)
    return np.minimum(idx, width - 1)


def flatten_cell_index(idx: np.ndarray, base: int, depth: int) -> np.ndarray:
    """Row-major linearization of integer cell coordinates."""
    width = base**depth
    flat = np.zeros(len(idx), dtype=np.int64)
    for c in range(idx.shape[1]):
        flat = flat * width + idx[:, c]
    return flat


def unflatten_cell_index(flat: np.ndarray, base: int, depth: int, d: int) -> np.ndarray:
    """Inverse of flatten_cell_index: (m,) linear indices back to (m, d)."""
    width = base**depth
    out = np.empty((len(flat), d), dtype=np.int64)
    rem = np.asarray(flat, dtype=np.int64).copy()
    for c in range(d - 1, -1, -1):
        out[:, c] = rem % width
        rem //= width
    return out


class DiscreteMeasure:
    """Finitely supported probability measure on [0, 1]^d.

    Weights must be positive and sum to one within 1e-12.  ``n_samples``
    records the sample count when the measure is an empirical one.
    """

    __slots__ = ("points", "weights", "n_samples", "d")

    def __init__(self, points, weights=None, n_samples: int | None = None):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.ndim != 2:
            raise ValueError("points must form an (n, d) array")
        n = len(pts)
        if n == 0:
            raise ValueError("a discrete measure needs at least one atom")
        if weights is None:
            w = np.full(n, 1.0 / n)
        else:
            w = np.asarray(weights, dtype=float)
            if w.shape != (n,):
                raise ValueError("weights must match the number of atoms")
        if np.any(w <= 0.0):
            raise ValueError("weights must be strictly positive")
        total = math.fsum(w.tolist())
        if abs(total - 1.0) > MASS_TOL:
            raise ValueError(f"weights sum to {total}, not 1 within {MASS_TOL}")
        if pts.min() < 0.0 or pts.max() > 1.0:
            raise ValueError("atom coordinates must lie in [0, 1]")
        pts.flags.writeable = False
        w.flags.writeable = False
        self.points = pts
        self.weights = w
        self.n_samples = n_samples
        self.d = pts.shape[1]

    def __len__(self) -> int:
        return len(self.points)

    @classmethod
    def empirical(cls, samples) -> "DiscreteMeasure":
        """Uniform weights 1/n on the given sample points."""
        samples = np.atleast_2d(np.asarray(samples, dtype=float))
        return cls(samples, n_samples=len(samples))

    def cell_mass(self, cell: DyadicCell) -> float:
        """Total weight of atoms inside the half-open cell."""
        if cell.d != self.d:
            raise ValueError("cell dimension does not match measure")
        idx = cell_index_array(self.points, cell.base, cell.depth)
        inside = np.all(idx == np.asarray(cell.index, dtype=np.int64), axis=1)
        if not inside.any():
            return 0.0
        return math.fsum(self.weights[inside].tolist())

    def fourier_coefficient(self, k) -> complex:
        """mu(e_k) = sum_a w_a exp(2 pi i k . x_a)."""
        kv = np.asarray(k.k if isinstance(k, FrequencyIndex) else k, dtype=float)
        if kv.shape != (self.d,):
            raise ValueError("frequency dimension does not match measure")
        phases = np.exp(2j * np.pi * (self.points @ kv))
        return complex(np.sum(self.weights * phases))


def _cantor_coordinate_mass(bits: int, tau: int) -> float:
    """Mass of a binary prefix of length `bits` under the quaternary Cantor law.

    The marginal law draws base-4 digits uniformly from {0, 3}; in binary
    that is an i.i.d. sequence of 00/11 blocks.  A prefix is charged
    2^(-ceil(bits/2)) when all of its complete blocks read 00 or 11, and
    nothing otherwise (a trailing half block can always be extended).
    """
    pairs = bits // 2
    for p in range(pairs):
        shift = bits - 2 * (p + 1)
        block = (tau >> shift) & 0b11
        if block not in (0b00, 0b11):
            return 0.0
    return 2.0 ** (-((bits + 1) // 2))


@dataclass(frozen=True)
class ReferenceMeasure:
    """Population measure with exact oracles for cell masses and more.

    ``kind`` is one of ``uniform_cube``, ``four_corners_cantor`` or
    ``custom``.  Custom measures supply whichever capability callables
    they support; missing capabilities raise ValueError when used.
    ``support_exact`` declares that ``cell_mass`` returning zero is an
    exact statement that the cell misses the support.
    """

    domain: Domain
    kind: str
    support_exact: bool = False
    cell_mass_fn: Callable[[DyadicCell], float] | None = field(default=None, repr=False)
    fourier_fn: Callable[[tuple[int, ...]], complex] | None = field(default=None, repr=False)
    cdf_knots: tuple[tuple[float, ...], tuple[float, ...]] | None = field(default=None, repr=False)
    sampler_fn: Callable[[np.random.Generator, int], np.ndarray] | None = field(default=None, repr=False)

    @property
    def d(self) -> int:
        return self.domain.d

    def cell_mass(self, cell: DyadicCell) -> float:
        if cell.d != self.d:
            raise ValueError("cell dimension does not match measure")
        if self.kind == "uniform_cube":
            return cell.side**self.d
        if self.kind == "four_corners_cantor":
            return self._cantor_cell_mass(cell)
        if self.cell_mass_fn is not None:
            return float(self.cell_mass_fn(cell))
        raise ValueError(f"reference of kind {self.kind!r} has no cell-mass oracle")

    def _cantor_cell_mass(self, cell: DyadicCell) -> float:
        if cell.base == 4:
            bits = 2 * cell.depth
        elif cell.base == 2:
            bits = cell.depth
        else:
            raise ValueError("the four-corners measure indexes cells in base 4 or base 2")
        mass = 1.0
        for tau in cell.index:
            mass *= _cantor_coordinate_mass(bits, tau)
            if mass == 0.0:
                return 0.0
        return mass

    def bulk_cell_mass(self, base: int, depth: int, idx: np.ndarray) -> np.ndarray:
        """Vectorized cell masses for an (m, d) array of integer cell coordinates."""
        if self.kind == "uniform_cube":
            return np.full(len(idx), float(base) ** (-depth * self.d))
        if self.kind == "four_corners_cantor":
            if base == 4:
                bits = 2 * depth
            elif base == 2:
                bits = depth
            else:
                raise ValueError("the four-corners measure indexes cells in base 4 or base 2")
            ok = np.ones(len(idx), dtype=bool)
            for p in range(bits // 2):
                shift = bits - 2 * (p + 1)
                for c in range(idx.shape[1]):
                    block = (idx[:, c] >> shift) & 0b11
                    ok &= (block == 0b00) | (block == 0b11)
            per_coord = 2.0 ** (-((bits + 1) // 2))
            return np.where(ok, per_coord ** idx.shape[1], 0.0)
        return np.array([self.cell_mass(DyadicCell(base, depth, tuple(row))) for row in idx])

    def fourier_coefficient(self, k) -> complex:
        kv = tuple(int(c) for c in (k.k if isinstance(k, FrequencyIndex) else k))
        if len(kv) != self.d:
            raise ValueError("frequency dimension does not match measure")
        if self.kind == "uniform_cube":
            return complex(1.0) if all(c == 0 for c in kv) else complex(0.0)
        if self.fourier_fn is not None:
            return complex(self.fourier_fn(kv))
        raise ValueError(f"reference of kind {self.kind!r} has no Fourier oracle")

    @property
    def has_fourier(self) -> bool:
        return self.kind == "uniform_cube" or self.fourier_fn is not None

    @property
    def has_cdf(self) -> bool:
        return self.d == 1 and (self.kind == "uniform_cube" or self.cdf_knots is not None)

    def cdf_as_knots(self) -> tuple[np.ndarray, np.ndarray]:
        """Piecewise-linear CDF as (x knots, F values); d = 1 only."""
        if self.d != 1:
            raise ValueError("a CDF needs a one-dimensional measure")
        if self.kind == "uniform_cube":
            return np.array([0.0, 1.0]), np.array([0.0, 1.0])
        if self.cdf_knots is not None:
            xs, fs = self.cdf_knots
            return np.asarray(xs, dtype=float), np.asarray(fs, dtype=float)
        raise ValueError(f"reference of kind {self.kind!r} has no CDF oracle")

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.kind == "uniform_cube":
            return rng.random((n, self.d))
        if self.sampler_fn is not None:
            return self.sampler_fn(rng, n)
        raise ValueError(f"reference of kind {self.kind!r} has no sampler")


def uniform_reference(d: int, geometry: str = "unit_cube", metric: str = "supremum") -> ReferenceMeasure:
    """Lebesgue measure on [0, 1]^d (uniform on the torus when glued)."""
    return ReferenceMeasure(Domain(d, geometry, metric), "uniform_cube", support_exact=True)


def cantor_reference(metric: str = "supremum", digits: int = 16) -> ReferenceMeasure:
    """Self-similar measure of the four-corner Cantor set in the unit square.

    Mass 4^-j on each of the 4^j admissible base-4 squares at depth j.
    The sampler draws `digits` quaternary digits, so atoms lie exactly on
    the attractor.
    """
    from .samplers import sample_cantor_points

    return ReferenceMeasure(
        Domain(2, "unit_cube", metric),
        "four_corners_cantor",
        support_exact=True,
        sampler_fn=lambda rng, n: sample_cantor_points(rng, n, digits=digits),
    )


def custom_reference(
    domain: Domain,
    cell_mass_fn=None,
    fourier_fn=None,
    cdf_knots=None,
    sampler_fn=None,
    support_exact: bool = False,
) -> ReferenceMeasure:
    """Reference measure assembled from user-supplied capability oracles."""
    return ReferenceMeasure(
        domain,
        "custom",
        support_exact=support_exact,
        cell_mass_fn=cell_mass_fn,
        fourier_fn=fourier_fn,
        cdf_knots=cdf_knots,
        sampler_fn=sampler_fn,
    )


def cell_mass(measure, cell: DyadicCell) -> float:
    """Mass the measure assigns to a dyadic cell, using its exact oracle."""
    return measure.cell_mass(cell)


def fourier_coefficient(measure, k) -> complex:
    """Coefficient mu(e_k) of a measure against the torus character e_k."""
    return measure.fourier_coefficient(k)
