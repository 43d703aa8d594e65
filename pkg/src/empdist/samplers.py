"""Seeded samplers: i.i.d. draws, iterated-map chains, coupling diagnostics.

Randomness is organized around a single base seed.  Every (replicate,
tag) pair is hashed into its own counter-based Philox stream, so any
subset of an experiment can be reproduced in isolation and the order in
which replicates run cannot change their draws.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from .measures import DiscreteMeasure, Domain, ReferenceMeasure, uniform_reference


@dataclass(frozen=True)
class SeedSpec:
    """Base seed plus a deterministic stream-derivation rule."""

    base_seed: int

    def stream(self, replicate: int, tag: str = "") -> np.random.Generator:
        """Independent generator for one (replicate, tag) pair.

        The tag is hashed with blake2b (stable across runs and platforms,
        unlike the builtin hash) and folded into the spawn key.
        """
        if replicate < 0:
            raise ValueError(f"replicate must be nonnegative, got {replicate}")
        digest = hashlib.blake2b(tag.encode("utf-8"), digest_size=8).digest()
        words = (
            int.from_bytes(digest[:4], "little"),
            int.from_bytes(digest[4:], "little"),
        )
        ss = np.random.SeedSequence(entropy=self.base_seed, spawn_key=(replicate, *words))
        return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class IidModel:
    """Sampling model for independent draws: uniform cube or Cantor IFS."""

    kind: str
    d: int
    digits: int = 16

    def __post_init__(self):
        if self.kind not in ("uniform_cube", "cantor_ifs"):
            raise ValueError(f"unknown i.i.d. model {self.kind!r}")
        if self.kind == "cantor_ifs" and self.d != 2:
            raise ValueError("the four-corners model lives in the unit square")
        if self.d < 1:
            raise ValueError(f"dimension must be positive, got {self.d}")


def sample_cantor_points(rng: np.random.Generator, n: int, digits: int = 16) -> np.ndarray:
    """Points x = sum_m 4^-m c_m with digit pairs c_m drawn from {0, 3}^2.

    Each draw picks one of the four corner maps per level.  With `digits`
    levels the output lies exactly on the attractor (the truncated digit
    string, padded with zeros, is itself an admissible expansion) and all
    coordinates stay in [0, 1).
    """
    if digits < 1 or digits > 26:
        raise ValueError("digits must lie in 1..26 so coordinates stay exact")
    corners = rng.integers(0, 4, size=(n, digits))
    scale = 3.0 * 4.0 ** -(np.arange(digits) + 1.0)
    x = (corners & 1) @ scale
    y = (corners >> 1) @ scale
    return np.column_stack([x, y])


def sample_iid(model: IidModel, n: int, rng: np.random.Generator) -> DiscreteMeasure:
    """Empirical measure of n independent draws from the model."""
    if n < 1:
        raise ValueError(f"need at least one sample, got {n}")
    if model.kind == "uniform_cube":
        pts = rng.random((n, model.d))
    else:
        pts = sample_cantor_points(rng, n, digits=model.digits)
    return DiscreteMeasure.empirical(pts)


@dataclass(frozen=True)
class MarkovKernelSpec:
    """One-step kernel of an interval/cube Markov chain.

    ``ifs_random_walk`` applies a random contraction x -> r_i x + t_i
    chosen with probability p_i.  ``inverse_doubling`` applies
    x -> (x + B) / 2 per coordinate with B uniform on {0, 1}; it maps
    [0, 1) to itself, so the torus wrap never activates.  claimed_theta
    and claimed_D describe the advertised Wasserstein contraction
    W1(m_x^t, m_y^t) <= D theta^t d(x, y).
    """

    kind: str
    domain: Domain
    claimed_theta: float
    claimed_D: float
    maps: tuple[tuple[float, tuple[float, ...], float], ...] = ()
    stationary_ref: ReferenceMeasure | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in ("ifs_random_walk", "inverse_doubling"):
            raise ValueError(f"unknown kernel {self.kind!r}")
        if not 0.0 < self.claimed_theta < 1.0:
            raise ValueError("claimed_theta must lie in (0, 1)")
        if self.kind == "ifs_random_walk":
            if not self.maps:
                raise ValueError("an IFS walk needs at least one map")
            total = math.fsum(p for _, _, p in self.maps)
            if abs(total - 1.0) > 1e-12:
                raise ValueError(f"map probabilities sum to {total}, not 1")


def inverse_doubling_kernel(d: int = 1) -> MarkovKernelSpec:
    """Doubling-map backward chain on T^d: X' = (X + B) / 2 per coordinate."""
    return MarkovKernelSpec(
        kind="inverse_doubling",
        domain=Domain(d, "torus", "supremum"),
        claimed_theta=0.5,
        claimed_D=1.0,
        stationary_ref=uniform_reference(d, geometry="torus"),
    )


def four_corners_chain_kernel() -> MarkovKernelSpec:
    """Random walk on the four corner contractions of the unit square."""
    from .measures import cantor_reference

    offsets = ((0.0, 0.0), (0.75, 0.0), (0.0, 0.75), (0.75, 0.75))
    maps = tuple((0.25, off, 0.25) for off in offsets)
    return MarkovKernelSpec(
        kind="ifs_random_walk",
        domain=Domain(2, "unit_cube", "supremum"),
        claimed_theta=0.25,
        claimed_D=1.0,
        maps=maps,
        stationary_ref=cantor_reference(),
    )


@dataclass(frozen=True)
class ChainRun:
    """A chain trajectory request: kernel, length, and starting point."""

    kernel: MarkovKernelSpec
    n: int
    start: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("chain length must be at least 1")

    def start_point(self) -> tuple[float, ...]:
        if self.start is None:
            return (0.0,) * self.kernel.domain.d
        if len(self.start) != self.kernel.domain.d:
            raise ValueError("start dimension does not match the kernel")
        if min(self.start) < 0.0 or max(self.start) >= 1.0:
            raise ValueError("start coordinates must lie in [0, 1)")
        return tuple(float(c) for c in self.start)


def _iterate_inverse_doubling(start, bits):
    n, d = bits.shape
    out = np.empty((n, d))
    if d == 1:
        x = start[0]
        col = bits[:, 0].tolist()
        flat = out[:, 0]
        for k, b in enumerate(col):
            x = 0.5 * (x + b)
            flat[k] = x
    else:
        x = np.asarray(start, dtype=float)
        for k in range(n):
            x = 0.5 * (x + bits[k])
            out[k] = x
    return out


def _iterate_ifs(start, maps, branches):
    n = len(branches)
    d = len(maps[0][1])
    ratios = [m[0] for m in maps]
    offs = [m[1] for m in maps]
    out = np.empty((n, d))
    if d == 2:
        x0, x1 = start
        for k, b in enumerate(branches):
            r = ratios[b]
            t = offs[b]
            x0 = r * x0 + t[0]
            x1 = r * x1 + t[1]
            out[k, 0] = x0
            out[k, 1] = x1
    else:
        x = np.asarray(start, dtype=float)
        for k, b in enumerate(branches):
            x = ratios[b] * x + np.asarray(offs[b])
            out[k] = x
    return out


def _draw_trajectory(kernel: MarkovKernelSpec, n: int, start, rng: np.random.Generator) -> np.ndarray:
    if kernel.kind == "inverse_doubling":
        bits = rng.integers(0, 2, size=(n, kernel.domain.d)).astype(float)
        return _iterate_inverse_doubling(start, bits)
    probs = np.array([p for _, _, p in kernel.maps])
    branches = rng.choice(len(kernel.maps), size=n, p=probs).tolist()
    return _iterate_ifs(start, kernel.maps, branches)


def sample_chain(run: ChainRun, rng: np.random.Generator) -> DiscreteMeasure:
    """Empirical measure of X_1 .. X_n (the start point is excluded)."""
    if run.n < 1:
        raise ValueError(f"need at least one step, got {run.n}")
    traj = _draw_trajectory(run.kernel, run.n, run.start_point(), rng)
    return DiscreteMeasure.empirical(traj)


def estimate_contraction(
    kernel: MarkovKernelSpec, t: int, pairs: int, rng: np.random.Generator
) -> float:
    """Worst observed ratio d(X_t, Y_t) / d(X_0, Y_0) under shared randomness.

    Both chains of a pair consume the same branch or bit sequence, which
    for the built-in kernels contracts distances pathwise.  Distances are
    taken between cube representatives (no torus wrap); for affine maps
    with a shared branch the ratio is then exactly the product of the
    contraction factors applied.
    """
    if t < 1 or pairs < 1:
        raise ValueError("need t >= 1 and pairs >= 1")
    d = kernel.domain.d
    cube = Domain(d, "unit_cube", kernel.domain.metric)
    worst = 0.0
    for _ in range(pairs):
        x = rng.random(d)
        y = rng.random(d)
        while not (x - y).any():
            y = rng.random(d)
        base = cube.distance(x, y)
        if kernel.kind == "inverse_doubling":
            bits = rng.integers(0, 2, size=(t, d)).astype(float)
            xt = _iterate_inverse_doubling(tuple(x), bits)[-1]
            yt = _iterate_inverse_doubling(tuple(y), bits)[-1]
        else:
            probs = np.array([p for _, _, p in kernel.maps])
            branches = rng.choice(len(kernel.maps), size=t, p=probs).tolist()
            xt = _iterate_ifs(tuple(x), kernel.maps, branches)[-1]
            yt = _iterate_ifs(tuple(y), kernel.maps, branches)[-1]
        worst = max(worst, cube.distance(xt, yt) / base)
    return worst


def estimate_autocorrelation(
    kernel: MarkovKernelSpec,
    observable,
    lag: int,
    n: int,
    rng: np.random.Generator,
    start: tuple[float, ...] | None = None,
) -> float:
    """Empirical |cov(f(X_m), f(X_{m+lag}))| along one trajectory.

    The observable is applied to the whole (n, d) trajectory at once and
    must return n values.  Requires n > 2 lag so both windows are longer
    than the lag itself.
    """
    if lag < 0:
        raise ValueError(f"lag must be nonnegative, got {lag}")
    if n <= 2 * lag:
        raise ValueError(f"need n > 2 lag, got n={n}, lag={lag}")
    traj = _draw_trajectory(kernel, n, ChainRun(kernel, n, start).start_point(), rng)
    f = np.asarray(observable(traj), dtype=float)
    if f.shape != (n,):
        raise ValueError("observable must return one value per step")
    if lag == 0:
        return float(np.mean(f * f) - np.mean(f) ** 2)
    head = f[: n - lag]
    tail = f[lag:]
    return abs(float(np.mean(head * tail) - np.mean(head) * np.mean(tail)))
