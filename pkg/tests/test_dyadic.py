import math

import numpy as np
import pytest

from empdist.dyadic import (
    choose_depth,
    dyadic_wq_bound,
    holder_decompose,
    level_discrepancy,
    level_weight,
    random_holder_function,
    truncation_term,
)
from empdist.measures import DiscreteMeasure, cantor_reference, uniform_reference
from empdist.samplers import IidModel, SeedSpec, sample_iid
from empdist.transport import w1_exact_1d, w1_reference_bracket


def test_level_weights():
    assert level_weight(1, 1.0) == pytest.approx(0.25)
    assert level_weight(3, 1.0) == pytest.approx(2.0 ** (-4))
    assert level_weight(2, 0.5, base=4) == pytest.approx(math.sqrt(1.5 * 4.0 ** (-2)))
    with pytest.raises(ValueError):
        level_weight(0, 1.0)


def test_truncation_term():
    assert truncation_term(3, 1.0) == pytest.approx(0.125)
    assert truncation_term(2, 0.5, base=4) == pytest.approx(2.0 * math.sqrt(4.0 ** (-2) / 2.0))
    # deeper truncation always helps
    vals = [truncation_term(j, 0.7) for j in range(1, 12)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_choose_depth_anchors():
    assert choose_depth(1.0, 2, 1024) == (5, "critical")
    assert choose_depth(1.0, 4, 4096) == (3, "large")
    assert choose_depth(1.0, 1, 256) == (8, "small")
    # hand-computed: A = n^(1/3) * (2(1-2^(-1/2))/(1/2))^(2/3), J = floor(log2 A)
    seq = [choose_depth(1.0, 3, 2**k)[0] for k in range(9, 16)]
    assert seq == [3, 3, 3, 4, 4, 4, 5]
    # base-4 critical rule for the corner measure's effective dimension
    assert choose_depth(0.5, 1, 256, base=4) == (4, "critical")


def test_single_atom_bound_by_hand():
    # one atom at the cube center, d=2, q=1, depth 1: the occupied cell
    # holds empirical mass 1 against reference 1/4, the other three cells
    # contribute the leftover 3/4, so D_1 = 1.5 and the level adds
    # 2^-2 * 1.5; truncation adds 2 * (1/2)/2 = 0.5
    mu = DiscreteMeasure([[0.5, 0.5]])
    report = dyadic_wq_bound(mu, uniform_reference(2), 1.0, depth=1)
    assert report.truncation == pytest.approx(0.5)
    assert report.levels[0].discrepancy == pytest.approx(1.5)
    assert report.total == pytest.approx(0.875)


def test_single_offcenter_atom_1d():
    # depth-1 discrepancy |1 - 1/2| + |0 - 1/2| = 1, weight 1/4, truncation 1/2
    mu = DiscreteMeasure([[0.1]])
    report = dyadic_wq_bound(mu, uniform_reference(1), 1.0, depth=1)
    assert report.total == pytest.approx(0.75)


def test_perfect_grid_leaves_only_truncation():
    # 4 atoms at the depth-1 cell centers of the square: every level-1
    # discrepancy vanishes
    pts = np.array([[0.25, 0.25], [0.25, 0.75], [0.75, 0.25], [0.75, 0.75]])
    mu = DiscreteMeasure.empirical(pts)
    report = dyadic_wq_bound(mu, uniform_reference(2), 1.0, depth=1)
    assert report.levels[0].discrepancy == pytest.approx(0.0, abs=1e-12)
    assert report.total == pytest.approx(report.truncation)


def test_bound_dominates_exact_w1_in_1d():
    ref = uniform_reference(1)
    for r in range(8):
        rng = SeedSpec(41).stream(r, "dom")
        mu = sample_iid(IidModel("uniform_cube", 1), 200, rng)
        exact = w1_exact_1d(mu, ref).value
        total = dyadic_wq_bound(mu, ref, 1.0).total
        assert total >= exact


def test_bound_dominates_certified_bracket_2d():
    ref = uniform_reference(2)
    for r in range(3):
        rng = SeedSpec(43).stream(r, "dom2")
        mu = sample_iid(IidModel("uniform_cube", 2), 128, rng)
        lo, _ = w1_reference_bracket(mu, ref, 2, 5)
        total = dyadic_wq_bound(mu, ref, 1.0).total
        assert total >= lo


def test_deeper_levels_shrink_truncation_monotonically():
    rng = SeedSpec(47).stream(0, "mono")
    mu = sample_iid(IidModel("uniform_cube", 1), 64, rng)
    ref = uniform_reference(1)
    truncs = [dyadic_wq_bound(mu, ref, 1.0, depth=j).truncation for j in range(1, 9)]
    assert all(a > b for a, b in zip(truncs, truncs[1:]))


def test_level_discrepancy_sparse_accounting():
    # two atoms in one depth-2 cell of [0,1]: occupied cell mass 1 vs 1/4,
    # plus 3/4 reference mass in untouched cells
    mu = DiscreteMeasure([[0.1], [0.2]], weights=[0.5, 0.5])
    disc, occupied = level_discrepancy(mu, uniform_reference(1), 2)
    assert occupied == 1
    assert disc == pytest.approx((1.0 - 0.25) + 0.75)


def test_restrict_to_support_validates():
    ref = cantor_reference()
    on = DiscreteMeasure([[0.0, 0.0], [0.75, 0.75]], weights=[0.5, 0.5])
    loose = dyadic_wq_bound(on, ref, 0.5, depth=3, base=4, restrict_to_support=False)
    strict = dyadic_wq_bound(on, ref, 0.5, depth=3, base=4, restrict_to_support=True)
    assert strict.total == pytest.approx(loose.total)
    off = DiscreteMeasure([[0.5, 0.5]])
    with pytest.raises(ValueError):
        dyadic_wq_bound(off, ref, 0.5, depth=2, base=4, restrict_to_support=True)


def test_bound_input_validation():
    mu = DiscreteMeasure([[0.5, 0.5]])
    ref = uniform_reference(2)
    with pytest.raises(ValueError):
        dyadic_wq_bound(mu, ref, 0.0)
    with pytest.raises(ValueError):
        dyadic_wq_bound(mu, ref, 1.0, base=1)
    with pytest.raises(ValueError):
        dyadic_wq_bound(mu, uniform_reference(1), 1.0)


def test_random_holder_functions_evaluate():
    rng = SeedSpec(53).stream(0, "hf")
    xs = rng.random((64, 2))
    for kind in ("cones", "min_cones"):
        f = random_holder_function(0.5, 2, rng, kind=kind)
        vals = f(xs)
        assert vals.shape == (64,)
        assert np.isfinite(vals).all()
    g = random_holder_function(1.0, 2, rng, kind="sinusoid")
    assert g(xs).shape == (64,)
    with pytest.raises(ValueError):
        random_holder_function(0.5, 2, rng, kind="sinusoid")
    with pytest.raises(ValueError):
        random_holder_function(1.0, 2, rng, kind="steps")


def test_decomposition_of_sup_cone():
    f = lambda x: np.abs(x[:, 0] - 0.5)  # noqa: E731
    deco = holder_decompose(f, 1.0, 4, 1)
    assert deco.c0 == pytest.approx(0.0)
    assert deco.violations == ()
    assert deco.sampled_remainder <= deco.remainder_bound + 1e-12
    # the decomposition reproduces f exactly at depth-4 cell centers
    centers = (2 * np.arange(16) + 1).reshape(-1, 1) / 32.0
    assert np.allclose(deco.evaluate(centers), f(centers), atol=1e-12)
    # and within the remainder budget off the grid
    rng = SeedSpec(59).stream(0, "offgrid")
    xs = rng.random((200, 1))
    gap = np.abs(deco.evaluate(xs) - f(xs)).max()
    assert gap <= deco.remainder_bound + 1e-12


def test_decomposition_coefficient_budget_random_family():
    count = 0
    for r in range(10):
        rng = SeedSpec(61).stream(r, "budget")
        q = 0.5 if r % 2 else 1.0
        f = random_holder_function(q, 1, rng, kind="cones")
        deco = holder_decompose(f, q, 5, 1)
        count += len(deco.violations)
        for level, bound in zip(deco.alphas, deco.alpha_bounds):
            if len(level):
                assert np.abs(level).max() <= bound + 1e-9
    assert count == 0


def test_decomposition_flags_non_holder_function():
    # a jump violates every q-budget at fine scales
    f = lambda x: (x[:, 0] >= 0.5 + 1.0 / 64.0).astype(float)  # noqa: E731
    deco = holder_decompose(f, 1.0, 6, 1)
    assert len(deco.violations) > 0
