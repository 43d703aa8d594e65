import math

import numpy as np
import pytest

from empdist.concentration import (
    azuma_rhs,
    empirical_tail_check,
    tail_bound_iid,
    tail_bound_markov,
)


def test_azuma_anchor():
    # four unit increments at t=2: exp(-2*4/4)
    assert azuma_rhs([1.0, 1.0, 1.0, 1.0], 2.0) == pytest.approx(math.exp(-2.0), rel=1e-12)
    assert azuma_rhs([0.5], 0.0) == 1.0


def test_azuma_validation():
    with pytest.raises(ValueError):
        azuma_rhs([], 1.0)
    with pytest.raises(ValueError):
        azuma_rhs([1.0, -0.5], 1.0)
    with pytest.raises(ValueError):
        azuma_rhs([1.0], -0.1)


def test_iid_bound_anchor():
    assert tail_bound_iid(0.05, 1000, 2) == pytest.approx(math.exp(-2.5), rel=1e-12)


def test_markov_bound_anchor():
    assert tail_bound_markov(0.1, 10000, 0.5, 1.0, 0.5) == pytest.approx(math.exp(-50.0), rel=1e-12)
    # default acceptance setting: t chosen so the bound is 0.05
    t = math.sqrt(2.0 * math.log(20.0) / 10000.0)
    assert tail_bound_markov(t, 10000, 0.5, 1.0, 0.5) == pytest.approx(0.05, rel=1e-12)


def test_bounds_monotone():
    ts = np.linspace(0.01, 0.2, 10)
    iid = [tail_bound_iid(t, 500, 2) for t in ts]
    mkv = [tail_bound_markov(t, 500, 0.5, 1.0, 0.5) for t in ts]
    assert all(a > b for a, b in zip(iid, iid[1:]))
    assert all(a > b for a, b in zip(mkv, mkv[1:]))
    assert tail_bound_iid(0.05, 2000, 2) < tail_bound_iid(0.05, 1000, 2)


def test_bound_parameter_validation():
    with pytest.raises(ValueError):
        tail_bound_iid(-0.1, 100, 1)
    with pytest.raises(ValueError):
        tail_bound_markov(0.1, 100, 1.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        tail_bound_markov(0.1, 100, 0.5, 0.5, 0.5)  # D < 1
    with pytest.raises(ValueError):
        tail_bound_markov(0.1, 100, 0.5, 1.0, 0.0)


def test_tail_check_counts_exceedances():
    samples = [0.0] * 95 + [1.0] * 5
    res = empirical_tail_check(samples, 0.5, 0.1)
    assert res.empirical_mean == pytest.approx(0.05)
    assert res.exceed_count == 5
    assert res.empirical_frequency == pytest.approx(0.05)
    # binomial 95th percentile at R=100, p=0.1 is 15 successes
    assert res.binomial_slack == pytest.approx(0.05)
    assert res.passed


def test_tail_check_fails_when_bound_too_small():
    samples = [0.0] * 95 + [1.0] * 5
    res = empirical_tail_check(samples, 0.5, 0.01)
    assert not res.passed


def test_tail_check_validation():
    ok = [0.0] * 100
    with pytest.raises(ValueError):
        empirical_tail_check([0.0] * 99, 0.1, 0.5)
    with pytest.raises(ValueError):
        empirical_tail_check(ok, -0.1, 0.5)
    with pytest.raises(ValueError):
        empirical_tail_check(ok, 0.1, 1.5)
