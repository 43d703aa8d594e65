import math

import numpy as np
import pytest

from empdist.fourier import (
    FourierBoundParams,
    choose_J_fourier,
    coefficient_variance_check,
    cs_dual_bound,
    holder_constant_ek,
)
from empdist.measures import DiscreteMeasure, uniform_reference
from empdist.samplers import SeedSpec, inverse_doubling_kernel


def torus_uniform(d=1):
    return uniform_reference(d, geometry="torus")


def test_params_validation_and_default_alpha():
    p = FourierBoundParams(1.0, 10)
    assert p.alpha == pytest.approx(1.0 / math.log(10))
    with pytest.raises(ValueError):
        FourierBoundParams(0.5, 10)
    with pytest.raises(ValueError):
        FourierBoundParams(1.0, 2)
    with pytest.raises(ValueError):
        FourierBoundParams(1.0, 10, alpha=1.5)
    with pytest.raises(ValueError):
        FourierBoundParams(1.0, 10, c_approx=0.0)


def test_choose_J_anchors():
    assert choose_J_fourier(1.0, 1, 131072, 0.5) == (1273, 65536.0)
    assert choose_J_fourier(1.0, 1, 512, 0.5) == (50, 256.0)
    # s = d/2 branch: floor(sqrt(256) * ln(256))
    assert choose_J_fourier(1.0, 2, 256, 0.0) == (88, 256.0)
    # s < d/2 branch: floor(ln(4096)^(5/3) * 4096^(1/3))
    assert choose_J_fourier(1.0, 3, 4096, 0.0) == (546, 4096.0)
    # very smooth classes would pick J < 3; clamped
    assert choose_J_fourier(8.0, 1, 32, 0.0)[0] == 3


def test_choose_J_guards():
    with pytest.raises(ValueError):
        choose_J_fourier(1.0, 1, 20, 0.5)  # nbar = 10
    with pytest.raises(ValueError):
        choose_J_fourier(1.0, 1, 100, 1.0)
    with pytest.raises(ValueError):
        choose_J_fourier(0.9, 1, 100, 0.0)


def test_holder_constant_anchors():
    assert holder_constant_ek((1,), 1.0) == pytest.approx(2.0 * math.pi, rel=1e-12)
    assert holder_constant_ek((4,), 0.5) == pytest.approx(7.0898154036220635, rel=1e-12)
    assert holder_constant_ek((0,), 1.0) == 0.0
    assert holder_constant_ek((1, -1), 1.0) == pytest.approx(2.0 * math.pi * math.sqrt(2.0), rel=1e-12)
    with pytest.raises(ValueError):
        holder_constant_ek((1,), 0.0)
    with pytest.raises(ValueError):
        holder_constant_ek((1, 2), 1.0, d=3)


def test_dual_bound_two_atom_oracle():
    # atoms at 0 and 1/2: the only surviving frequency below J=3 is k=2
    # with coefficient 1, so the stochastic term is sqrt(2/2^(2s))
    mu = DiscreteMeasure.empirical(np.array([[0.0], [0.5]]))
    report = cs_dual_bound(mu, torus_uniform(), FourierBoundParams(1.0, 3, alpha=0.5))
    assert report.stochastic_term == pytest.approx(math.sqrt(0.5), rel=1e-12)
    assert report.approximation_term == pytest.approx(math.log(3.0) / 3.0, rel=1e-12)
    assert report.total == pytest.approx(math.log(3.0) / 3.0 + math.sqrt(0.5), rel=1e-12)
    deeper = cs_dual_bound(mu, torus_uniform(), FourierBoundParams(2.0, 3, alpha=0.5))
    assert deeper.stochastic_term == pytest.approx(math.sqrt(2.0) / 4.0, rel=1e-12)


def test_dual_bound_vanishes_on_matching_grid():
    # 4 equally spaced atoms match the uniform coefficients up to |k| = 3
    mu = DiscreteMeasure.empirical(np.array([[0.0], [0.25], [0.5], [0.75]]))
    report = cs_dual_bound(mu, torus_uniform(), FourierBoundParams(1.0, 3))
    assert report.stochastic_term == pytest.approx(0.0, abs=1e-12)
    assert report.total == pytest.approx(report.approximation_term)


def test_dual_bound_2d_matches_brute_force():
    rng = SeedSpec(67).stream(0, "bf")
    mu = DiscreteMeasure.empirical(rng.random((6, 2)))
    ref = torus_uniform(2)
    s, J = 1.0, 2
    report = cs_dual_bound(mu, ref, FourierBoundParams(s, 3))
    # recompute at J=3 over the full lattice
    total = 0.0
    for k1 in range(-3, 4):
        for k2 in range(-3, 4):
            if max(abs(k1), abs(k2)) == 0:
                continue
            delta = mu.fourier_coefficient((k1, k2)) - ref.fourier_coefficient((k1, k2))
            total += abs(delta) ** 2 / max(abs(k1), abs(k2)) ** (2 * s)
    assert report.stochastic_term == pytest.approx(math.sqrt(total), rel=1e-10)


def test_dual_bound_requires_torus_fourier_reference():
    mu = DiscreteMeasure.empirical(np.array([[0.1], [0.9]]))
    with pytest.raises(ValueError):
        cs_dual_bound(mu, uniform_reference(1), FourierBoundParams(1.0, 3))
    with pytest.raises(ValueError):
        cs_dual_bound(mu, torus_uniform(2), FourierBoundParams(1.0, 3))


def test_coefficient_variance_check_shape():
    kernel = inverse_doubling_kernel(1)
    m2, rhs = coefficient_variance_check(kernel, (1,), 1.0, 64, 30, SeedSpec(71))
    assert rhs == pytest.approx(1.0 / (0.5 * 64), rel=1e-12)
    # for this kernel E|mean coefficient|^2 is exactly 1/n at stationarity
    assert 0.1 * rhs <= m2 <= 1.5 * rhs


def test_coefficient_variance_check_guards():
    kernel = inverse_doubling_kernel(1)
    with pytest.raises(ValueError):
        coefficient_variance_check(kernel, (1,), 1.0, 1, 10, SeedSpec(1))
    with pytest.raises(ValueError):
        coefficient_variance_check(kernel, (1,), 0.0, 64, 10, SeedSpec(1))
    with pytest.raises(ValueError):
        coefficient_variance_check(kernel, (1,), 1.0, 64, 0, SeedSpec(1))
