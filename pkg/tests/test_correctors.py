import numpy as np
import pytest

from varpick.correctors import (
    build_inner_corrector,
    composed_corrector,
    corrector_vanishing_check,
    derivatives,
    disk_deviation,
    eval_gn,
    h_norm,
)
from varpick.errors import ZeroOnBoundary

NS = (10, 100, 1000)


def test_gn_vanishes_at_one():
    for n in NS:
        assert abs(eval_gn(n, 1.0)) <= 1e-12


def test_gn_bounded_on_grid():
    t = np.exp(2j * np.pi * np.arange(4096) / 4096)
    for n in NS:
        assert np.abs(eval_gn(n, t)).max() <= 1 + 1e-15


def test_h_norm_bound():
    # the o(1) excess of ||h_n|| over 1 is in fact negative on the grid: ||h_n|| < 1
    for n in NS:
        assert h_norm(n) <= 1 + 10 / n
        assert h_norm(n) <= 1


def test_gn_convergence():
    assert abs(eval_gn(100, 0) - 1) <= 0.1
    assert abs(eval_gn(1000, 0.5) - 1) < abs(eval_gn(10, 0.5) - 1)
    devs = [disk_deviation(n, 0.9) for n in NS]
    assert devs[0] > devs[1] > devs[2]


def test_blaschke_examples():
    b = build_inner_corrector([0], 1, 1)
    z = np.array([0.3, -0.2 + 0.5j])
    assert np.allclose(b(z), z)
    b = build_inner_corrector([0.5], 2, 1)
    assert abs(b.rotation - 1) < 1e-15
    assert b.modulus_defect() <= 1e-12
    with pytest.raises(ZeroOnBoundary):
        build_inner_corrector([1.0], 1, 1)
    with pytest.raises(ValueError):
        build_inner_corrector([0.1], 1, [1, -1])


def test_blaschke_random(rng):
    for _ in range(5):
        k = rng.integers(1, 4)
        zeros = 0.95 * np.sqrt(rng.random(k)) * np.exp(2j * np.pi * rng.random(k))
        beta = np.exp(2j * np.pi * rng.random())
        b = build_inner_corrector(zeros, int(rng.integers(1, 4)), beta)
        assert b.modulus_defect(4096) <= 1e-10
        assert abs(b(beta) - 1) <= 1e-10
        for a in zeros:
            d = derivatives(b, a, b.order - 1, radius=min(1e-2, (1 - abs(a)) / 2))
            assert np.abs(d).max() <= 1e-8


def fd_derivative(f, z, h=1e-5):
    return (f(z + h) - f(z - h)) / (2 * h)


def test_contour_derivative_against_finite_difference():
    b = build_inner_corrector([0.3 + 0.1j, -0.4], 2, 1j)
    for z in (0.1, -0.2 + 0.3j):
        d = derivatives(b, z, 1)
        assert abs(d[1] - fd_derivative(b, z)) < 1e-8


def test_composed_vanishing():
    beta = np.exp(0.7j)
    b = build_inner_corrector([0.2 - 0.3j], 3, beta)
    G = composed_corrector(10, b, 2)
    assert abs(G(beta)) < 1e-12
    # backward difference oracle for G'(beta) with a step well inside the feature scale 1/n^2
    h = 1e-6
    assert abs((G(beta) - G(beta * (1 - h))) / (h * beta)) < 1e-6
    rep = corrector_vanishing_check(G, [beta], [0.2 - 0.3j], order=2)
    assert rep.passed
    # b has order-3 zeros, so G is flat to order 3 at them but not to order 4
    assert corrector_vanishing_check(composed_corrector(10, b, 3), [beta], [0.2 - 0.3j], order=3).passed
    assert not corrector_vanishing_check(composed_corrector(10, b, 4), [], [0.2 - 0.3j], order=4).passed


def test_vacuous_check():
    rep = corrector_vanishing_check(lambda z: 1.0)
    assert rep.passed and rep.boundary == [] and rep.interior == []
