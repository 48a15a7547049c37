import json

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from varpick.bipoly import ONE, W, Z, BivariatePolynomial, MatrixPolynomial
from varpick.errors import DegenerateFiber, SchemaError


def naive_eval(coeffs, z, w):
    return sum(coeffs[i, j] * z ** i * w ** j for i in range(coeffs.shape[0]) for j in range(coeffs.shape[1]))


def test_eval_matches_direct_sum(rng):
    c = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
    p = BivariatePolynomial(c)
    z, w = 0.3 - 0.2j, -0.5 + 0.1j
    assert abs(p(z, w) - naive_eval(c, z, w)) < 1e-14


def test_vectorised_eval(rng):
    c = rng.standard_normal((3, 3))
    p = BivariatePolynomial(c)
    z = rng.standard_normal(7) + 0j
    w = rng.standard_normal(7) + 0j
    got = p(z, w)
    assert got.shape == (7,)
    assert np.allclose(got, [naive_eval(c, a, b) for a, b in zip(z, w)], atol=1e-13)


def test_neil_bidegree_and_constants():
    p = Z ** 3 - W ** 2
    assert p.bidegree == (3, 2)
    assert p(0.25, 0.125) == 0
    assert ONE.bidegree == (0, 0)


def test_trim_drops_trailing_zero_rows():
    p = BivariatePolynomial(np.array([[1, 0, 0], [2, 0, 0], [0, 0, 0]]))
    assert p.bidegree == (1, 0)


def test_reflect_of_neil():
    # z^3 w^2 conj(p(1/conj z, 1/conj w)) = w^2 - z^3
    p = Z ** 3 - W ** 2
    assert p.reflect() == W ** 2 - Z ** 3
    assert p.symmetry_defect() is not None


def test_derivatives():
    p = Z ** 3 * W - W ** 2 + Z
    assert p.d_dw() == Z ** 3 - W.scale(2)
    assert p.d_dz() == (Z ** 2 * W).scale(3) + ONE


def test_companion_roots_match_numpy(rng):
    c = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
    p = BivariatePolynomial(c)
    z = 0.4 + 0.2j
    roots = np.sort_complex(np.linalg.eigvals(p.w_companion(z)))
    coeffs_w = [naive_eval(c[:, [j]], z, 1) for j in range(4)]
    ref = np.sort_complex(np.roots(coeffs_w[::-1]))
    assert np.allclose(roots, ref, atol=1e-10)


def test_companion_degenerate():
    p = Z * W ** 2 - ONE
    with pytest.raises(DegenerateFiber):
        p.w_companion(0.0)


def test_json_round_trip(rng):
    p = BivariatePolynomial(rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2)))
    q = BivariatePolynomial.from_json(json.loads(json.dumps(p.to_json())))
    assert q.allclose(p, atol=0)


def test_json_ragged_row_rejected():
    bad = {"zdeg": 1, "wdeg": 1, "coeffs": [[[1, 0], [0, 0]], [[1, 0]]]}
    with pytest.raises(SchemaError) as exc:
        BivariatePolynomial.from_json(bad)
    assert exc.value.path == "/coeffs/1"


def test_json_non_tight_degree_rejected():
    bad = {"zdeg": 1, "wdeg": 0, "coeffs": [[[1, 0]], [[0, 0]]]}
    with pytest.raises(SchemaError):
        BivariatePolynomial.from_json(bad)


def test_matrix_polynomial_eval_and_product(rng):
    A = MatrixPolynomial.from_entries([[ONE, W], [Z, Z * W]])
    B = MatrixPolynomial.from_entries([[Z], [ONE]])
    z, w = 0.2 + 0.1j, -0.3j
    got = A.matmul(B)(z, w)
    assert np.allclose(got, A(z, w) @ B(z, w))
    assert A(np.array([z, z]), np.array([w, w])).shape == (2, 2, 2)


def test_matrix_polynomial_json_round_trip():
    A = MatrixPolynomial.from_entries([[ONE, W, Z * Z]])
    B = MatrixPolynomial.from_json(A.to_json())
    assert B.allclose(A)


coef = st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False)
grid = st.lists(st.lists(coef, min_size=3, max_size=3), min_size=2, max_size=2)


@settings(max_examples=40, deadline=None)
@given(grid, grid, coef, coef)
def test_product_evaluates_to_product(a, b, z, w):
    p, q = BivariatePolynomial(np.array(a)), BivariatePolynomial(np.array(b))
    lhs = (p * q)(z, w)
    rhs = p(z, w) * q(z, w)
    scale = 1 + p.magnitude(z, w) * q.magnitude(z, w)
    assert abs(lhs - rhs) <= 1e-12 * scale


@settings(max_examples=40, deadline=None)
@given(grid)
def test_reflect_is_involution(a):
    c = np.array(a)
    # reflection reverses within the bidegree box, so the box must be tight at the origin side
    assume(np.abs(c[0]).max() > 1e-6 and np.abs(c[:, 0]).max() > 1e-6)
    assume(np.abs(c[-1]).max() > 1e-6 and np.abs(c[:, -1]).max() > 1e-6)
    p = BivariatePolynomial(c)
    assert p.reflect().reflect().allclose(p, atol=1e-14)
