import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qhl.laurent import (LaurentError, LaurentPoly, NotDivisibleError, divide_exact,
                         elementary_symmetric, substitute_theta, torus_grid)

z1 = LaurentPoly.variable(2, 0)
z2 = LaurentPoly.variable(2, 1)


def mono(*alpha, c=1.0):
    return LaurentPoly.monomial(alpha, c)


exps = st.tuples(st.integers(-3, 3), st.integers(-3, 3))
coef = st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False)
polys = st.dictionaries(exps, coef, max_size=6).map(lambda d: LaurentPoly(2, d))


def test_add_cancels_to_zero():
    assert (z1 + (-z1)).is_zero()


def test_difference_of_squares():
    assert ((z1 + z2) * (z1 - z2)).allclose(z1 ** 2 - z2 ** 2)


def test_exponent_cancellation():
    assert (mono(1, -1) * mono(-1, 1)).allclose(LaurentPoly.constant(2))


def test_pruning():
    f = LaurentPoly(2, {(0, 0): 1e-15, (1, 0): 1.0})
    assert f.support() == [(1, 0)]


def test_dimension_mismatch():
    with pytest.raises(LaurentError):
        z1 + LaurentPoly.variable(3, 0)


def test_conj_examples():
    assert mono(1, -3, c=2).conj().allclose(mono(-1, 3, c=2))
    assert mono(1, 0, c=1j).conj().allclose(mono(-1, 0, c=-1j))
    f = z1 + z1.conj() + 3
    assert f.conj().allclose(f)


def test_inner_examples():
    assert mono(1, 2).inner(mono(1, 2)) == 1
    assert mono(1, 2).inner(mono(2, 1)) == 0
    assert (z1 + z2).inner(z1 + z2) == 2
    sq = (z1 - z2) ** 2
    assert sq.inner(sq) == pytest.approx(6)


def test_eval_examples():
    assert LaurentPoly.constant(2, 5)([0.3, 0.1]) == 5
    assert (z1 * z2)([2, 3]) == 6
    with pytest.raises(ZeroDivisionError):
        mono(-1, 0)([0, 1])


def test_evaluate_grid_matches_pointwise(rng):
    f = z1 ** 2 * z2.conj() + 3j * z2 - 0.5
    grid = torus_grid(8, 2, offset=0.25)
    vals = f.evaluate_grid(grid)
    for k in (0, 7, 33):
        assert vals[k] == pytest.approx(f(grid[k]), abs=1e-13)


def test_torus_grid_shape():
    g = torus_grid(4, 3)
    assert g.shape == (64, 3)
    assert np.allclose(np.abs(g), 1)


def test_divide_exact_examples():
    assert divide_exact(z1 ** 2 - z2 ** 2, z1 - z2).allclose(z1 + z2)
    f = z1 * 3 + z2 ** 2
    assert divide_exact(f, LaurentPoly.constant(2)).allclose(f)
    assert divide_exact(z1 ** 2 * z2 - z1 * z2 ** 2, z1 - z2).allclose(z1 * z2)


def test_divide_exact_not_divisible():
    with pytest.raises(NotDivisibleError):
        divide_exact(z1 ** 2 + z2, z1 - z2)


def test_homogeneous_component():
    f = 1 + z1 + z1 * z2
    assert f.homogeneous_component(2).allclose(z1 * z2)
    assert f.homogeneous_component(7).is_zero()
    with pytest.raises(LaurentError):
        z1.conj().homogeneous_component(0)


def test_substitute_theta_examples(s2):
    p1 = LaurentPoly.variable(4, 0)
    pbar2 = LaurentPoly.variable(4, 3)
    assert substitute_theta(p1, s2).allclose(z1 + z2)
    assert substitute_theta(pbar2, s2).allclose(mono(-1, -1))
    got = substitute_theta(p1 * pbar2, s2)
    assert got.allclose(mono(0, -1) + mono(-1, 0))
    assert s2.invariance_residual(got) == 0


def test_substitute_theta_rejects_malformed(s2):
    with pytest.raises(LaurentError):
        substitute_theta(z1, s2)
    with pytest.raises(LaurentError):
        substitute_theta(LaurentPoly.monomial((-1, 0, 0, 0)), s2)


def test_elementary_symmetric():
    assert elementary_symmetric(2, 1).allclose(z1 + z2)
    assert elementary_symmetric(2, 2, power=2).allclose(z1 ** 2 * z2 ** 2)


def test_json_round_trip():
    f = z1 * (2 - 1j) + z2.conj() * 0.5
    data = json.loads(f.to_json())
    assert set(data) == {"dims", "terms"}
    assert set(data["terms"][0]) == {"alpha", "re", "im"}
    assert LaurentPoly.from_json(f.to_json()).allclose(f)


def test_dilate():
    f = 1 + z1 * z2 + z2
    assert f.dilate(0.5).allclose(1 + 0.25 * z1 * z2 + 0.5 * z2)


@settings(max_examples=100, deadline=None)
@given(polys, polys, polys)
def test_ring_axioms(f, g, h):
    assert ((f * g) * h).distance(f * (g * h)) <= 1e-12 * (1 + ((f * g) * h).max_abs_coeff())
    assert (f * (g + h)).distance(f * g + f * h) <= 1e-12 * (1 + (f * (g + h)).max_abs_coeff())


@settings(max_examples=50, deadline=None)
@given(polys)
def test_inner_positive_and_conj_involution(f):
    n = f.inner(f)
    assert n.real >= 0 and abs(n.imag) == 0
    assert (n.real == 0) == f.is_zero()
    assert f.conj().conj().allclose(f)


@settings(max_examples=50, deadline=None)
@given(polys, st.floats(0, 2 * np.pi), st.floats(0, 2 * np.pi))
def test_conj_is_pointwise_conjugate(f, a, b):
    zeta = np.exp(1j * np.array([a, b]))
    assert abs(f.conj()(zeta) - np.conj(f(zeta))) <= 1e-12 * (1 + sum(abs(c) for _, c in f.items()))


@settings(max_examples=50, deadline=None)
@given(polys)
def test_homogeneous_reassembly(f):
    f = f.shift([3, 3])  # make it a polynomial
    parts = LaurentPoly.zero(2)
    for k in f.degrees():
        parts = parts + f.homogeneous_component(k)
    assert parts.allclose(f)


@settings(max_examples=50, deadline=None)
@given(polys.filter(lambda p: not p.is_zero()),
       st.sampled_from([z1 - z2, z1 * z2 + 1, z1 ** 2 - 2 * z2, z1 + 3]))
def test_divide_exact_recovers_quotient(q, g):
    q = q.shift([3, 3])
    assert divide_exact(q * g, g).distance(q) <= 1e-9 * (1 + q.max_abs_coeff())
