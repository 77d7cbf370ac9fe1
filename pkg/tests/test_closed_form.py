import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qutrit_invariants import closed_form as cf
from qutrit_invariants.states import maxdelta_coeffs

coef = st.floats(-1, 1, allow_nan=False, allow_infinity=False)
unit_triple = st.tuples(coef, coef, coef).filter(lambda t: sum(x * x for x in t) > 1e-6).map(
    lambda t: tuple(np.array(t) / np.linalg.norm(t))
)


def test_constants():
    assert cf.M_DELTA == pytest.approx(6.907058648672581e-13, rel=1e-15)
    assert cf.ZETA6 == pytest.approx(32 / 9261)
    assert cf.ZETA9_ADJOINT / cf.ZETA9 == pytest.approx(3**2 * 5**7 / 7**5)


def test_aharonov_point_values():
    h = 1 / math.sqrt(2)
    inv = cf.invariants_ss(h, -h, 0)
    np.testing.assert_allclose(
        [abs(inv.I6), abs(inv.I9), abs(inv.I12)], [1 / 18, cf.M_I9, 1 / 7776], rtol=1e-13
    )
    assert abs(inv.Delta333) <= 1e-28


def test_ghz_point():
    assert cf.i6_ss(1.0, 0.0, 0.0) == pytest.approx(1 / 27)
    assert cf.i9_ss(1.0, 0.0, 0.0) == 0.0
    assert cf.i12_ss(1.0, 0.0, 0.0) == 0.0


@pytest.mark.parametrize("index", range(1, 13))
def test_maxdelta_values(index):
    assert abs(cf.delta_ss(*maxdelta_coeffs(index))) == pytest.approx(cf.M_DELTA, rel=1e-12)


def test_delta_vanishes_on_coordinate_planes():
    t = np.linspace(-1, 1, 11)
    np.testing.assert_array_equal(cf.delta_ss(t, 1 - t, 0.0 * t), 0.0)


def test_broadcasting_and_grad_shape():
    a = np.linspace(0.1, 0.5, 5)
    assert cf.i12_ss(a, a, a).shape == (5,)
    assert cf.grad_delta_ss(a, 0.3, 0.2).shape == (3, 5)


@given(unit_triple)
@settings(max_examples=100, deadline=None)
def test_i9_antisymmetric(p):
    a, b, c = p
    for q in [(b, a, c), (c, b, a), (a, c, b)]:
        assert abs(cf.i9_ss(*q) + cf.i9_ss(a, b, c)) <= 1e-14


@given(unit_triple)
@settings(max_examples=100, deadline=None)
def test_even_invariants_permutation_symmetric(p):
    for f in (cf.i6_ss, cf.i12_ss, cf.delta_ss):
        ref = f(*p)
        for q in itertools.permutations(p):
            assert abs(f(*q) - ref) <= 1e-12


@given(unit_triple, st.floats(0.2, 2.0))
@settings(max_examples=100, deadline=None)
def test_homogeneity(p, lam):
    x = np.array(p)
    cases = ((cf.i6_ss, 6, cf.M_I6), (cf.i9_ss, 9, cf.M_I9), (cf.i12_ss, 12, cf.M_I12), (cf.delta_ss, 36, cf.M_DELTA))
    for f, d, m in cases:
        # near a zero of f only rounding noise (~1e-14 m) is left to compare
        np.testing.assert_allclose(f(*(lam * x)), lam**d * f(*x), rtol=1e-8, atol=1e-13 * m * lam**d)


@given(unit_triple)
@settings(max_examples=100, deadline=None)
def test_bounded_by_maxima(p):
    assert abs(cf.i6_ss(*p)) <= cf.M_I6 * (1 + 1e-12)
    assert abs(cf.i9_ss(*p)) <= cf.M_I9 * (1 + 1e-12)
    assert abs(cf.i12_ss(*p)) <= cf.M_I12 * (1 + 1e-12)
    assert abs(cf.delta_ss(*p)) <= cf.M_DELTA * (1 + 1e-12)


@given(unit_triple)
@settings(max_examples=30, deadline=None)
def test_exact_combination_matches_factored_form(p):
    d = cf.delta_ss(*p)
    np.testing.assert_allclose(cf.combination_ss_exact(*p), d, rtol=1e-12, atol=1e-300)


def test_float_combination_agrees_at_scale():
    rng = np.random.default_rng(3)
    x = rng.uniform(-1, 1, (500, 3))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    a, b, c = x.T
    # cancellation makes the float combination accurate only relative to M_DELTA
    err = np.abs(cf.combination_ss(a, b, c) - cf.delta_ss(a, b, c)) / cf.M_DELTA
    assert err.max() <= 1e-12


@pytest.mark.parametrize(
    "f, g", [(cf.i6_ss, cf.grad_i6_ss), (cf.i9_ss, cf.grad_i9_ss), (cf.i12_ss, cf.grad_i12_ss), (cf.delta_ss, cf.grad_delta_ss)]
)
def test_gradients_match_central_differences(f, g):
    p = np.array([0.31, -0.52, 0.79])
    h = 1e-5
    fd = [(f(*(p + h * e)) - f(*(p - h * e))) / (2 * h) for e in np.eye(3)]
    np.testing.assert_allclose(g(*p), fd, rtol=1e-7, atol=1e-9 * np.abs(fd).max())


def test_grad_delta_at_zero_factor_is_finite():
    g = cf.grad_delta_ss(0.6, 0.8, 0.0)
    assert np.all(np.isfinite(g))


@pytest.mark.parametrize("a1, a2", [(0.5, math.sqrt(3) / 2), (-0.5, math.sqrt(3) / 2), (0.5, -math.sqrt(3) / 2)])
def test_f2prime_tabulated_values(a1, a2):
    inv = cf.invariants_f2prime(a1, a2)
    np.testing.assert_allclose(
        [abs(inv.I6), abs(inv.I9), abs(inv.I12)],
        [0.0103660511823777, 1.21376835394049e-6, 4.47729237981977e-6],
        rtol=1e-10,
    )
    assert inv.Delta333 == 0


def test_f2prime_reduced_matches_full():
    a1 = 0.3
    a2 = math.sqrt(1 - a1 * a1)
    inv = cf.invariants_f2prime(a1, a2)
    r6, _, r12 = cf.f2prime_reduced(a1)
    assert r6 == pytest.approx(inv.I6.real, rel=1e-12)
    assert r12 == pytest.approx(inv.I12.real, rel=1e-12)


def test_f2prime_requires_unit_circle():
    with pytest.raises(ValueError):
        cf.invariants_f2prime(0.5, 0.5)


def test_f3prime():
    assert abs(cf.i6_f3prime(1)) == pytest.approx(2.43426763976147e-4, rel=1e-10)
    assert cf.i6_f3prime(1) == cf.i6_f3prime(-1)
    with pytest.raises(ValueError):
        cf.i6_f3prime(0)


def test_s_index():
    h = 1 / math.sqrt(2)
    assert cf.s_index(cf.invariants_ss(h, -h, 0)) == pytest.approx(3.0, rel=1e-13)
    assert cf.s_index({"I6": 1 / 18, "I9": 0, "I12": 0}) == pytest.approx(1.0)
