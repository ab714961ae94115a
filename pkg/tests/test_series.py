import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from harmqc import Annulus, Disk, LaurentSeries, eval_jet, series_contains
from harmqc.errors import OutOfValidity, SeriesDivergence
from harmqc.series import falling_factorial


def sympy_jet(coeffs, z0):
    z = sp.symbols("z")
    expr = sum(sp.nsimplify(a) * z ** k for k, a in coeffs.items())
    return [complex(sp.N(sp.diff(expr, z, m).subs(z, z0), 30)) for m in range(4)]


def test_identity_jet():
    assert eval_jet(LaurentSeries.from_dict({1: 1}), 2) == (2, 1, 0, 0)


def test_square_jet():
    assert eval_jet(LaurentSeries.from_dict({2: 1}), 1 + 1j) == (2j, 2 + 2j, 2, 0)


def test_reciprocal_jet_matches_cas():
    s = LaurentSeries.from_dict({-1: 1}, r_inner=1e-9)
    expected = sympy_jet({-1: 1}, sp.I)
    assert expected == [-1j, 1, 2j, -6]
    np.testing.assert_allclose(eval_jet(s, 1j), expected, rtol=0, atol=1e-15)


def test_mixed_laurent_matches_cas():
    coeffs = {-3: 0.25, -1: -2, 0: 1, 2: 0.5, 5: -0.125}
    s = LaurentSeries.from_dict(coeffs, r_inner=0.1)
    z0 = sp.Rational(3, 4) + sp.Rational(1, 2) * sp.I
    np.testing.assert_allclose(eval_jet(s, complex(z0)), sympy_jet(coeffs, z0), rtol=1e-13)


@pytest.mark.parametrize("k", range(-5, 9))
def test_monomial_falling_factorials(k):
    s = LaurentSeries.from_dict({k: 1}, r_inner=0.01 if k < 0 else 0.0)
    z = 0.7 - 0.4j
    jet = eval_jet(s, z)
    for m in range(4):
        ff = math.prod(k - j for j in range(m))
        expected = ff * z ** (k - m) if ff else 0
        assert jet[m] == pytest.approx(expected, rel=1e-14, abs=1e-14)
    assert falling_factorial(k, 3) == k * (k - 1) * (k - 2)


def test_out_of_validity():
    s = LaurentSeries.from_dict({-1: 1}, r_inner=1.0, r_outer=3.0)
    with pytest.raises(OutOfValidity):
        eval_jet(s, 0.5)
    with pytest.raises(OutOfValidity):
        eval_jet(s, 3.0)
    with pytest.raises(OutOfValidity):
        eval_jet(LaurentSeries.from_dict({1: 1}, 0, 0.5), 0.5)


def test_taylor_series_evaluates_at_center():
    assert eval_jet(LaurentSeries.from_dict({0: 1, 1: 2}), 0) == (1, 2, 0, 0)


def test_negative_exponent_needs_inner_radius():
    with pytest.raises(ValueError):
        LaurentSeries.from_dict({-1: 1})


def test_contains():
    assert series_contains(LaurentSeries.from_dict({1: 1}), Disk())
    assert series_contains(LaurentSeries.from_dict({-1: 1}, 1e-300), Annulus(2))
    assert not series_contains(LaurentSeries.from_dict({1: 1}, 0, 0.5), Disk())
    # validity exactly the annulus: sampling stays a margin inside
    assert series_contains(LaurentSeries.from_dict({-1: 1}, 1.0, 2.0), Annulus(2))


def test_boundary_tail_test():
    slow = LaurentSeries.from_dict({k: 1.0 for k in range(12)}, 0.0, 1.0)
    with pytest.raises(SeriesDivergence):
        slow(np.exp(1j * np.linspace(0, 1, 5)), boundary=True)
    fast = LaurentSeries.from_dict({k: 10.0 ** -k for k in range(12)}, 0.0, 1.0)
    fast(np.exp(1j * np.linspace(0, 1, 5)), boundary=True)


def test_triples_merge_and_order():
    s = LaurentSeries.from_triples([(2, 1, 0), (-1, 0, 1), (2, 0.5, 0), (0, 3, 0)], r_inner=0.5)
    assert s.coeffs == {2: 1.5, -1: 1j, 0: 3}
    assert [k for k, _ in s.terms] == [0, -1, 2]


def test_compensated_sum_handles_cancellation():
    # 1e16 z^0 + 1 z^1 - 1e16 z^0 stored as two series added: exact sum is z
    a = LaurentSeries.from_dict({0: 1e16, 1: 1, 2: 1e-3})
    b = LaurentSeries.from_dict({0: -1e16})
    assert (a + b)(0.5) == pytest.approx(0.50025, rel=1e-15)


coef = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)
points = st.tuples(st.floats(0.5, 1.5), st.floats(0, 2 * math.pi)).map(lambda p: p[0] * complex(math.cos(p[1]), math.sin(p[1])))


@settings(max_examples=60, deadline=None)
@given(st.dictionaries(st.integers(-4, 6), coef, min_size=1, max_size=6),
       st.dictionaries(st.integers(-4, 6), coef, min_size=1, max_size=6), coef, coef, points)
def test_linearity(cs, ct, a, b, z):
    s = LaurentSeries.from_dict(cs, r_inner=0.1)
    t = LaurentSeries.from_dict(ct, r_inner=0.1)
    lhs = eval_jet(a * s + b * t, z)
    js, jt = eval_jet(s, z), eval_jet(t, z)
    scale = 1 + sum(abs(x) for x in js + jt) * (1 + abs(a) + abs(b))
    for m in range(4):
        assert abs(lhs[m] - (a * js[m] + b * jt[m])) <= 1e-12 * scale


@settings(max_examples=40, deadline=None)
@given(st.dictionaries(st.integers(-3, 5), st.complex_numbers(max_magnitude=2, allow_nan=False), min_size=1, max_size=5),
       points)
def test_derivative_consistency(cs, z):
    s = LaurentSeries.from_dict(cs, r_inner=0.1)
    jet = eval_jet(s, z)
    for m in range(3):
        def d(x, m=m):
            return eval_jet(s, x)[m]
        errs = []
        for h in (1e-3, 5e-4):
            fd = (d(z + h) - d(z - h)) / (2 * h)
            errs.append(abs(fd - jet[m + 1]))
        scale = 1 + sum(abs(x) for x in jet)
        # second-order central difference: error shrinks roughly 4x when h halves
        assert errs[1] <= 1e-5 * scale * 10
        assert errs[1] <= errs[0] / 3 + 1e-9 * scale
