import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mrsphylo import interval as ia
from mrsphylo.errors import DivisorContainsZero, DomainError, OverflowBound
from mrsphylo.interval import Box, Interval, RigorPolicy, StdFn, diameter, hull, intersect, iv_std

import oracles

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


@st.composite
def intervals(draw, elements=finite):
    a, b = draw(elements), draw(elements)
    return Interval(min(a, b), max(a, b))


@st.composite
def interval_and_point(draw, elements=finite):
    X = draw(intervals(elements))
    u = draw(st.floats(0, 1))
    x = min(max(X.lo + (X.hi - X.lo) * u, X.lo), X.hi)
    return X, x


# -- endpoint formulas ---------------------------------------------------------


def test_add_examples():
    assert Interval(1, 2) + Interval(3, 4) == Interval(4, 6)
    X = Interval(-1.5, 2.25)
    assert Interval(0, 0) + X == X


def test_sub_dependency():
    assert Interval(1, 2) - Interval(1, 2) == Interval(-1, 1)
    X = Interval(0.1, 0.7)
    assert X - Interval(0, 0) == X


def test_mul_examples():
    assert Interval(-1, 2) * Interval(3, 4) == Interval(-4, 8)
    assert Interval(0, 0) * Interval(-3, 5) == Interval(0, 0)


def test_div_examples():
    assert Interval(1, 2) / Interval(2, 4) == Interval(0.25, 1)
    with pytest.raises(DivisorContainsZero):
        Interval(1, 2) / Interval(-1, 1)
    with pytest.raises(DivisorContainsZero):
        Interval(1, 2) / Interval(0, 1)


def test_exp_unit_interval_outward():
    E = iv_std(StdFn.EXP, Interval(0, 1))
    assert E.lo == 1.0
    assert E.hi > math.e and E.hi - math.e < 4e-14


def test_even_power_uses_mignitude():
    assert Interval(-2, 3) ** 2 == Interval(0, 9)
    assert Interval(-3, -2) ** 2 == Interval(4, 9)
    C = Interval(-2, 3) ** 3
    assert C.contains(-8) and C.contains(27)
    assert C.lo > -8 * (1 + 1e-14) and C.hi < 27 * (1 + 1e-14)


def test_sin_interior_maximum():
    S = iv_std(StdFn.SIN, Interval(0, math.pi))
    lo, hi = oracles.dense_range(np.sin, 0, math.pi)
    assert S.lo <= lo and S.hi >= hi
    assert S.lo == 0.0 and S.hi == 1.0


def test_cos_interior_minimum_and_wide():
    C = iv_std(StdFn.COS, Interval(3, 3.3))
    assert C.lo == -1.0
    assert iv_std(StdFn.SIN, Interval(-100, 100)) == Interval(-1, 1)


def test_tan_pole_and_log_domain():
    with pytest.raises(DomainError):
        iv_std(StdFn.TAN, Interval(1, 2))
    with pytest.raises(DomainError):
        iv_std(StdFn.LOG, Interval(0, 1))
    with pytest.raises(DomainError):
        iv_std(StdFn.SQRT, Interval(-1, 1))


def test_overflow_raises():
    with pytest.raises(OverflowBound):
        iv_std(StdFn.EXP, Interval(0, 1000))
    with pytest.raises(DomainError):
        Interval(2, 1)


def test_fast_policy_is_plain_float():
    X, Y = Interval(0.1, 0.2), Interval(0.3, 0.7)
    f = ia.iv_add(X, Y, RigorPolicy.FAST)
    o = ia.iv_add(X, Y, RigorPolicy.OUTWARD)
    assert f == Interval(0.1 + 0.3, 0.2 + 0.7)
    assert o.lo < f.lo and o.hi > f.hi


def test_outward_widening_is_one_ulp_for_exact_ops():
    # 0.1 + 0.2 is inexact; the enclosure is one ulp either side at most
    s = Interval.point(0.1) + Interval.point(0.2)
    assert math.nextafter(s.lo, math.inf) == s.hi


def test_diameter_and_hull():
    assert diameter(Interval(1, 3)) == 2
    assert diameter(Interval(5, 5)) == 0
    assert hull(Interval(0, 1), Interval(2, 3)) == Interval(0, 3)
    X = Interval(-1, 4)
    assert hull(X, X) == X
    assert intersect(Interval(0, 1), Interval(2, 3)) is None


@settings(max_examples=300, deadline=None)
@given(intervals(), intervals())
def test_hull_property(X, Y):
    H = hull(X, Y)
    assert X.subset_of(H) and Y.subset_of(H)
    assert diameter(H) >= max(diameter(X), diameter(Y))


@settings(max_examples=300, deadline=None)
@given(interval_and_point(), interval_and_point())
def test_containment_arithmetic(xp, yp):
    (X, x), (Y, y) = xp, yp
    for op, fn in (("add", ia.iv_add), ("sub", ia.iv_sub), ("mul", ia.iv_mul)):
        Z = fn(X, Y)
        assert oracles.contains(oracles.exact_value(op, x, y), Z.lo, Z.hi)
    if not Y.contains(0.0):
        try:
            Z = ia.iv_div(X, Y)
        except OverflowBound:
            return  # quotient bound beyond the float range
        assert oracles.contains(oracles.exact_value("div", x, y), Z.lo, Z.hi)


@settings(max_examples=300, deadline=None)
@given(interval_and_point(st.floats(-50, 50)), st.sampled_from([StdFn.EXP, StdFn.SIN, StdFn.COS, StdFn.ATAN]))
def test_containment_transcendental(xp, fn):
    X, x = xp
    Z = iv_std(fn, X)
    assert oracles.contains(oracles.exact_value(fn.name.lower(), x), Z.lo, Z.hi)


@settings(max_examples=200, deadline=None)
@given(intervals(), intervals(), st.floats(0, 1), st.floats(0, 1))
def test_inclusion_isotony(X, Y, s, t):
    # shrink X, Y to sub-intervals and check results nest
    def sub(I, a):
        m = I.lo + (I.hi - I.lo) * a
        m = min(max(m, I.lo), I.hi)
        return Interval(min(m, I.hi), I.hi) if a < 0.5 else Interval(I.lo, m)

    Xs, Ys = sub(X, s), sub(Y, t)
    for fn in (ia.iv_add, ia.iv_sub, ia.iv_mul):
        assert fn(Xs, Ys).subset_of(fn(X, Y))
    if not Y.contains(0.0):
        try:
            assert ia.iv_div(Xs, Ys).subset_of(ia.iv_div(X, Y))
        except OverflowBound:
            pass


def test_containment_fuzz_array_layer():
    rng = np.random.default_rng(11)
    n = 20000
    for op, kind in (("add", "any"), ("sub", "any"), ("mul", "any"), ("div", "zero_free")):
        xl, xh = oracles.random_intervals(rng, n)
        yl, yh = oracles.random_intervals(rng, n, kind)
        x, y = oracles.points_in(rng, xl, xh), oracles.points_in(rng, yl, yh)
        with np.errstate(all="ignore"):
            zl, zh = getattr(ia, op)(xl, xh, yl, yh)
        for i in range(0, n, 7):
            assert oracles.contains(oracles.exact_value(op, x[i], y[i]), zl[i], zh[i]), (op, xl[i], xh[i], yl[i], yh[i])


def test_two_sum_two_prod_error_free():
    rng = np.random.default_rng(3)
    a = rng.normal(size=1000) * 10.0 ** rng.integers(-20, 20, 1000)
    b = rng.normal(size=1000) * 10.0 ** rng.integers(-20, 20, 1000)
    s, e = ia.two_sum(a, b)
    p, f = ia.two_prod(a, b)
    for i in range(0, 1000, 13):
        assert oracles.mpq(s[i]) + oracles.mpq(e[i]) == oracles.mpq(a[i]) + oracles.mpq(b[i])
        assert oracles.mpq(p[i]) + oracles.mpq(f[i]) == oracles.mpq(a[i]) * oracles.mpq(b[i])


# -- boxes -----------------------------------------------------------------------


def test_box_basic():
    B = Box.from_bounds([0, 0], [2, 1])
    assert B.volume == 2
    left, right = B.bisect()
    assert left == Box.from_bounds([0, 0], [1, 1])
    assert right == Box.from_bounds([1, 0], [2, 1])
    thin = Box.from_bounds([0.5] * 3, [0.5] * 3)
    assert thin.volume == 0


def test_box_tie_breaks_lowest_side():
    B = Box.from_bounds([0, 0, 0], [1, 1, 1])
    assert B.max_diam_side == 0


def test_box_bisect_additivity():
    rng = np.random.default_rng(5)
    for _ in range(200):
        lo = rng.uniform(-5, 5, 3)
        hi = lo + rng.uniform(0, 3, 3)
        B = Box.from_bounds(lo, hi)
        c1, c2 = B.bisect()
        V = B.volume_bounds()
        v1, v2 = c1.volume_bounds(), c2.volume_bounds()
        assert v1.lo + v2.lo <= V.hi * (1 + 1e-15)
        assert v1.hi + v2.hi >= V.lo * (1 - 1e-15)
        assert B.contains(c1.midpoint) and B.contains(c2.midpoint)
