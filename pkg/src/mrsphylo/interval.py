"""Closed-interval and box arithmetic with outward rounding.

Two layers live here.  The array layer works on pairs of numpy arrays
``(lo, hi)`` and is what the expression evaluator, the likelihood code and the
sampler use in their hot loops; an invalid element (division by an interval
containing zero, a domain violation) comes back as NaN in both bounds.  The
scalar layer, :class:`Interval` and :class:`Box`, wraps the same routines for
single values and raises instead of returning NaN.

Outward rounding is emulated without touching the FPU rounding mode: the
exact rounding error of ``+ - *`` is recovered with the classical error-free
transformations (TwoSum, Dekker's TwoProduct) and each bound is moved by one
ulp only in the direction the error demands.  Library functions (exp, log,
sin, ...) are not correctly rounded, so their results are widened by a few ulps
relative before the final step outward.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DivisorContainsZero, DomainError, OverflowBound

__all__ = [
    "RigorPolicy",
    "StdFn",
    "Interval",
    "Box",
    "iv_add",
    "iv_sub",
    "iv_mul",
    "iv_div",
    "iv_pow",
    "iv_std",
    "diameter",
    "hull",
    "intersect",
    "PI",
]

_INF = np.inf
_SPLITTER = 134217729.0  # 2**27 + 1
# Outside this magnitude window Dekker's split or error term may be inexact.
_TP_MAX = 2.0**996
_TP_MIN = 2.0**-969
# Relative widening applied to library transcendentals (about 16 ulps).
_LIBM_REL = 2.0**-48


class RigorPolicy(enum.Enum):
    OUTWARD = "outward"
    FAST = "fast"

    @classmethod
    def coerce(cls, value) -> "RigorPolicy":
        if isinstance(value, cls):
            return value
        if isinstance(value, bool):
            return cls.OUTWARD if value else cls.FAST
        return cls(str(value).lower())

    @property
    def outward(self) -> bool:
        return self is RigorPolicy.OUTWARD


class StdFn(enum.Enum):
    EXP = "exp"
    LOG = "log"
    SQRT = "sqrt"
    SIN = "sin"
    COS = "cos"
    TAN = "tan"
    ATAN = "atan"
    ABS = "abs"
    POW = "pow"


# ---------------------------------------------------------------------------
# rounding primitives
# ---------------------------------------------------------------------------

def _dn(x):
    return np.nextafter(x, -_INF)


def _up(x):
    return np.nextafter(x, _INF)


def two_sum(a, b):
    """Return ``(s, e)`` with ``s = fl(a + b)`` and ``a + b = s + e`` exactly."""
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def two_prod(a, b):
    """Return ``(p, e)`` with ``p = fl(a * b)`` and ``a * b = p + e``.

    ``e`` is NaN wherever the transformation is not guaranteed exact
    (operands too large to split, or a product near the underflow range).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    p = a * b
    with np.errstate(over="ignore", invalid="ignore"):
        ah, al = _split(a)
        bh, bl = _split(b)
        e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    ap = np.abs(p)
    exact_zero = (a == 0) | (b == 0)
    safe = (
        (np.abs(a) < _TP_MAX) & (np.abs(b) < _TP_MAX) & (ap < _TP_MAX) & (ap > _TP_MIN)
    ) | exact_zero
    e = np.where(exact_zero, 0.0, e)
    return p, np.where(safe & np.isfinite(e), e, np.nan)


def _round_down(v, err):
    # err: exact residual (true = v + err); NaN means unknown.
    return np.where(err >= 0, v, _dn(v))


def _round_up(v, err):
    return np.where(err <= 0, v, _up(v))


def _widen_rel(lo, hi, outward):
    if not outward:
        return lo, hi
    lo = _dn(lo - np.abs(lo) * _LIBM_REL)
    hi = _up(hi + np.abs(hi) * _LIBM_REL)
    return lo, hi


def _nan_where(mask, lo, hi):
    if np.any(mask):
        lo = np.where(mask, np.nan, lo)
        hi = np.where(mask, np.nan, hi)
    return lo, hi


def _as(x):
    return np.asarray(x, dtype=float)


# ---------------------------------------------------------------------------
# array layer
# ---------------------------------------------------------------------------

def add(xl, xh, yl, yh, outward=True):
    xl, xh, yl, yh = _as(xl), _as(xh), _as(yl), _as(yh)
    with np.errstate(invalid="ignore", over="ignore"):
        lo, el = two_sum(xl, yl)
        hi, eh = two_sum(xh, yh)
    if outward:
        lo, hi = _round_down(lo, el), _round_up(hi, eh)
    return lo, hi


def sub(xl, xh, yl, yh, outward=True):
    return add(xl, xh, -_as(yh), -_as(yl), outward)


def neg(xl, xh):
    return -_as(xh), -_as(xl)


def scale(xl, xh, c, outward=True):
    """Multiply by the exact float ``c``."""
    c = float(c)
    if c >= 0:
        return _const_products(c, xl, c, xh, outward)
    return _const_products(c, xh, c, xl, outward)


def mul_const_nonneg(cl, ch, xl, xh, outward=True):
    """``[cl, ch] * [xl, xh]`` for a scalar interval constant and ``x >= 0``.

    Needs two directed products instead of four when the constant does not
    straddle zero.
    """
    if cl >= 0:
        return _const_products(cl, xl, ch, xh, outward)
    if ch <= 0:
        return _const_products(cl, xh, ch, xl, outward)
    return mul(cl, ch, xl, xh, outward)


def _const_products(a, x, b, y, outward):
    # [a*x rounded down, b*y rounded up]
    x, y = _as(x), _as(y)
    with np.errstate(invalid="ignore", over="ignore"):
        if not outward:
            return a * x, b * y
        pl, el = two_prod(a, x)
        ph, eh = two_prod(b, y)
    return _round_down(pl, el), _round_up(ph, eh)


def mul(xl, xh, yl, yh, outward=True):
    xl, xh, yl, yh = _as(xl), _as(xh), _as(yl), _as(yh)
    cands_lo = []
    cands_hi = []
    with np.errstate(invalid="ignore", over="ignore"):
        for a, b in ((xl, yl), (xl, yh), (xh, yl), (xh, yh)):
            if outward:
                p, e = two_prod(a, b)
                cands_lo.append(_round_down(p, e))
                cands_hi.append(_round_up(p, e))
            else:
                p = a * b
                cands_lo.append(p)
                cands_hi.append(p)
    lo = np.minimum(np.minimum(cands_lo[0], cands_lo[1]), np.minimum(cands_lo[2], cands_lo[3]))
    hi = np.maximum(np.maximum(cands_hi[0], cands_hi[1]), np.maximum(cands_hi[2], cands_hi[3]))
    return lo, hi


def mul_nonneg(xl, xh, yl, yh, outward=True):
    """Product of intervals already known to lie in ``[0, inf)``."""
    xl, xh, yl, yh = _as(xl), _as(xh), _as(yl), _as(yh)
    with np.errstate(invalid="ignore", over="ignore"):
        if not outward:
            return xl * yl, xh * yh
        pl, el = two_prod(xl, yl)
        ph, eh = two_prod(xh, yh)
    return _round_down(pl, el), _round_up(ph, eh)


def _quotient(x, y, outward, upward):
    """Directed-rounded ``x / y`` for scalars/arrays with ``y != 0``."""
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        q = x / y
        if not outward:
            return q
        p, e = two_prod(q, y)
        exact = (p == x) & (e == 0)
    if upward:
        return np.where(exact, q, _up(q))
    return np.where(exact, q, _dn(q))


def div(xl, xh, yl, yh, outward=True):
    xl, xh, yl, yh = _as(xl), _as(xh), _as(yl), _as(yh)
    bad = (yl <= 0) & (yh >= 0)
    safe_yl = np.where(bad, 1.0, yl)
    safe_yh = np.where(bad, 1.0, yh)
    lo_c = []
    hi_c = []
    for a, b in ((xl, safe_yl), (xl, safe_yh), (xh, safe_yl), (xh, safe_yh)):
        lo_c.append(_quotient(a, b, outward, upward=False))
        hi_c.append(_quotient(a, b, outward, upward=True))
    lo = np.minimum(np.minimum(lo_c[0], lo_c[1]), np.minimum(lo_c[2], lo_c[3]))
    hi = np.maximum(np.maximum(hi_c[0], hi_c[1]), np.maximum(hi_c[2], hi_c[3]))
    return _nan_where(bad, lo, hi)


def sqr(xl, xh, outward=True):
    xl, xh = _as(xl), _as(xh)
    mig = np.where((xl <= 0) & (xh >= 0), 0.0, np.minimum(np.abs(xl), np.abs(xh)))
    mag = np.maximum(np.abs(xl), np.abs(xh))
    return mul_nonneg(mig, mag, mig, mag, outward)


def ipow(xl, xh, n: int, outward=True):
    """Integer power with the odd/even/zero/negative case split."""
    xl, xh = _as(xl), _as(xh)
    n = int(n)
    if n == 0:
        return np.ones_like(xl), np.ones_like(xh)
    if n == 1:
        return xl.copy(), xh.copy()
    if n == 2:
        return sqr(xl, xh, outward)
    if n < 0:
        rl, rh = div(np.ones_like(xl), np.ones_like(xh), xl, xh, outward)
        return ipow(rl, rh, -n, outward)
    with np.errstate(over="ignore", invalid="ignore"):
        if n % 2:
            lo, hi = np.power(xl, n), np.power(xh, n)
        else:
            mig = np.where((xl <= 0) & (xh >= 0), 0.0, np.minimum(np.abs(xl), np.abs(xh)))
            mag = np.maximum(np.abs(xl), np.abs(xh))
            lo, hi = np.power(mig, n), np.power(mag, n)
    exact_lo = (lo == 0) | (np.abs(lo) == 1)
    exact_hi = (hi == 0) | (np.abs(hi) == 1)
    wl, wh = _widen_rel(lo, hi, outward)
    lo, hi = np.where(exact_lo, lo, wl), np.where(exact_hi, hi, wh)
    if n % 2 == 0:
        lo = np.maximum(lo, 0.0)
    return lo, hi


def exp(xl, xh, outward=True):
    xl, xh = _as(xl), _as(xh)
    with np.errstate(over="ignore"):
        lo, hi = np.exp(xl), np.exp(xh)
    wl, wh = _widen_rel(lo, hi, outward)
    lo = np.where(xl == 0, 1.0, np.maximum(wl, 0.0))
    hi = np.where(xh == 0, 1.0, wh)
    return lo, hi


def log(xl, xh, outward=True):
    xl, xh = _as(xl), _as(xh)
    bad = ~(xl > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        lo, hi = np.log(np.where(bad, 1.0, xl)), np.log(np.where(bad, 1.0, xh))
    wl, wh = _widen_rel(lo, hi, outward)
    lo = np.where(xl == 1, 0.0, wl)
    hi = np.where(xh == 1, 0.0, wh)
    return _nan_where(bad, lo, hi)


def sqrt(xl, xh, outward=True):
    xl, xh = _as(xl), _as(xh)
    bad = ~(xl >= 0)
    sl = np.sqrt(np.where(bad, 0.0, xl))
    sh = np.sqrt(np.where(bad, 0.0, xh))
    if outward:
        # sqrt is correctly rounded; the residual sign fixes the direction.
        pl, el = two_prod(sl, sl)
        ph, eh = two_prod(sh, sh)
        with np.errstate(invalid="ignore"):
            rl = (xl - pl) - el
            rh = (xh - ph) - eh
        sl = np.where(rl >= 0, sl, _dn(sl))
        sh = np.where(rh <= 0, sh, _up(sh))
        sl = np.maximum(sl, 0.0)
    return _nan_where(bad, sl, sh)


def abs_(xl, xh):
    xl, xh = _as(xl), _as(xh)
    mig = np.where((xl <= 0) & (xh >= 0), 0.0, np.minimum(np.abs(xl), np.abs(xh)))
    mag = np.maximum(np.abs(xl), np.abs(xh))
    return mig, mag


def atan(xl, xh, outward=True):
    xl, xh = _as(xl), _as(xh)
    lo, hi = _widen_rel(np.arctan(xl), np.arctan(xh), outward)
    lo = np.where(xl == 0, 0.0, np.maximum(lo, -PI_HALF_HI))
    hi = np.where(xh == 0, 0.0, np.minimum(hi, PI_HALF_HI))
    return lo, hi


# Enclosure of pi: the double nearest pi lies below it.
PI_LO = math.pi
PI_HI = math.nextafter(math.pi, math.inf)
PI_HALF_HI = PI_HI / 2
TWO_PI_LO = 2 * PI_LO
_PERIOD_REL = 8 * 2.0**-52


def _hits(xl, xh, offset):
    """Conservatively decide whether ``[xl, xh]`` contains ``offset*pi + 2*k*pi``.

    May report a hit that is not there (costing tightness, never rigor).
    """
    with np.errstate(invalid="ignore", over="ignore"):
        ql = xl / (2 * PI_LO) - offset / 2
        qh = xh / (2 * PI_LO) - offset / 2
        ql = _dn(ql - np.abs(ql) * _PERIOD_REL - _PERIOD_REL)
        qh = _up(qh + np.abs(qh) * _PERIOD_REL + _PERIOD_REL)
        return np.ceil(ql) <= np.floor(qh)


def _trig(xl, xh, fn, max_off, min_off, outward):
    xl, xh = _as(xl), _as(xh)
    with np.errstate(invalid="ignore"):
        a, b = fn(xl), fn(xh)
    at_zero = 0.0 if fn is np.sin else 1.0
    al, ah = _widen_rel(a, a, outward)
    bl, bh = _widen_rel(b, b, outward)
    al, ah = np.where(xl == 0, at_zero, al), np.where(xl == 0, at_zero, ah)
    bl, bh = np.where(xh == 0, at_zero, bl), np.where(xh == 0, at_zero, bh)
    lo, hi = np.minimum(al, bl), np.maximum(ah, bh)
    wide = ~((xh - xl) < TWO_PI_LO)
    has_max = wide | _hits(xl, xh, max_off)
    has_min = wide | _hits(xl, xh, min_off)
    hi = np.where(has_max, 1.0, np.minimum(hi, 1.0))
    lo = np.where(has_min, -1.0, np.maximum(lo, -1.0))
    return lo, hi


def sin(xl, xh, outward=True):
    return _trig(xl, xh, np.sin, 0.5, -0.5, outward)


def cos(xl, xh, outward=True):
    return _trig(xl, xh, np.cos, 0.0, 1.0, outward)


def tan(xl, xh, outward=True):
    xl, xh = _as(xl), _as(xh)
    bad = _hits(xl, xh, 0.5) | _hits(xl, xh, -0.5) | ~((xh - xl) < PI_LO)
    lo, hi = _widen_rel(np.tan(xl), np.tan(xh), outward)
    lo = np.where(xl == 0, 0.0, lo)
    hi = np.where(xh == 0, 0.0, hi)
    return _nan_where(bad, lo, hi)


_UNARY = {
    StdFn.EXP: exp,
    StdFn.LOG: log,
    StdFn.SQRT: sqrt,
    StdFn.SIN: sin,
    StdFn.COS: cos,
    StdFn.TAN: tan,
    StdFn.ATAN: atan,
}


def apply_std(tag: StdFn, xl, xh, outward=True, exponent=None):
    if tag is StdFn.ABS:
        return abs_(xl, xh)
    if tag is StdFn.POW:
        if exponent is None:
            raise DomainError("power requires an integer exponent")
        return ipow(xl, xh, exponent, outward)
    return _UNARY[tag](xl, xh, outward)


def diameter_up(lo, hi, outward=True):
    lo, hi = _as(lo), _as(hi)
    d, e = two_sum(hi, -lo)
    return _round_up(d, e) if outward else d


def diameter_down(lo, hi, outward=True):
    lo, hi = _as(lo), _as(hi)
    d, e = two_sum(hi, -lo)
    return np.maximum(_round_down(d, e), 0.0) if outward else d


def product_bounds(factors_lo, factors_hi, outward=True):
    """Enclose the product of nonnegative factors along the last axis.

    Returns ``(lower, upper)``: rounded-down product of ``factors_lo`` and
    rounded-up product of ``factors_hi``.
    """
    factors_lo = _as(factors_lo)
    factors_hi = _as(factors_hi)
    lo = factors_lo[..., 0]
    hi = factors_hi[..., 0]
    for k in range(1, factors_lo.shape[-1]):
        lo, hi = mul_nonneg(lo, hi, factors_lo[..., k], factors_hi[..., k], outward)
    return lo, hi


# ---------------------------------------------------------------------------
# scalar layer
# ---------------------------------------------------------------------------

def _f(x) -> float:
    return float(x)


@dataclass(frozen=True, slots=True)
class Interval:
    """A closed interval ``[lo, hi]`` with finite float endpoints."""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi):
            raise DomainError("interval bound is NaN")
        if math.isinf(lo) or math.isinf(hi):
            raise OverflowBound(f"non-finite interval bound [{lo}, {hi}]")
        if lo > hi:
            raise DomainError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x) -> "Interval":
        return cls(x, x)

    @classmethod
    def of(cls, value) -> "Interval":
        if isinstance(value, Interval):
            return value
        if isinstance(value, (tuple, list)):
            return cls(value[0], value[1])
        return cls(value, value)

    # geometry ---------------------------------------------------------
    @property
    def diameter(self) -> float:
        return _f(diameter_up(self.lo, self.hi))

    width = diameter

    @property
    def mid(self) -> float:
        m = 0.5 * self.lo + 0.5 * self.hi
        return min(max(m, self.lo), self.hi)

    @property
    def mig(self) -> float:
        return 0.0 if self.lo <= 0 <= self.hi else min(abs(self.lo), abs(self.hi))

    @property
    def mag(self) -> float:
        return max(abs(self.lo), abs(self.hi))

    @property
    def is_thin(self) -> bool:
        return self.lo == self.hi

    def contains(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= x <= self.hi

    __contains__ = contains

    def subset_of(self, other: "Interval") -> bool:
        return other.contains(self)

    def strictly_inside(self, other: "Interval") -> bool:
        return other.contains(self) and self != other

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        return iv_add(self, Interval.of(other))

    __radd__ = __add__

    def __sub__(self, other):
        return iv_sub(self, Interval.of(other))

    def __rsub__(self, other):
        return iv_sub(Interval.of(other), self)

    def __mul__(self, other):
        return iv_mul(self, Interval.of(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return iv_div(self, Interval.of(other))

    def __rtruediv__(self, other):
        return iv_div(Interval.of(other), self)

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __pow__(self, n):
        if int(n) != n:
            raise DomainError("only integer powers are supported")
        return iv_pow(self, int(n))

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"

    def __iter__(self):
        yield self.lo
        yield self.hi


def _wrap(lo, hi, what: str) -> Interval:
    lo, hi = _f(lo), _f(hi)
    if math.isnan(lo) or math.isnan(hi):
        raise DomainError(f"{what}: result undefined")
    if math.isinf(lo) or math.isinf(hi):
        raise OverflowBound(f"{what}: overflow to non-finite bound")
    return Interval(lo, hi)


def iv_add(X: Interval, Y: Interval, policy=RigorPolicy.OUTWARD) -> Interval:
    return _wrap(*add(X.lo, X.hi, Y.lo, Y.hi, RigorPolicy.coerce(policy).outward), "add")


def iv_sub(X: Interval, Y: Interval, policy=RigorPolicy.OUTWARD) -> Interval:
    return _wrap(*sub(X.lo, X.hi, Y.lo, Y.hi, RigorPolicy.coerce(policy).outward), "sub")


def iv_mul(X: Interval, Y: Interval, policy=RigorPolicy.OUTWARD) -> Interval:
    return _wrap(*mul(X.lo, X.hi, Y.lo, Y.hi, RigorPolicy.coerce(policy).outward), "mul")


def iv_div(X: Interval, Y: Interval, policy=RigorPolicy.OUTWARD) -> Interval:
    if Y.lo <= 0 <= Y.hi:
        raise DivisorContainsZero(f"divisor {Y!r} contains zero")
    return _wrap(*div(X.lo, X.hi, Y.lo, Y.hi, RigorPolicy.coerce(policy).outward), "div")


def iv_pow(X: Interval, n: int, policy=RigorPolicy.OUTWARD) -> Interval:
    if n < 0 and X.lo <= 0 <= X.hi:
        raise DivisorContainsZero(f"negative power of {X!r}, which contains zero")
    return _wrap(*ipow(X.lo, X.hi, n, RigorPolicy.coerce(policy).outward), "pow")


def iv_std(f, X: Interval, n: int | None = None, policy=RigorPolicy.OUTWARD) -> Interval:
    """Interval extension of a standard function ``f`` over ``X``."""
    tag = f if isinstance(f, StdFn) else StdFn(str(f).lower())
    if tag is StdFn.POW:
        if n is None:
            raise DomainError("pow needs an integer exponent")
        return iv_pow(X, n, policy)
    if tag is StdFn.LOG and not X.lo > 0:
        raise DomainError(f"log undefined on {X!r}")
    if tag is StdFn.SQRT and not X.lo >= 0:
        raise DomainError(f"sqrt undefined on {X!r}")
    lo, hi = apply_std(tag, X.lo, X.hi, RigorPolicy.coerce(policy).outward)
    if tag is StdFn.TAN and math.isnan(_f(lo)):
        raise DomainError(f"tan has a pole in {X!r}")
    return _wrap(lo, hi, tag.value)


def diameter(X: Interval) -> float:
    return X.diameter


def hull(X: Interval, Y: Interval) -> Interval:
    return Interval(min(X.lo, Y.lo), max(X.hi, Y.hi))


def intersect(X: Interval, Y: Interval) -> Interval | None:
    lo, hi = max(X.lo, Y.lo), min(X.hi, Y.hi)
    if lo > hi:
        return None
    return Interval(lo, hi)


PI = Interval(PI_LO, PI_HI)


# ---------------------------------------------------------------------------
# boxes
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Box:
    """Cartesian product of intervals; the dimension is fixed at construction."""

    sides: tuple

    def __post_init__(self):
        sides = tuple(Interval.of(s) for s in self.sides)
        if not sides:
            raise DomainError("a box needs at least one side")
        object.__setattr__(self, "sides", sides)

    @classmethod
    def from_bounds(cls, lo: Iterable[float], hi: Iterable[float]) -> "Box":
        return cls(tuple(Interval(a, b) for a, b in zip(lo, hi, strict=True)))

    @classmethod
    def cube(cls, lo: float, hi: float, dim: int) -> "Box":
        return cls(tuple(Interval(lo, hi) for _ in range(dim)))

    @property
    def dim(self) -> int:
        return len(self.sides)

    @property
    def lo(self) -> np.ndarray:
        return np.array([s.lo for s in self.sides])

    @property
    def hi(self) -> np.ndarray:
        return np.array([s.hi for s in self.sides])

    def __len__(self):
        return len(self.sides)

    def __getitem__(self, k) -> Interval:
        return self.sides[k]

    def __iter__(self):
        return iter(self.sides)

    def volume_bounds(self) -> Interval:
        lo = np.array([diameter_down(s.lo, s.hi) for s in self.sides])
        hi = np.array([diameter_up(s.lo, s.hi) for s in self.sides])
        vl, vh = product_bounds(lo, hi)
        return Interval(_f(vl), _f(vh))

    @property
    def volume(self) -> float:
        return self.volume_bounds().hi

    @property
    def max_diam_side(self) -> int:
        # argmax returns the lowest index on ties.
        return int(np.argmax([s.diameter for s in self.sides]))

    @property
    def midpoint(self) -> np.ndarray:
        return np.array([s.mid for s in self.sides])

    def bisect(self, side: int | None = None) -> tuple["Box", "Box"]:
        k = self.max_diam_side if side is None else side
        s = self.sides[k]
        m = s.mid
        left = self.sides[:k] + (Interval(s.lo, m),) + self.sides[k + 1:]
        right = self.sides[:k] + (Interval(m, s.hi),) + self.sides[k + 1:]
        return Box(left), Box(right)

    def contains(self, x: Sequence[float] | "Box") -> bool:
        if isinstance(x, Box):
            return all(a.contains(b) for a, b in zip(self.sides, x.sides, strict=True))
        return all(s.lo <= v <= s.hi for s, v in zip(self.sides, x, strict=True))

    __contains__ = contains

    def __repr__(self):
        inner = ", ".join(f"[{s.lo!r}, {s.hi!r}]" for s in self.sides)
        return f"Box({inner})"
