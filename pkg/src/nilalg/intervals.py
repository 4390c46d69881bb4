"""Certified interval arithmetic over exact rationals.

Endpoints are exact rationals, so +, -, *, / are exact; precision only enters
through explicit outward rounding (`round_iv`) and through the certified
transcendental helpers (roots via integer n-th roots, exp via Taylor sums with
an explicit remainder bound). No ambient context: every rounding operation
takes its precision as an argument.
"""

from __future__ import annotations

from gmpy2 import iroot, mpq, mpz

from .errors import StructuralError
from .scalars import Q0, Q1, rat

_TWO = mpz(2)


def _floor_div(a: mpz, b: mpz) -> mpz:
    return a // b


def _round_down(q: mpq, prec: int) -> mpq:
    """Largest dyadic with about `prec` significant bits that is <= q."""
    if not q:
        return Q0
    e = int(q.numerator.bit_length()) - int(q.denominator.bit_length())
    s = prec - e
    if s <= 0:
        n = _floor_div(mpz(q.numerator), mpz(q.denominator) << (-s))
        return mpq(n << (-s))
    n = _floor_div(mpz(q.numerator) << s, mpz(q.denominator))
    return mpq(n, _TWO**s)


def _round_up(q: mpq, prec: int) -> mpq:
    return -_round_down(-q, prec)


class Iv:
    """Closed interval [lo, hi] with exact rational endpoints."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        lo = rat(lo)
        hi = lo if hi is None else rat(hi)
        if lo > hi:
            raise StructuralError(f"inverted interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __setattr__(self, name, value):
        raise AttributeError("Iv is immutable")

    # -- queries ----------------------------------------------------------

    @property
    def mid(self) -> mpq:
        return (self.lo + self.hi) / 2

    @property
    def rad(self) -> mpq:
        return (self.hi - self.lo) / 2

    @property
    def width(self) -> mpq:
        return self.hi - self.lo

    def contains(self, q) -> bool:
        q = rat(q)
        return self.lo <= q <= self.hi

    def is_point(self) -> bool:
        return self.lo == self.hi

    def __bool__(self):
        # true unless this is exactly the zero point
        return bool(self.lo) or bool(self.hi)

    def __eq__(self, other):
        return isinstance(other, Iv) and self.lo == other.lo and self.hi == other.hi

    def __hash__(self):
        return hash((self.lo, self.hi))

    # -- exact arithmetic -------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Iv):
            return Iv(self.lo + other.lo, self.hi + other.hi)
        q = rat(other)
        return Iv(self.lo + q, self.hi + q)

    __radd__ = __add__

    def __neg__(self):
        return Iv(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Iv) else -rat(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Iv):
            q = rat(other)
            if q >= 0:
                return Iv(self.lo * q, self.hi * q)
            return Iv(self.hi * q, self.lo * q)
        a, b, c, d = self.lo, self.hi, other.lo, other.hi
        if a >= 0:
            if c >= 0:
                return Iv(a * c, b * d)
            if d <= 0:
                return Iv(b * c, a * d)
            return Iv(b * c, b * d)
        if b <= 0:
            if c >= 0:
                return Iv(a * d, b * c)
            if d <= 0:
                return Iv(b * d, a * c)
            return Iv(a * d, a * c)
        if c >= 0:
            return Iv(a * d, b * d)
        if d <= 0:
            return Iv(b * c, a * c)
        return Iv(min(a * d, b * c), max(a * c, b * d))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Iv):
            q = rat(other)
            if not q:
                raise ZeroDivisionError("interval division by zero")
            if q > 0:
                return Iv(self.lo / q, self.hi / q)
            return Iv(self.hi / q, self.lo / q)
        if other.lo <= 0 <= other.hi:
            raise ZeroDivisionError("interval divisor straddles zero")
        return self * Iv(1 / other.hi, 1 / other.lo)

    def __rtruediv__(self, other):
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError("interval divisor straddles zero")
        return Iv(1 / self.hi, 1 / self.lo) * other

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Iv(Q0, max(-self.lo, self.hi))

    def __repr__(self):
        if self.is_point():
            return f"Iv({self.lo})"
        return f"Iv({self.lo}, {self.hi})"


IV0 = Iv(0)
IV1 = Iv(1)


def round_iv(x: Iv, prec: int) -> Iv:
    """Outward-round both endpoints to about `prec` significant bits."""
    return Iv(_round_down(x.lo, prec), _round_up(x.hi, prec))


def iv_max(*xs: Iv) -> Iv:
    return Iv(max(x.lo for x in xs), max(x.hi for x in xs))


def pow_int(x: Iv, n: int) -> Iv:
    if n < 0:
        return IV1 / pow_int(x, -n)
    out = IV1
    base = x
    while n:
        if n & 1:
            out = out * base
        base = base * base
        n >>= 1
    return out


def _root_bounds(q: mpq, n: int, prec: int) -> Iv:
    """Certified enclosure of q**(1/n) for q >= 0, by integer n-th roots."""
    if q < 0:
        raise StructuralError("root of a negative rational")
    if not q:
        return IV0
    e = (int(q.numerator.bit_length()) - int(q.denominator.bit_length())) // n
    s = prec - e
    if s < 1:
        s = 1
    scaled = _floor_div(mpz(q.numerator) << (n * s), mpz(q.denominator))
    r, exact = iroot(scaled, n)
    den = _TWO**s
    lo = mpq(r, den)
    if exact and lo**n == q:
        return Iv(lo)
    return Iv(lo, mpq(r + 1, den))


def nth_root(x, n: int, prec: int) -> Iv:
    """Enclosure of x**(1/n); x an Iv or rational, nonnegative."""
    if n < 1:
        raise StructuralError("root order must be a positive integer")
    if not isinstance(x, Iv):
        return _root_bounds(rat(x), n, prec)
    if x.lo < 0:
        raise StructuralError("root of an interval with negative endpoint")
    lo = _root_bounds(x.lo, n, prec)
    hi = _root_bounds(x.hi, n, prec)
    return Iv(lo.lo, hi.hi)


def sqrt_iv(x, prec: int) -> Iv:
    return nth_root(x, 2, prec)


def root_of_pow(q: mpq, num: int, den: int, prec: int) -> Iv:
    """Enclosure of q**(num/den) for q > 0 with integer num, positive den."""
    q = rat(q)
    if q <= 0:
        raise StructuralError("rational power base must be positive")
    if num < 0:
        return IV1 / root_of_pow(q, -num, den, prec)
    return nth_root(q**num, den, prec)


_E_CACHE: dict[int, Iv] = {}


def e_iv(prec: int) -> Iv:
    """Certified enclosure of Euler's number."""
    hit = _E_CACHE.get(prec)
    if hit is not None:
        return hit
    term = Q1
    total = Q1
    j = 0
    bound = mpq(1, _TWO ** (prec + 8))
    while True:
        j += 1
        term = term / j
        total += term
        # tail past j is < 2 * next term
        if 2 * term / (j + 1) < bound:
            break
    out = round_iv(Iv(total, total + 2 * term / (j + 1)), prec + 4)
    _E_CACHE[prec] = out
    return out


def _exp_frac(f: mpq, prec: int) -> Iv:
    """Certified e**f for 0 <= f < 1."""
    term = Q1
    total = Q1
    j = 0
    bound = mpq(1, _TWO ** (prec + 8))
    while True:
        j += 1
        term = term * f / j
        total += term
        tail = 2 * term * f / (j + 1)
        if tail < bound:
            return Iv(total, total + tail)


def exp_point(q: mpq, prec: int) -> Iv:
    """Certified enclosure of e**q for an exact rational q."""
    q = rat(q)
    k = q.numerator // q.denominator
    f = q - k
    out = _exp_frac(f, prec + 8)
    if k:
        ek = pow_int(e_iv(prec + 8 + int(abs(k)).bit_length()), int(k))
        out = out * ek
    return round_iv(out, prec)


def exp_iv(x, prec: int) -> Iv:
    """Certified enclosure of e**x for x an Iv or rational (monotone extension)."""
    if not isinstance(x, Iv):
        return exp_point(rat(x), prec)
    lo = exp_point(x.lo, prec)
    hi = exp_point(x.hi, prec)
    return Iv(lo.lo, hi.hi)


def decimal_str(x, digits: int = 30) -> str:
    """Deterministic decimal rendering of a rational or interval midpoint."""
    if isinstance(x, Iv):
        x = x.mid
    q = rat(x)
    if not q:
        return "0"
    sign = "-" if q < 0 else ""
    q = abs(q)
    # e10 = floor(log10 q), found exactly
    e10 = 0
    ten = mpq(10)
    if q >= 1:
        while q >= ten**(e10 + 1):
            e10 += 1
    else:
        while q < ten**e10:
            e10 -= 1
    scaled = q / ten**e10 * ten**(digits - 1)
    n = int(mpz(scaled.numerator * 2 + scaled.denominator) // mpz(scaled.denominator * 2))
    mant = str(n)
    if len(mant) > digits:  # rounding carried over, e.g. 9.99 -> 10.0
        e10 += 1
        mant = mant[:digits]
    mant = mant.rstrip("0") or "0"
    if -6 <= e10 < digits:
        if e10 >= 0:
            whole = mant[: e10 + 1].ljust(e10 + 1, "0")
            frac = mant[e10 + 1 :]
            return sign + whole + ("." + frac if frac else "")
        return sign + "0." + "0" * (-e10 - 1) + mant
    exp_part = f"e{e10:+d}"
    if len(mant) == 1:
        return sign + mant + exp_part
    return sign + mant[0] + "." + mant[1:] + exp_part
