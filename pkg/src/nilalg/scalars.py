"""Exact Gaussian rational scalars: a + b*i with arbitrary precision rational parts."""

from __future__ import annotations

from fractions import Fraction

from gmpy2 import mpq

from .errors import StructuralError

Q0 = mpq(0)
Q1 = mpq(1)


def rat(x) -> mpq:
    """Coerce x to an exact rational. Accepts int, mpq, Fraction, float-free strings."""
    if isinstance(x, (int, type(Q0))):
        return mpq(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        s = x.strip()
        if s.startswith("+"):
            # mpq's string parser rejects an explicit plus sign
            s = s[1:]
        try:
            if "e" in s or "E" in s:
                mant, _, expo = s.replace("E", "e").partition("e")
                return mpq(mant) * mpq(10) ** int(expo)
            return mpq(s)
        except ValueError as exc:
            raise StructuralError(f"not a rational: {x!r}") from exc
    if isinstance(x, float):
        raise StructuralError("floats are not exact; pass a string or rational")
    raise StructuralError(f"cannot coerce {type(x).__name__} to a rational")


def rat_str(q: mpq) -> str:
    return str(q)


class Scalar:
    """Immutable complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", rat(re))
        object.__setattr__(self, "im", rat(im))

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Scalar(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Scalar(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not self.im and not other.im:
            return Scalar(self.re * other.re)
        return Scalar(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        d = other.abs_sq()
        if not d:
            raise ZeroDivisionError("scalar division by zero")
        if not self.im and not other.im:
            return Scalar(self.re / other.re)
        return Scalar(
            (self.re * other.re + self.im * other.im) / d,
            (self.im * other.re - self.re * other.im) / d,
        )

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __neg__(self):
        return Scalar(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise StructuralError("Scalar powers take a nonnegative integer exponent")
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conj(self) -> "Scalar":
        return Scalar(self.re, -self.im)

    def abs_sq(self) -> mpq:
        """|z|^2, exact."""
        return self.re * self.re + self.im * self.im

    @property
    def is_real(self) -> bool:
        return not self.im

    # -- comparisons ------------------------------------------------------

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    # -- formatting -------------------------------------------------------

    def __str__(self):
        if not self.im:
            return rat_str(self.re)
        if not self.re:
            return f"{rat_str(self.im)} i"
        sign = "+" if self.im > 0 else "-"
        return f"{rat_str(self.re)}{sign}{rat_str(abs(self.im))} i"

    def __repr__(self):
        return f"Scalar({self})"


def _coerce(x):
    if isinstance(x, Scalar):
        return x
    if isinstance(x, (int, type(Q0), Fraction)):
        return Scalar(x)
    return NotImplemented


ZERO = Scalar(0)
ONE = Scalar(1)
I = Scalar(0, 1)


def parse_scalar(s: str) -> Scalar:
    """Parse "p/q", "p/q+r/s i", "r/s i" and signed variants. Decimals allowed."""
    if not isinstance(s, str):
        return Scalar(rat(s))
    body = s.replace(" ", "")
    if not body:
        raise StructuralError("empty scalar string")
    if not body.endswith("i"):
        return Scalar(rat(body))
    body = body[:-1].rstrip("*")
    # find the separator between the real and imaginary terms
    sep = -1
    for pos in range(len(body) - 1, 0, -1):
        if body[pos] in "+-" and body[pos - 1] not in "+-/.":
            sep = pos
            break
    if sep < 0:
        re_tok, im_tok = "", body
    else:
        re_tok, im_tok = body[:sep], body[sep:]
    if im_tok in ("", "+"):
        im = Q1
    elif im_tok == "-":
        im = -Q1
    else:
        im = rat(im_tok)
    re = rat(re_tok) if re_tok else Q0
    return Scalar(re, im)


def scalar_str(c: Scalar) -> str:
    return str(c)
