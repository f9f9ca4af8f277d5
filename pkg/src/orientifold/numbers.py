"""Exact arithmetic in Q(sqrt2, i).

Spin lifts of signed-permutation rotations need (1 +- e_i e_j)/sqrt2, and the
finite Spin^c models need 8th roots of unity, so the smallest convenient field
is Q(sqrt2)[i].  Elements are stored as four Fractions::

    (a + b*sqrt2) + i*(c + d*sqrt2)
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational

__all__ = ["Exact", "SQRT2", "I", "to_exact", "exact_sqrt", "is_exact", "parse_scalar"]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    raise TypeError(f"cannot convert {x!r} to an exact rational")


class Exact:
    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a=0, b=0, c=0, d=0):
        self.a = _frac(a)
        self.b = _frac(b)
        self.c = _frac(c)
        self.d = _frac(d)

    # -- coercion -------------------------------------------------------
    @staticmethod
    def _coerce(other):
        if isinstance(other, Exact):
            return other
        if isinstance(other, (int, Fraction)):
            return Exact(other)
        return None

    # -- ring operations ------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) + other
        return Exact(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    __radd__ = __add__

    def __neg__(self):
        return Exact(-self.a, -self.b, -self.c, -self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) - other
        return Exact(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return other - complex(self)
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Exact(self.a * other, self.b * other, self.c * other, self.d * other)
        o = self._coerce(other)
        if o is None:
            return complex(self) * other

        # real parts in Q(sqrt2): (p + q r)(s + t r) = ps + 2qt + (pt + qs) r; most entries are zero
        def m(p, q, s, t):
            x = (p * s if p and s else 0) + (2 * q * t if q and t else 0)
            y = (p * t if p and t else 0) + (q * s if q and s else 0)
            return x, y

        ra, rb = m(self.a, self.b, o.a, o.b)
        ia, ib = m(self.c, self.d, o.c, o.d)
        xa, xb = m(self.a, self.b, o.c, o.d)
        ya, yb = m(self.c, self.d, o.a, o.b)
        return Exact(ra - ia, rb - ib, xa + ya, xb + yb)

    __rmul__ = __mul__

    def conjugate(self) -> "Exact":
        return Exact(self.a, self.b, -self.c, -self.d)

    def _surd_conj(self) -> "Exact":
        # sqrt2 -> -sqrt2 (Galois conjugate over Q(i))
        return Exact(self.a, -self.b, self.c, -self.d)

    def inverse(self) -> "Exact":
        if self.is_zero():
            raise ZeroDivisionError("Exact division by zero")
        # multiply by the complex conjugate, then the surd conjugate -> rational
        n1 = self * self.conjugate()  # real element of Q(sqrt2)
        n2 = n1 * n1._surd_conj()  # rational
        return self.conjugate() * n1._surd_conj() * Fraction(1) / n2.a

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) / other
        if o.b == o.c == o.d == 0:
            if o.a == 0:
                raise ZeroDivisionError("Exact division by zero")
            return Exact(self.a / o.a, self.b / o.a, self.c / o.a, self.d / o.a)
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return other / complex(self)
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out, base = Exact(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- predicates / comparison -----------------------------------------
    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0 and self.c == 0 and self.d == 0

    def is_real(self) -> bool:
        return self.c == 0 and self.d == 0

    def is_rational(self) -> bool:
        return self.b == 0 and self.c == 0 and self.d == 0

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, (float, complex)):
                return complex(self) == other
            return NotImplemented
        return (self.a, self.b, self.c, self.d) == (o.a, o.b, o.c, o.d)

    def __hash__(self):
        if self.b == 0 and self.c == 0 and self.d == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.c, self.d))

    def __bool__(self):
        return not self.is_zero()

    def sign(self) -> int:
        """Sign of a real element (exact, no floating point)."""
        if not self.is_real():
            raise ValueError("sign of a non-real number")
        return _surd_sign(self.a, self.b)

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    # -- conversions ----------------------------------------------------
    @property
    def real(self) -> "Exact":
        return Exact(self.a, self.b)

    @property
    def imag(self) -> "Exact":
        return Exact(self.c, self.d)

    def __complex__(self):
        r2 = math.sqrt(2.0)
        return complex(float(self.a) + float(self.b) * r2, float(self.c) + float(self.d) * r2)

    def __float__(self):
        if not self.is_real():
            raise TypeError("non-real Exact to float")
        return float(self.a) + float(self.b) * math.sqrt(2.0)

    def __repr__(self):
        return f"Exact({self})"

    def __str__(self):
        return format_scalar(self)


def _surd_sign(a: Fraction, b: Fraction) -> int:
    """Sign of a + b*sqrt2."""
    if b == 0:
        return (a > 0) - (a < 0)
    if a == 0:
        return (b > 0) - (b < 0)
    if (a > 0) == (b > 0):
        return 1 if a > 0 else -1
    # opposite signs: compare a^2 with 2 b^2
    lhs, rhs = a * a, 2 * b * b
    if lhs == rhs:  # impossible for rationals unless both zero
        return 0
    dominant_a = lhs > rhs
    if dominant_a:
        return 1 if a > 0 else -1
    return 1 if b > 0 else -1


SQRT2 = Exact(0, 1)
I = Exact(0, 0, 1)


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, Exact))


def to_exact(x) -> Exact:
    if isinstance(x, Exact):
        return x
    if isinstance(x, (int, Fraction)):
        return Exact(x)
    if isinstance(x, str):
        v = parse_scalar(x)
        if not is_exact(v):
            raise TypeError(f"{x!r} is not an exact scalar")
        return to_exact(v)
    raise TypeError(f"cannot convert {x!r} to Exact")


def _rational_sqrt(q: Fraction):
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def exact_sqrt(x) -> Exact:
    """Non-negative square root of a real element of Q(sqrt2), when it lies in Q(sqrt2).

    Raises ValueError when the root is not representable.
    """
    x = to_exact(x)
    if not x.is_real() or x.sign() < 0:
        raise ValueError(f"no real square root of {x}")
    a, b = x.a, x.b
    if b == 0:
        r = _rational_sqrt(a)
        if r is not None:
            return Exact(r)
        r = _rational_sqrt(a / 2)
        if r is not None:
            return Exact(0, r)
        raise ValueError(f"sqrt({x}) not in Q(sqrt2)")
    # (p + q sqrt2)^2 = p^2 + 2q^2 + 2pq sqrt2
    disc = _rational_sqrt(a * a - 2 * b * b)
    if disc is not None:
        for p2 in ((a + disc) / 2, (a - disc) / 2):
            p = _rational_sqrt(p2)
            if p is None or p == 0:
                continue
            for sp in (p, -p):
                q = b / (2 * sp)
                cand = Exact(sp, q)
                if cand * cand == x and cand.sign() >= 0:
                    return cand
    raise ValueError(f"sqrt({x}) not in Q(sqrt2)")


# -- text format --------------------------------------------------------

_FACTOR = re.compile(r"\s*(sqrt2|i|\d+(?:\.\d*)?(?:[eE][-+]?\d+)?(?:/\d+)?|\.\d+(?:[eE][-+]?\d+)?)\s*")


def _fmt_frac(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_scalar(x) -> str:
    """Render a scalar as a sum of products, e.g. ``1/2 + 1/2*sqrt2*i``."""
    if isinstance(x, Exact):
        parts = []
        for coef, suffix in ((x.a, ""), (x.b, "*sqrt2"), (x.c, "*i"), (x.d, "*sqrt2*i")):
            if coef == 0:
                continue
            parts.append((coef, suffix))
        if not parts:
            return "0"
        out = ""
        for k, (coef, suffix) in enumerate(parts):
            sgn = "-" if coef < 0 else "+"
            body = _fmt_frac(abs(coef)) + suffix
            if k == 0:
                out = ("-" if sgn == "-" else "") + body
            else:
                out += f" {sgn} {body}"
        return out
    if isinstance(x, Fraction):
        return _fmt_frac(x)
    if isinstance(x, complex):
        return repr(x)
    return repr(x)


def parse_scalar(text: str):
    """Parse a sum of products of numbers, ``sqrt2`` and ``i``.

    Integer and p/q literals give exact values; any decimal literal makes the
    result floating (float or complex).
    """
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty scalar")
    terms = re.findall(r"[+-]?[^+-]+", s.replace("e-", "E_").replace("e+", "E^"))
    total = Exact(0)
    floating = False
    ftotal = 0j
    for term in terms:
        term = term.replace("E_", "e-").replace("E^", "e+")
        sign = -1 if term.startswith("-") else 1
        body = term.lstrip("+-")
        exact_val = Exact(sign)
        float_val = complex(sign)
        for factor in body.split("*"):
            if factor == "sqrt2":
                exact_val = exact_val * SQRT2
                float_val *= math.sqrt(2.0)
            elif factor == "i":
                exact_val = exact_val * I
                float_val *= 1j
            elif re.fullmatch(r"\d+(/\d+)?", factor):
                q = Fraction(factor)
                exact_val = exact_val * q
                float_val *= float(q)
            elif _FACTOR.fullmatch(factor):
                floating = True
                float_val *= float(factor)
            else:
                raise ValueError(f"bad scalar factor {factor!r} in {text!r}")
        total = total + exact_val
        ftotal += float_val
    if floating:
        return ftotal.real if ftotal.imag == 0 else ftotal
    if total.is_rational():
        return total.a if total.a.denominator != 1 else int(total.a)
    return total
