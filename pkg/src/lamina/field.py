"""Exact arithmetic in a real quadratic field Q(sqrt(d)).

Every coordinate in a surface lives in a single field Q(sqrt(d)) with d a
square-free nonnegative integer fixed per surface (d = 1 means plain Q).
Elements are a + b*sqrt(d) with rational a, b; all comparisons are exact.
"""

import math
from fractions import Fraction


def _is_square(n):
    if n < 0:
        return False
    r = math.isqrt(n)
    return r * r == n


def rational_sqrt(q):
    """Exact square root of a nonnegative Fraction, or None."""
    if q < 0:
        return None
    if _is_square(q.numerator) and _is_square(q.denominator):
        return Fraction(math.isqrt(q.numerator), math.isqrt(q.denominator))
    return None


class FieldElement:
    """a + b*sqrt(d) with rational a, b. Immutable."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b=0, d=1):
        a = Fraction(a)
        b = Fraction(b)
        d = int(d)
        if d < 1:
            raise ValueError("d must be a positive integer")
        if d == 1:
            a, b = a + b, Fraction(0)
        elif b == 0:
            d = d  # keep the ambient field tag
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)

    def __setattr__(self, *_):
        raise AttributeError("FieldElement is immutable")

    # -- coercion -------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.b != 0 and self.b != 0 and other.d != self.d:
                raise ValueError("mixed fields Q(sqrt(%d)) and Q(sqrt(%d))" % (self.d, other.d))
            return other
        if isinstance(other, (int, Fraction)):
            return FieldElement(other, 0, self.d)
        return NotImplemented

    def _join_d(self, other):
        # at most one of the two has an irrational part, or both share d
        if self.b != 0:
            return self.d
        if other.b != 0:
            return other.d
        return max(self.d, other.d)

    # -- arithmetic -----------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return FieldElement(self.a + other.a, self.b + other.b, self._join_d(other))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(-self.a, -self.b, self.d)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        d = self._join_d(other)
        return FieldElement(self.a * other.a + self.b * other.b * d,
                            self.a * other.b + self.b * other.a, d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        d = self._join_d(other)
        norm = other.a * other.a - other.b * other.b * d
        if norm == 0:
            raise ZeroDivisionError("division by zero field element")
        inv = FieldElement(other.a / norm, -other.b / norm, d)
        return self * inv

    def __rtruediv__(self, other):
        return FieldElement(other, 0, self.d) / self

    # -- order ----------------------------------------------------------

    def sign(self):
        """Exact sign of a + b*sqrt(d)."""
        a, b, d = self.a, self.b, self.d
        if b == 0:
            return -1 if a < 0 else (1 if a > 0 else 0)
        if a == 0:
            return -1 if b < 0 else 1
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # opposite signs: compare a^2 with b^2 d
        if a * a > b * b * d:
            return -1 if a < 0 else 1
        if a * a < b * b * d:
            return -1 if b < 0 else 1
        return 0

    def _cmp(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).sign()

    def __eq__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c == 0

    def __lt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c >= 0

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- misc -----------------------------------------------------------

    def sqrt(self):
        """Exact square root inside the same field, or None.

        Solves (x + y*sqrt(d))^2 = self with rational x, y >= 0.
        """
        if self.sign() < 0:
            return None
        a, b, d = self.a, self.b, self.d
        if b == 0:
            r = rational_sqrt(a)
            if r is not None:
                return FieldElement(r, 0, d)
            if d > 1:
                r = rational_sqrt(a / d)
                if r is not None:
                    return FieldElement(0, r, d)
            return None
        disc = rational_sqrt(a * a - b * b * d)
        if disc is None:
            return None
        for t in ((a + disc) / 2, (a - disc) / 2):
            x = rational_sqrt(t)
            if x is not None and x != 0:
                y = b / (2 * x)
                cand = abs(FieldElement(x, y, d))
                if cand * cand == self:
                    return cand
        return None

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __repr__(self):
        return "FieldElement(%s)" % format_exact(self)


def _fmt_frac(q):
    return "%d/%d" % (q.numerator, q.denominator) if q.denominator != 1 else str(q.numerator)


def format_exact(x):
    """Serialize exactly: "a/b" or "a/b+c/e*r" (r = sqrt(d))."""
    if isinstance(x, (int, Fraction)):
        return _fmt_frac(Fraction(x))
    if x.b == 0:
        return _fmt_frac(x.a)
    s = _fmt_frac(x.b) + "*r"
    if x.b < 0:
        s = "-" + _fmt_frac(-x.b) + "*r"
        return (_fmt_frac(x.a) + s) if x.a != 0 else s
    return (_fmt_frac(x.a) + "+" + s) if x.a != 0 else s


def parse_exact(text, d=1):
    """Parse "a/b", "a/b+c/e*r" or "c/e*r" into a FieldElement."""
    t = text.strip().replace(" ", "")
    if not t:
        raise ValueError("empty number")
    # split into rational part and *r part
    if "r" in t:
        # find the '+' or '-' separating the two parts (not a leading sign)
        core, _, _ = t.partition("*r")
        if not t.endswith("*r") and not t.endswith("r"):
            raise ValueError("bad number %r" % text)
        split = -1
        for i in range(1, len(core)):
            if core[i] in "+-" and core[i - 1] not in "+-/":
                split = i
        if split == -1:
            a = Fraction(0)
            b = Fraction(core)
        else:
            a = Fraction(core[:split])
            b = Fraction(core[split:]) if core[split:] not in ("+", "-") else Fraction(core[split:] + "1")
        return FieldElement(a, b, d)
    return FieldElement(Fraction(t), 0, d)


def FE(x, d=1):
    """Convenience constructor from int/Fraction/str/FieldElement."""
    if isinstance(x, FieldElement):
        return x
    if isinstance(x, str):
        return parse_exact(x, d)
    return FieldElement(x, 0, d)
