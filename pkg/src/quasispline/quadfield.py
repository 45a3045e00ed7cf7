"""Exact arithmetic in Q(beta) for a quadratic Pisot unit beta.

Two families of units are supported:

* ``Family.MINUS``: beta is the larger root of X^2 - aX - 1 (a >= 1),
  conjugate beta' = -1/beta.
* ``Family.PLUS``: beta is the larger root of X^2 - aX + 1 (a >= 3),
  conjugate beta' = 1/beta.

Elements are stored as integer triples ``(x, y, d)`` meaning ``(x + y*beta)/d``
with ``d > 0`` and ``gcd(x, y, d) == 1``; comparisons never touch floating point.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Union


class FieldError(ValueError):
    """Invalid field parameters or a mixed-field operation."""


class FieldMismatchError(FieldError):
    pass


class Family(str, Enum):
    MINUS = "minus"
    PLUS = "plus"


@dataclass(frozen=True)
class FieldSpec:
    family: Family
    a: int

    @property
    def eps(self) -> int:
        # beta^2 = a*beta + eps
        return 1 if self.family is Family.MINUS else -1

    @property
    def disc(self) -> int:
        return self.a * self.a + 4 * self.eps

    @property
    def beta_float(self) -> float:
        return (self.a + math.sqrt(self.disc)) / 2

    @property
    def beta(self) -> "QuadRat":
        return QuadRat(0, 1, 1, self)

    @property
    def beta_conj(self) -> "QuadRat":
        return QuadRat(self.a, -1, 1, self)

    def one(self) -> "QuadRat":
        return QuadRat(1, 0, 1, self)

    def zero(self) -> "QuadRat":
        return QuadRat(0, 0, 1, self)

    def __call__(self, p: Union[int, Fraction, str] = 0, q: Union[int, Fraction] = 0) -> "QuadRat":
        """Build ``p + q*beta`` from rationals."""
        return QuadRat.from_rationals(Fraction(p), Fraction(q), self)

    def to_json(self) -> dict:
        return {"family": self.family.value, "a": self.a}

    def __repr__(self) -> str:
        return f"FieldSpec({self.family.value}, a={self.a})"


@lru_cache(maxsize=None)
def field_make(family: Union[Family, str], a: int) -> FieldSpec:
    family = Family(family)
    if not isinstance(a, int) or isinstance(a, bool):
        raise FieldError(f"a must be an integer, got {a!r}")
    if family is Family.MINUS and a < 1:
        raise FieldError(f"minus family requires a >= 1, got {a}")
    if family is Family.PLUS and a < 3:
        raise FieldError(f"plus family requires a >= 3, got {a}")
    return FieldSpec(family, a)


GOLDEN = field_make(Family.MINUS, 1)


def _isqrt_floor_signed(v: int, disc: int) -> int:
    """floor(v * sqrt(disc)) for non-square disc."""
    if v == 0:
        return 0
    r = math.isqrt(v * v * disc)
    return r if v > 0 else -r - 1


Scalar = Union[int, Fraction]


class QuadRat:
    """Immutable element ``(x + y*beta)/d`` of Q(beta)."""

    __slots__ = ("x", "y", "d", "field", "_hash")

    def __init__(self, x: int, y: int, d: int, field: FieldSpec):
        if d == 0:
            raise ZeroDivisionError("zero denominator")
        if d < 0:
            x, y, d = -x, -y, -d
        g = math.gcd(x, y, d)
        if g != 1:
            x //= g
            y //= g
            d //= g
        self.x = x
        self.y = y
        self.d = d
        self.field = field
        self._hash = None

    # -- construction -----------------------------------------------------
    @classmethod
    def from_rationals(cls, p: Scalar, q: Scalar, field: FieldSpec) -> QuadRat:
        p, q = Fraction(p), Fraction(q)
        d = p.denominator * q.denominator // math.gcd(p.denominator, q.denominator)
        return cls(p.numerator * (d // p.denominator), q.numerator * (d // q.denominator), d, field)

    def _coerce(self, other) -> QuadRat:
        if isinstance(other, QuadRat):
            if other.field is not self.field and other.field != self.field:
                raise FieldMismatchError(f"{self.field} vs {other.field}")
            return other
        if isinstance(other, int):
            return QuadRat(other, 0, 1, self.field)
        if isinstance(other, Fraction):
            return QuadRat(other.numerator, 0, other.denominator, self.field)
        return NotImplemented

    # -- components -------------------------------------------------------
    @property
    def p(self) -> Fraction:
        return Fraction(self.x, self.d)

    @property
    def q(self) -> Fraction:
        return Fraction(self.y, self.d)

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def is_rational(self) -> bool:
        return self.y == 0

    def is_integral(self) -> bool:
        """True when the element lies in Z[beta]."""
        return self.d == 1

    # -- ring operations --------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.d == o.d:
            return QuadRat(self.x + o.x, self.y + o.y, self.d, self.field)
        return QuadRat(self.x * o.d + o.x * self.d, self.y * o.d + o.y * self.d, self.d * o.d, self.field)

    __radd__ = __add__

    def __neg__(self):
        return QuadRat(-self.x, -self.y, self.d, self.field)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        f = self.field
        yy = self.y * o.y
        return QuadRat(
            self.x * o.x + f.eps * yy,
            self.x * o.y + self.y * o.x + f.a * yy,
            self.d * o.d,
            f,
        )

    __rmul__ = __mul__

    def norm_int(self) -> Fraction:
        """Field norm x * x' as a rational."""
        f = self.field
        n = self.x * self.x + f.a * self.x * self.y - f.eps * self.y * self.y
        return Fraction(n, self.d * self.d)

    def inv(self) -> QuadRat:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(beta)")
        f = self.field
        # x^{-1} = x' / N(x); with numerators X + Y*beta, X' = X + a*Y - Y*beta
        n = self.x * self.x + f.a * self.x * self.y - f.eps * self.y * self.y
        return QuadRat((self.x + f.a * self.y) * self.d, -self.y * self.d, n, f)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inv()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inv()

    def __pow__(self, n: int) -> QuadRat:
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inv() ** (-n)
        result = QuadRat(1, 0, 1, self.field)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conjugate(self) -> QuadRat:
        """Galois conjugate: beta -> beta' = a - beta."""
        return QuadRat(self.x + self.field.a * self.y, -self.y, self.d, self.field)

    def trace(self) -> Fraction:
        return Fraction(2 * self.x + self.field.a * self.y, self.d)

    # -- order --------------------------------------------------------------
    def sign(self) -> int:
        """Exact sign of the real embedding (beta > 1).

        Writes ``2*(x + y*beta) = u + y*sqrt(D)`` and compares ``u^2`` with ``y^2*D``
        when the two terms have opposite signs.
        """
        u = 2 * self.x + self.field.a * self.y
        v = self.y
        if v == 0:
            return (u > 0) - (u < 0)
        if u >= 0 and v > 0:
            return 1
        if u <= 0 and v < 0:
            return -1
        diff = u * u - v * v * self.field.disc
        # diff != 0 because disc is not a perfect square
        if u > 0:
            return 1 if diff > 0 else -1
        return 1 if diff < 0 else -1

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __floor__(self) -> int:
        u = 2 * self.x + self.field.a * self.y
        t = _isqrt_floor_signed(self.y, self.field.disc)
        return (u + t) // (2 * self.d)

    def __ceil__(self) -> int:
        return -math.floor(-self)

    def floor(self) -> int:
        return math.floor(self)

    def ceil(self) -> int:
        return math.ceil(self)

    # -- equality / hashing -------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, QuadRat):
            return (
                self.x == other.x and self.y == other.y and self.d == other.d
                and (self.field is other.field or self.field == other.field)
            )
        if isinstance(other, (int, Fraction)):
            return self.y == 0 and Fraction(self.x, self.d) == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            if self.y == 0:
                self._hash = hash(Fraction(self.x, self.d))
            else:
                self._hash = hash((self.x, self.y, self.d, self.field.a, self.field.family))
        return self._hash

    def __bool__(self):
        return not self.is_zero()

    # -- conversions ------------------------------------------------------
    def __float__(self) -> float:
        return float(self.p) + float(self.q) * self.field.beta_float

    def to_float(self, digits: int = 10) -> str:
        """Correctly rounded decimal string with ``digits`` places after the point."""
        if digits < 1:
            raise ValueError("digits must be >= 1")
        scaled = self * (10 ** digits) + Fraction(1, 2)
        n = math.floor(scaled)
        neg = n < 0
        s = str(abs(n)).rjust(digits + 1, "0")
        out = f"{s[:-digits]}.{s[-digits:]}"
        return "-" + out if neg else out

    def sqrt(self) -> QuadRat | None:
        """Exact square root in Q(beta) if one exists (the positive one), else None."""
        if self.is_zero():
            return self
        if self.sign() < 0:
            return None
        f = self.field
        nrm = self.norm_int()
        if nrm < 0:
            return None
        rn = _rational_sqrt(nrm)
        if rn is None:
            return None
        tr = self.trace()
        candidates = []
        for nx in (rn, -rn):
            t2 = tr + 2 * nx
            t = _rational_sqrt(t2) if t2 >= 0 else None
            if t is None:
                continue
            for tt in (t, -t):
                if tt == 0:
                    # x' = -x, so x = v*(beta - a/2) and x^2 = v^2*D/4 must be rational
                    if self.y == 0:
                        v = _rational_sqrt(self.p * 4 / f.disc)
                        if v is not None:
                            candidates.append(QuadRat.from_rationals(-v * Fraction(f.a, 2), v, f))
                    continue
                cand = (self + nx) / tt
                candidates.append(cand)
        for c in candidates:
            if c * c == self:
                return c if c.sign() > 0 else -c
        return None

    def to_json(self) -> dict:
        return {
            "p": [self.p.numerator, self.p.denominator],
            "q": [self.q.numerator, self.q.denominator],
            "field": self.field.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> QuadRat:
        fld = field_make(Family(obj["field"]["family"]), int(obj["field"]["a"]))
        p = Fraction(int(obj["p"][0]), int(obj["p"][1]))
        q = Fraction(int(obj["q"][0]), int(obj["q"][1]))
        return cls.from_rationals(p, q, fld)

    def format(self, symbol: str = "b") -> str:
        p, q = self.p, self.q
        if q == 0:
            return str(p)
        qs = "" if abs(q) == 1 else f"{abs(q)}*"
        term = f"{qs}{symbol}"
        if p == 0:
            return ("-" if q < 0 else "") + term
        return f"{p} {'-' if q < 0 else '+'} {term}"

    def __str__(self) -> str:
        return self.format("b")

    def __repr__(self) -> str:
        return f"QuadRat({self.format('b')}; {self.field.family.value}, a={self.field.a})"


_TERM_RE = re.compile(r"^\s*([+-]?\s*\d+(?:/\d+)?)?\s*(?:\*?\s*([a-zA-Z]+))?\s*$")


def parse_quadrat(text: str, field: FieldSpec) -> QuadRat:
    """Parse the canonical ``"p/q + r/s*b"`` string form (any generator symbol)."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty value")
    # split into signed terms
    terms = re.findall(r"[+-]?[^+-]+", s)
    if "".join(terms) != s:
        raise ValueError(f"cannot parse {text!r}")
    p = Fraction(0)
    q = Fraction(0)
    for t in terms:
        m = re.fullmatch(r"([+-]?)(\d+(?:/\d+)?)?\*?([a-zA-Z]+)?", t)
        if not m or (m.group(2) is None and m.group(3) is None):
            raise ValueError(f"cannot parse term {t!r} in {text!r}")
        coef = Fraction(m.group(2)) if m.group(2) else Fraction(1)
        if m.group(1) == "-":
            coef = -coef
        if m.group(3):
            q += coef
        else:
            p += coef
    return QuadRat.from_rationals(p, q, field)


def _rational_sqrt(r: Fraction) -> Fraction | None:
    r = Fraction(r)
    if r < 0:
        return None
    n, d = r.numerator, r.denominator
    sn, sd = math.isqrt(n), math.isqrt(d)
    if sn * sn == n and sd * sd == d:
        return Fraction(sn, sd)
    return None


def reembed(x: QuadRat, target: FieldSpec) -> QuadRat:
    """Express ``x`` in the basis ``(1, beta_target)`` when both fields coincide as sets.

    Requires disc_source / disc_target to be a rational square (e.g. tau and tau^2).
    """
    src = x.field
    if src == target:
        return x
    k = _rational_sqrt(Fraction(src.disc, target.disc))
    if k is None:
        raise FieldMismatchError(f"{src} and {target} are different quadratic fields")
    # beta_src = (a_src - k*a_tgt)/2 + k*beta_tgt
    b = QuadRat.from_rationals(Fraction(src.a - k * target.a, 1) / 2, k, target)
    return QuadRat.from_rationals(x.p, 0, target) + b * QuadRat.from_rationals(x.q, 0, target)


class Surd:
    """``coeff * sqrt(radicand)`` with both factors in Q(beta) and radicand > 0.

    Used for formal square roots such as beta^(1/2) in normalizing constants; every
    squared quantity stays in Q(beta).
    """

    __slots__ = ("coeff", "radicand")

    def __init__(self, coeff: QuadRat, radicand: QuadRat | None = None):
        if radicand is None:
            radicand = coeff.field.one()
        if radicand.sign() <= 0:
            raise ValueError("radicand must be positive")
        root = radicand.sqrt()
        if root is not None:
            coeff = coeff * root
            radicand = radicand.field.one()
        self.coeff = coeff
        self.radicand = radicand

    @property
    def field(self) -> FieldSpec:
        return self.coeff.field

    def __mul__(self, other):
        if isinstance(other, Surd):
            return Surd(self.coeff * other.coeff, self.radicand * other.radicand)
        if isinstance(other, (QuadRat, int, Fraction)):
            return Surd(self.coeff * other, self.radicand)
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        return Surd(-self.coeff, self.radicand)

    def inv(self) -> Surd:
        return Surd(self.coeff.inv() / self.radicand, self.radicand)

    def square(self) -> QuadRat:
        return self.coeff * self.coeff * self.radicand

    def is_zero(self) -> bool:
        return self.coeff.is_zero()

    def __float__(self):
        return float(self.coeff) * math.sqrt(float(self.radicand))

    def __repr__(self):
        if self.radicand == 1:
            return f"Surd({self.coeff})"
        return f"Surd({self.coeff} * sqrt({self.radicand}))"


def surd_sum_is_zero(terms: Iterable[Surd]) -> bool:
    """Exact test of sum(c_i * sqrt(r_i)) == 0.

    Terms are grouped by square class of the radicand; square roots of distinct
    classes are linearly independent over Q(beta), so each group must vanish.
    """
    groups: list[tuple[QuadRat, QuadRat]] = []  # (class representative, accumulated coeff)
    for t in terms:
        if t.is_zero():
            continue
        for i, (rep, acc) in enumerate(groups):
            ratio = (t.radicand / rep).sqrt()
            if ratio is not None:
                groups[i] = (rep, acc + t.coeff * ratio)
                break
        else:
            groups.append((t.radicand, t.coeff))
    return all(acc.is_zero() for _, acc in groups)


def surd_equal(a: Surd, b: Surd) -> bool:
    return surd_sum_is_zero([a, -b])
