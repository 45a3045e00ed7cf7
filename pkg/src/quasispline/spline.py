"""Exact piecewise polynomials over Q(beta) and B-splines on aperiodic knot sequences."""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .quadfield import FieldSpec, QuadRat
from .tiling import NodeSequence, SequenceTooShortError, TilingError


class SplineError(ValueError):
    pass


class SupportError(SplineError):
    pass


def _poly_mul(p: Sequence[QuadRat], q: Sequence[QuadRat], zero: QuadRat) -> list[QuadRat]:
    out = [zero] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a.is_zero():
            continue
        for j, b in enumerate(q):
            if not b.is_zero():
                out[i + j] = out[i + j] + a * b
    return out


def _taylor_shift(c: Sequence[QuadRat], d: QuadRat) -> list[QuadRat]:
    """Coefficients of p(t + d) given those of p(t)."""
    c = list(c)
    n = len(c)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            c[j] = c[j] + d * c[j + 1]
    return c


def _horner(c: Sequence[QuadRat], t: QuadRat) -> QuadRat:
    acc = c[-1]
    for a in reversed(c[:-1]):
        acc = acc * t + a
    return acc


class PiecewisePoly:
    """Compactly supported piecewise polynomial in local coordinates.

    ``pieces[i][j]`` is the coefficient of ``(x - knots[i])**j`` on
    ``[knots[i], knots[i+1])``; the function is zero outside ``[knots[0], knots[-1]]``.
    ``lo_index`` optionally records the node index of ``knots[0]``.
    """

    __slots__ = ("knots", "pieces", "degree", "lo_index", "__dict__")

    def __init__(self, knots: Sequence[QuadRat], pieces: Sequence[Sequence[QuadRat]], degree: int | None = None,
                 lo_index: int | None = None):
        if len(knots) != len(pieces) + 1 or not pieces:
            raise SplineError("need len(knots) == len(pieces) + 1 >= 2")
        for a, b in zip(knots, knots[1:]):
            if not a < b:
                raise SplineError("knots must be strictly increasing")
        deg = max(len(p) for p in pieces) - 1 if degree is None else degree
        zero = knots[0].field.zero()
        norm = []
        for p in pieces:
            p = list(p)
            if len(p) > deg + 1:
                if any(not x.is_zero() for x in p[deg + 1 :]):
                    raise SplineError("piece exceeds declared degree")
                p = p[: deg + 1]
            norm.append(tuple(p + [zero] * (deg + 1 - len(p))))
        self.knots = tuple(knots)
        self.pieces = tuple(norm)
        self.degree = deg
        self.lo_index = lo_index

    @property
    def field(self) -> FieldSpec:
        return self.knots[0].field

    @property
    def support(self) -> tuple[QuadRat, QuadRat]:
        return self.knots[0], self.knots[-1]

    @property
    def support_indices(self) -> tuple[int, int] | None:
        if self.lo_index is None:
            return None
        return self.lo_index, self.lo_index + len(self.pieces)

    def __repr__(self):
        return f"PiecewisePoly(deg={self.degree}, support=[{self.knots[0]}, {self.knots[-1]}], pieces={len(self.pieces)})"

    def __eq__(self, other):
        if not isinstance(other, PiecewisePoly):
            return NotImplemented
        return self.knots == other.knots and self.pieces == other.pieces

    def __hash__(self):
        return hash((self.knots, self.pieces))

    # evaluation -----------------------------------------------------------
    def _locate(self, x: QuadRat, side: str) -> int | None:
        k = self.knots
        if side == "right":
            if x < k[0] or x >= k[-1]:
                return None
            i = bisect.bisect_right(k, x) - 1
        elif side == "left":
            if x <= k[0] or x > k[-1]:
                return None
            i = bisect.bisect_left(k, x) - 1
        else:
            raise ValueError("side must be 'left' or 'right'")
        return i

    def __call__(self, x, side: str = "right") -> QuadRat:
        x = x if isinstance(x, QuadRat) else self.field(x, 0)
        i = self._locate(x, side)
        if i is None:
            return self.field.zero()
        return _horner(self.pieces[i], x - self.knots[i])

    eval = __call__

    # calculus -------------------------------------------------------------
    def differentiate(self, times: int = 1) -> PiecewisePoly:
        p = self
        for _ in range(times):
            if p.degree == 0:
                pieces = [(self.field.zero(),) for _ in p.pieces]
                p = PiecewisePoly(p.knots, pieces, 0, p.lo_index)
                continue
            pieces = [tuple(j * c[j] for j in range(1, len(c))) for c in p.pieces]
            p = PiecewisePoly(p.knots, pieces, p.degree - 1, p.lo_index)
        return p

    def antidifferentiate(self, check_compact: bool = True) -> PiecewisePoly:
        """Antiderivative vanishing at the left support end; optionally assert it vanishes at the right end."""
        zero = self.field.zero()
        pieces = []
        acc = zero
        for c, a, b in zip(self.pieces, self.knots, self.knots[1:]):
            new = [acc] + [cj / (j + 1) for j, cj in enumerate(c)]
            pieces.append(new)
            acc = _horner(new, b - a)
        if check_compact and not acc.is_zero():
            raise SupportError(f"antiderivative does not vanish at the right end ({acc})")
        return PiecewisePoly(self.knots, pieces, self.degree + 1, self.lo_index)

    def end_value(self) -> QuadRat:
        """Left limit at the right support end."""
        return _horner(self.pieces[-1], self.knots[-1] - self.knots[-2])

    def moment(self, k: int = 0) -> QuadRat:
        """Exact integral of x**k * P(x)."""
        if k < 0:
            raise ValueError("k must be >= 0")
        total = self.field.zero()
        for c, a, b in zip(self.pieces, self.knots, self.knots[1:]):
            h = b - a
            # x^k = sum_m C(k,m) a^(k-m) t^m
            xk = [math.comb(k, m) * a ** (k - m) for m in range(k + 1)]
            prod = _poly_mul(xk, c, total.field.zero())
            hp = h
            for j, cj in enumerate(prod):
                if not cj.is_zero():
                    total = total + cj * hp / (j + 1)
                hp = hp * h
        return total

    def integral(self) -> QuadRat:
        return self.moment(0)

    # algebra --------------------------------------------------------------
    def refine_to(self, knots: Sequence[QuadRat]) -> PiecewisePoly:
        """Same function on a knot set containing the current knots (zero pieces outside the support)."""
        knots = sorted(set(knots) | set(self.knots))
        zero = self.field.zero()
        pieces = []
        for a in knots[:-1]:
            i = self._locate(a, "right")
            if i is None:
                pieces.append((zero,) * (self.degree + 1))
            else:
                pieces.append(tuple(_taylor_shift(self.pieces[i], a - self.knots[i])))
        lo = None
        if self.lo_index is not None and knots[0] == self.knots[0]:
            lo = self.lo_index
        return PiecewisePoly(knots, pieces, self.degree, lo)

    def _binary(self, other: PiecewisePoly, op) -> PiecewisePoly:
        knots = sorted(set(self.knots) | set(other.knots))
        a = self.refine_to(knots)
        b = other.refine_to(knots)
        deg = max(a.degree, b.degree)
        zero = self.field.zero()
        pieces = []
        for p, q in zip(a.pieces, b.pieces):
            p = list(p) + [zero] * (deg + 1 - len(p))
            q = list(q) + [zero] * (deg + 1 - len(q))
            pieces.append([op(x, y) for x, y in zip(p, q)])
        return PiecewisePoly(knots, pieces, deg)

    def __add__(self, other: PiecewisePoly) -> PiecewisePoly:
        return self._binary(other, lambda x, y: x + y)

    def __sub__(self, other: PiecewisePoly) -> PiecewisePoly:
        return self._binary(other, lambda x, y: x - y)

    def scale(self, c) -> PiecewisePoly:
        return PiecewisePoly(self.knots, [[c * x for x in p] for p in self.pieces], self.degree, self.lo_index)

    def __neg__(self) -> PiecewisePoly:
        return self.scale(-1)

    def __mul__(self, c):
        if isinstance(c, PiecewisePoly):
            return self.product(c)
        return self.scale(c)

    __rmul__ = __mul__

    def product(self, other: PiecewisePoly) -> PiecewisePoly:
        knots = sorted(set(self.knots) | set(other.knots))
        a = self.refine_to(knots)
        b = other.refine_to(knots)
        zero = self.field.zero()
        return PiecewisePoly(knots, [_poly_mul(p, q, zero) for p, q in zip(a.pieces, b.pieces)],
                             a.degree + b.degree)

    def inner(self, other: PiecewisePoly) -> QuadRat:
        lo = max(self.knots[0], other.knots[0])
        hi = min(self.knots[-1], other.knots[-1])
        if not lo < hi:
            return self.field.zero()
        return self.product(other).integral()

    def norm_sq(self) -> QuadRat:
        return self.inner(self)

    def shift(self, h: QuadRat, index_shift: int | None = None) -> PiecewisePoly:
        """x -> P(x - h)."""
        lo = None
        if self.lo_index is not None and index_shift is not None:
            lo = self.lo_index + index_shift
        return PiecewisePoly([k + h for k in self.knots], self.pieces, self.degree, lo)

    def dilate(self, theta: QuadRat) -> PiecewisePoly:
        """x -> P(theta * x) for theta > 0."""
        if theta.sign() != 1:
            raise SplineError("dilation factor must be positive")
        pieces = []
        for c in self.pieces:
            f = theta.field.one()
            row = []
            for cj in c:
                row.append(cj * f)
                f = f * theta
            pieces.append(row)
        return PiecewisePoly([k / theta for k in self.knots], pieces, self.degree)

    def mirror(self) -> PiecewisePoly:
        """x -> P(-x)."""
        knots = [-k for k in reversed(self.knots)]
        pieces = []
        for c, a, b in zip(reversed(self.pieces), reversed(self.knots[:-1]), reversed(self.knots[1:])):
            at_right = _taylor_shift(c, b - a)
            pieces.append([x if j % 2 == 0 else -x for j, x in enumerate(at_right)])
        return PiecewisePoly(knots, pieces, self.degree)

    def trim(self) -> PiecewisePoly:
        """Drop identically-zero end pieces."""
        nz = [i for i, p in enumerate(self.pieces) if any(not x.is_zero() for x in p)]
        if not nz:
            return self
        i0, i1 = nz[0], nz[-1]
        lo = self.lo_index + i0 if self.lo_index is not None else None
        return PiecewisePoly(self.knots[i0 : i1 + 2], self.pieces[i0 : i1 + 1], self.degree, lo)

    def is_zero(self) -> bool:
        return all(x.is_zero() for p in self.pieces for x in p)

    # checks ---------------------------------------------------------------
    def jumps(self, order: int) -> list[QuadRat]:
        """Jump of the ``order``-th derivative at every knot, ends included (zero extension)."""
        d = self.differentiate(order) if order else self
        out = [d.pieces[0][0]]
        for i in range(1, len(d.pieces)):
            left = _horner(d.pieces[i - 1], d.knots[i] - d.knots[i - 1])
            out.append(d.pieces[i][0] - left)
        out.append(-d.end_value())
        return out

    def smoothness(self, include_ends: bool = True) -> int:
        """Largest r such that derivatives 0..r are continuous (-1 if P itself jumps)."""
        r = -1
        for order in range(self.degree + 1):
            j = self.jumps(order)
            if not include_ends:
                j = j[1:-1]
            if any(not x.is_zero() for x in j):
                break
            r = order
        return r

    def is_smooth(self, r: int, include_ends: bool = True) -> bool:
        return self.smoothness(include_ends) >= r

    def bernstein(self) -> list[list[QuadRat]]:
        """Bernstein coefficients of each piece on its own interval."""
        n = self.degree
        out = []
        for c, a, b in zip(self.pieces, self.knots, self.knots[1:]):
            h = b - a
            scaled = []
            hp = self.field.one()
            for cj in c:
                scaled.append(cj * hp)
                hp = hp * h
            out.append([
                sum((scaled[j] * Fraction(math.comb(k, j), math.comb(n, j)) for j in range(k + 1)), self.field.zero())
                for k in range(n + 1)
            ])
        return out

    def is_positive_inside(self) -> bool:
        """Exact sufficient test: all Bernstein coefficients >= 0 with a positive one on every piece."""
        for row in self.bernstein():
            signs = [x.sign() for x in row]
            if min(signs) < 0 or max(signs) <= 0:
                return False
        return True

    # float shadow -----------------------------------------------------------
    @cached_property
    def _float_data(self) -> tuple[np.ndarray, np.ndarray]:
        knots = np.array([float(k) for k in self.knots])
        coeffs = np.array([[float(c) for c in p] for p in self.pieces])
        return knots, coeffs

    def eval_float(self, x) -> np.ndarray:
        knots, coeffs = self._float_data
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(knots, x, side="right") - 1
        inside = (idx >= 0) & (idx < len(self.pieces))
        idc = np.clip(idx, 0, len(self.pieces) - 1)
        t = x - knots[idc]
        acc = np.zeros_like(x)
        for j in range(self.degree, -1, -1):
            acc = acc * t + coeffs[idc, j]
        return np.where(inside, acc, 0.0)

    def sample(self, per_piece: int = 16) -> list[tuple[float, float]]:
        knots, _ = self._float_data
        xs = [float(knots[0])]
        for a, b in zip(knots, knots[1:]):
            xs.extend(np.linspace(a, b, per_piece + 1)[1:].tolist())
        xs = np.array(xs)
        ys = self.eval_float(xs)
        ys[-1] = float(self.end_value())
        return list(zip(xs.tolist(), ys.tolist()))

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "lo_index": self.lo_index,
            "knots": [k.to_json() for k in self.knots],
            "knots_float": [float(k) for k in self.knots],
            "pieces": [[c.to_json() for c in p] for p in self.pieces],
            "pieces_float": [[float(c) for c in p] for p in self.pieces],
        }

    @classmethod
    def from_json(cls, data: dict) -> PiecewisePoly:
        knots = [QuadRat.from_json(k) for k in data["knots"]]
        pieces = [[QuadRat.from_json(c) for c in p] for p in data["pieces"]]
        return cls(knots, pieces, data["degree"], data.get("lo_index"))


def indicator(a: QuadRat, b: QuadRat, value: QuadRat | None = None) -> PiecewisePoly:
    return PiecewisePoly([a, b], [[value if value is not None else a.field.one()]], 0)


def _check_range(seq: NodeSequence, n: int, s: int):
    if s < 1:
        raise SplineError("order s must be >= 1")
    if n < seq.i_min or n + s > seq.i_max:
        raise SequenceTooShortError(f"nodes {n}..{n + s} outside [{seq.i_min}, {seq.i_max}]")


def bspline_recurrence(seq: NodeSequence, n: int, s: int) -> PiecewisePoly:
    """B-spline of order s on nodes lambda_n..lambda_{n+s} via the two-term recurrence."""
    _check_range(seq, n, s)
    lam = [seq.node(n + l) for l in range(s + 1)]
    fld = seq.field
    zero, one = fld.zero(), fld.one()
    # level-1 splines: indicators of each gap, written on the common knot set
    cur = [[[one if i == l else zero] for i in range(s)] for l in range(s)]
    for order in range(2, s + 1):
        nxt = []
        for l in range(s - order + 1):
            d0 = lam[l + order - 1] - lam[l]
            d1 = lam[l + order] - lam[l + 1]
            pieces = []
            for i in range(s):
                # omega_l = (x - lam_l)/d0 and 1 - omega_{l+1} = (lam_{l+order} - x)/d1 in local t = x - lam_i
                w0 = [(lam[i] - lam[l]) / d0, one / d0]
                w1 = [(lam[l + order] - lam[i]) / d1, -one / d1]
                a = _poly_mul(w0, cur[l][i], zero)
                b = _poly_mul(w1, cur[l + 1][i], zero)
                pieces.append([x + y for x, y in zip(a, b)])
            nxt.append(pieces)
        cur = nxt
    return PiecewisePoly(lam, cur[0], s - 1, n)


def vandermonde_weights(nodes: Sequence[QuadRat]) -> list[QuadRat]:
    """Closed-form Dirac weights a_l for the s-th derivative of the order-s B-spline."""
    s = len(nodes) - 1
    if len(set(nodes)) != len(nodes):
        raise SplineError("repeated node")
    out = []
    for l, x in enumerate(nodes):
        prod = x.field.one()
        for lp in range(l):
            prod = prod * (x - nodes[lp])
        for lp in range(l + 1, s + 1):
            prod = prod * (nodes[lp] - x)
        out.append(Fraction((-1) ** l, math.factorial(s)) / prod)
    return out


def vandermonde_residuals(nodes: Sequence[QuadRat], weights: Sequence[QuadRat]) -> list[QuadRat]:
    """Residuals of sum_l lambda_l^j a_l = 0 (j < s), = (-1)^s/s! (j = s)."""
    s = len(nodes) - 1
    res = []
    for j in range(s + 1):
        acc = sum((w * x ** j for w, x in zip(weights, nodes)), nodes[0].field.zero())
        target = Fraction((-1) ** s, math.factorial(s)) if j == s else 0
        res.append(acc - target)
    return res


@dataclass(frozen=True)
class VandermondeResult:
    weights: tuple[QuadRat, ...]
    spline: PiecewisePoly
    ratio: QuadRat  # normalized / raw


def bspline_vandermonde(seq: NodeSequence, n: int, s: int) -> VandermondeResult:
    """Dirac weights and the s-fold antiderivative of sum a_l delta_{lambda_{n+l}}."""
    _check_range(seq, n, s)
    lam = [seq.node(n + l) for l in range(s + 1)]
    w = vandermonde_weights(lam)
    bad = [r for r in vandermonde_residuals(lam, w) if not r.is_zero()]
    if bad:
        raise SplineError(f"weights do not solve the moment system: {bad}")
    # first antiderivative: step function with cumulative weights
    acc = seq.field.zero()
    pieces = []
    for l in range(s):
        acc = acc + w[l]
        pieces.append([acc])
    if not (acc + w[s]).is_zero():
        raise SupportError("weights do not sum to zero")
    p = PiecewisePoly(lam, pieces, 0, n)
    for _ in range(s - 1):
        p = p.antidifferentiate(check_compact=True)
    normalized = normalize_integral(p)
    return VandermondeResult(tuple(w), p, normalized.pieces[0][-1] / p.pieces[0][-1])


def normalize_integral(b: PiecewisePoly) -> PiecewisePoly:
    """Scale so the integral equals (support length)/(number of pieces)."""
    integ = b.integral()
    if integ.is_zero():
        raise SplineError("zero integral")
    target = (b.knots[-1] - b.knots[0]) / len(b.pieces)
    return b.scale(target / integ)


@dataclass(frozen=True)
class ScalingClass:
    word: str
    representative_index: int
    function: PiecewisePoly  # centred: left support end at 0
    members: tuple[int, ...]

    def at(self, seq: NodeSequence, k: int) -> PiecewisePoly:
        """The class function translated to start at lambda_k."""
        return self.function.shift(seq.node(k), index_shift=k)


def centred(p: PiecewisePoly) -> PiecewisePoly:
    out = p.shift(-p.knots[0])
    return PiecewisePoly(out.knots, out.pieces, out.degree, 0)


def scaling_classes(seq: NodeSequence, s: int) -> list[ScalingClass]:
    """One B-spline per s-letter word, in descending word order (L > S)."""
    from .tiling import classify_words

    if len(seq) <= s + 1:
        raise SequenceTooShortError("sequence too short")
    out = []
    for wc in classify_words(seq, s):
        rep = next((k for k in wc.indices if -s <= k <= 0), wc.indices[0])
        b = bspline_recurrence(seq, rep, s)
        out.append(ScalingClass(wc.word, rep, centred(b), wc.indices))
    return out
