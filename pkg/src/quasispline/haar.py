"""Haar-type multiresolution on beta-integers with exact formal square roots."""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .quadfield import Family, FieldSpec, QuadRat, Surd
from .tiling import generate_beta_integers


class HaarError(ValueError):
    pass


class SurdSum:
    """Finite sum of c_i * sqrt(r_i), kept grouped by square class of the radicand."""

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[Surd] = ()):
        groups: list[list] = []  # [rep, coeff]
        for t in terms:
            if t.is_zero():
                continue
            for g in groups:
                ratio = (t.radicand / g[0]).sqrt()
                if ratio is not None:
                    g[1] = g[1] + t.coeff * ratio
                    break
            else:
                groups.append([t.radicand, t.coeff])
        self.terms = tuple(Surd(c, r) for r, c in groups if not c.is_zero())

    @classmethod
    def of(cls, x) -> SurdSum:
        if isinstance(x, SurdSum):
            return x
        if isinstance(x, Surd):
            return cls([x])
        return cls([Surd(x)])

    def __add__(self, other) -> SurdSum:
        return SurdSum(self.terms + SurdSum.of(other).terms)

    def __neg__(self) -> SurdSum:
        return SurdSum(-t for t in self.terms)

    def __sub__(self, other) -> SurdSum:
        return self + (-SurdSum.of(other))

    def __mul__(self, other) -> SurdSum:
        if isinstance(other, (int, QuadRat)) and not isinstance(other, bool):
            return SurdSum(t * other for t in self.terms)
        o = SurdSum.of(other)
        return SurdSum(a * b for a in self.terms for b in o.terms)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self.terms

    def rational(self) -> QuadRat | None:
        """The value as an element of Q(beta), if it lies there."""
        if not self.terms:
            return None
        if len(self.terms) == 1 and self.terms[0].radicand == 1:
            return self.terms[0].coeff
        return None

    def __float__(self) -> float:
        return float(sum((float(t) for t in self.terms), 0.0))

    def __eq__(self, other):
        return (self - SurdSum.of(other)).is_zero()

    def __hash__(self):
        return hash(float(self))

    def __repr__(self):
        return " + ".join(repr(t) for t in self.terms) or "0"


def inv_sqrt(x: QuadRat) -> Surd:
    """x^(-1/2) for x > 0 in Q(beta)."""
    return Surd(x.inv(), x)


@dataclass(frozen=True)
class StepFn:
    """Piecewise-constant function, zero outside [knots[0], knots[-1])."""

    knots: tuple[QuadRat, ...]
    values: tuple[SurdSum, ...]

    def __post_init__(self):
        if len(self.knots) != len(self.values) + 1:
            raise HaarError("need one value per interval")

    @classmethod
    def indicator(cls, a: QuadRat, b: QuadRat, height=None) -> StepFn:
        h = SurdSum.of(height if height is not None else a.field.one())
        return cls((a, b), (h,))

    @property
    def field(self) -> FieldSpec:
        return self.knots[0].field

    def value_at(self, x: QuadRat) -> SurdSum:
        if x < self.knots[0] or x >= self.knots[-1]:
            return SurdSum()
        return self.values[bisect.bisect_right(self.knots, x) - 1]

    def refine_to(self, knots: Sequence[QuadRat]) -> StepFn:
        ks = sorted(set(knots) | set(self.knots))
        return StepFn(tuple(ks), tuple(self.value_at(a) for a in ks[:-1]))

    def _binary(self, other: StepFn, op) -> StepFn:
        ks = sorted(set(self.knots) | set(other.knots))
        a, b = self.refine_to(ks), other.refine_to(ks)
        return StepFn(tuple(ks), tuple(op(x, y) for x, y in zip(a.values, b.values)))

    def __add__(self, other: StepFn) -> StepFn:
        return self._binary(other, lambda x, y: x + y)

    def __sub__(self, other: StepFn) -> StepFn:
        return self._binary(other, lambda x, y: x - y)

    def scale(self, c) -> StepFn:
        c = SurdSum.of(c)
        return StepFn(self.knots, tuple(v * c for v in self.values))

    def dilate_shift(self, beta: QuadRat, shift) -> StepFn:
        """x -> f(beta*x - shift)."""
        return StepFn(tuple((k + shift) / beta for k in self.knots), self.values)

    def translate(self, h: QuadRat) -> StepFn:
        """x -> f(x - h)."""
        return StepFn(tuple(k + h for k in self.knots), self.values)

    def mirror(self) -> StepFn:
        """x -> f(-x) (right-continuity at knots is not preserved, irrelevant in L2)."""
        return StepFn(tuple(-k for k in reversed(self.knots)), tuple(reversed(self.values)))

    def inner(self, other: StepFn) -> SurdSum:
        lo = max(self.knots[0], other.knots[0])
        hi = min(self.knots[-1], other.knots[-1])
        if not lo < hi:
            return SurdSum()
        ks = sorted(k for k in set(self.knots) | set(other.knots) if lo <= k <= hi)
        acc = SurdSum()
        for a, b in zip(ks, ks[1:]):
            acc = acc + self.value_at(a) * other.value_at(a) * (b - a)
        return acc

    def norm_sq(self) -> QuadRat:
        n = self.inner(self).rational()
        if n is None:
            raise HaarError("squared norm is not in Q(beta)")
        return n

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.values)

    def __eq__(self, other):
        if not isinstance(other, StepFn):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash(self.knots[0])

    def eval_float(self, xs) -> list[float]:
        return [self._fval(x) for x in xs]

    def _fval(self, x: float) -> float:
        kf = [float(k) for k in self.knots]
        if x < kf[0] or x >= kf[-1]:
            return 0.0
        return float(self.values[bisect.bisect_right(kf, x) - 1])


@dataclass(frozen=True)
class HaarScaling:
    field: FieldSpec
    phi_L: StepFn
    phi_S: StepFn
    len_L: QuadRat
    len_S: QuadRat
    height_S: Surd


def haar_scaling(fld: FieldSpec) -> HaarScaling:
    """Unit-norm indicators of the two tiles, both starting at 0."""
    one, zero = fld.one(), fld.zero()
    beta = fld.beta
    len_s = beta.inv() if fld.family is Family.MINUS else one - beta.inv()
    h = inv_sqrt(len_s)
    return HaarScaling(fld, StepFn.indicator(zero, one), StepFn.indicator(zero, len_s, h), one, len_s, h)


def fine(hs: HaarScaling, letter: str, shift) -> StepFn:
    """phi_letter(beta*x - shift)."""
    f = hs.phi_L if letter == "L" else hs.phi_S
    return f.dilate_shift(hs.field.beta, hs.field(shift) if not isinstance(shift, QuadRat) else shift)


@dataclass(frozen=True)
class RefinementEquation:
    label: str
    target: StepFn
    terms: tuple[tuple[str, StepFn, Surd], ...]  # (label, fine function, coefficient)

    def residual(self) -> StepFn:
        acc = self.target
        for _, f, c in self.terms:
            acc = acc - f.scale(c)
        return acc

    def holds(self) -> bool:
        return self.residual().is_zero()


def haar_refinement(fld: FieldSpec) -> list[RefinementEquation]:
    """Two-scale equations for phi_L at 0 and for phi_S at its first occurrence in Z_beta^+."""
    hs = haar_scaling(fld)
    a = fld.a
    beta = fld.beta
    one = fld.one()
    eqs = []
    if fld.family is Family.MINUS:
        terms = [(f"phi_L(bx-{l})", fine(hs, "L", l), Surd(one)) for l in range(a)]
        terms.append((f"phi_S(bx-{a})", fine(hs, "S", a), inv_sqrt(beta)))
        eqs.append(RefinementEquation("phi_L(x)", hs.phi_L, tuple(terms)))
        # phi_S(x - a) = beta^(1/2) phi_L(beta x - a beta)
        eqs.append(RefinementEquation(
            f"phi_S(x-{a})", hs.phi_S.translate(fld(a)),
            ((f"phi_L(bx-{a}b)", fine(hs, "L", a * beta), Surd(one, beta)),),
        ))
    else:
        root = Surd(one, one - beta.inv())
        terms = [(f"phi_L(bx-{l})", fine(hs, "L", l), Surd(one)) for l in range(a - 1)]
        terms.append((f"phi_S(bx-{a - 1})", fine(hs, "S", a - 1), root))
        eqs.append(RefinementEquation("phi_L(x)", hs.phi_L, tuple(terms)))
        origin = fld(a - 1)
        terms = [
            (f"phi_L(bx-{a - 1}b-{l})", fine(hs, "L", (a - 1) * beta + l), inv_sqrt(one - beta.inv()))
            for l in range(a - 2)
        ]
        terms.append((f"phi_S(bx-{a - 1}b-{a - 2})", fine(hs, "S", (a - 1) * beta + (a - 2)), Surd(one)))
        eqs.append(RefinementEquation(f"phi_S(x-{a - 1})", hs.phi_S.translate(origin), tuple(terms)))
    return eqs


def gram_schmidt(fns: Sequence[StepFn]) -> list[StepFn]:
    """Classical Gram-Schmidt in the given order; every squared norm must lie in Q(beta)."""
    out: list[StepFn] = []
    for f in fns:
        v = f
        for e in out:
            c = f.inner(e)
            if not c.is_zero():
                v = v - e.scale(c)
        if v.is_zero():
            raise HaarError("generating set is linearly dependent")
        out.append(v.scale(inv_sqrt(v.norm_sq())))
    return out


@dataclass(frozen=True)
class HaarWavelet:
    label: str
    tile: str  # coarse tile letter hosting the wavelet
    offset: QuadRat  # left end of its support relative to the tile origin
    fn: StepFn  # placed with the tile origin at 0


def orthonormal_generating_sets(fld: FieldSpec) -> dict[str, list[StepFn]]:
    hs = haar_scaling(fld)
    a = fld.a
    if fld.family is Family.MINUS:
        return {"L": [hs.phi_L] + [fine(hs, "L", l) for l in range(a)]}
    return {
        "L": [hs.phi_L] + [fine(hs, "L", l) for l in range(a - 1)],
        "S": [hs.phi_S] + [fine(hs, "L", l) for l in range(a - 2)],
    }


def haar_orthonormal_wavelets(fld: FieldSpec) -> list[HaarWavelet]:
    out = []
    for tile, gens in orthonormal_generating_sets(fld).items():
        ortho = gram_schmidt(gens)
        for i, w in enumerate(ortho[1:]):
            out.append(HaarWavelet(f"psi_{tile},{i}", tile, fld.zero(), w))
    return out


@dataclass(frozen=True)
class RieszWavelets:
    psi_LL: StepFn
    psi_LS: StepFn  # support starts at its offset inside the coarse L tile
    psi_SL: StepFn  # mirror image of psi_LS, for the negative half-line
    ls_offset: QuadRat
    normalizer_sq_LS: QuadRat  # recomputed from exact integration
    stated_normalizer_sq_LS: QuadRat

    @property
    def normalizer_agrees(self) -> bool:
        return self.normalizer_sq_LS == self.stated_normalizer_sq_LS


def haar_riesz_wavelets(fld: FieldSpec) -> RieszWavelets:
    hs = haar_scaling(fld)
    a = fld.a
    beta = fld.beta
    one = fld.one()
    raw_ll = fine(hs, "L", 0) - fine(hs, "L", 1)
    psi_ll = raw_ll.scale(inv_sqrt(raw_ll.norm_sq()))
    if fld.family is Family.MINUS:
        k = a - 1
        raw_ls = fine(hs, "L", k) - fine(hs, "S", a).scale(Surd(one, beta))
        stated = beta / (beta + 1)
    else:
        k = a - 2
        raw_ls = fine(hs, "L", k) - fine(hs, "S", a - 1).scale(inv_sqrt(one - beta.inv()))
        stated = ((a - 1) * beta - 1) / (2 * beta - 1)
    nsq = raw_ls.norm_sq().inv()
    psi_ls = raw_ls.scale(Surd(one, nsq))
    offset = fld(k) / beta
    return RieszWavelets(psi_ll, psi_ls, psi_ls.mirror(), offset, nsq, stated)


@dataclass(frozen=True)
class HaarBasis:
    functions: tuple[StepFn, ...]
    labels: tuple[str, ...]


def _coarse_tiles(fld: FieldSpec, ntiles: int) -> list[tuple[QuadRat, str]]:
    z = generate_beta_integers(fld, ntiles)
    return [(z.node(k), z.letter(k)) for k in range(ntiles)]


def haar_v1_basis(fld: FieldSpec, ntiles: int, variant: str = "orthonormal") -> HaarBasis:
    """V_0 scaling translates plus wavelets over the first ``ntiles`` tiles of Z_beta^+."""
    hs = haar_scaling(fld)
    fns, labels = [], []
    for x, letter in _coarse_tiles(fld, ntiles):
        fns.append((hs.phi_L if letter == "L" else hs.phi_S).translate(x))
        labels.append(f"phi_{letter}@{x}")
    if variant == "orthonormal":
        wav = haar_orthonormal_wavelets(fld)
        for x, letter in _coarse_tiles(fld, ntiles):
            for w in wav:
                if w.tile == letter:
                    fns.append(w.fn.translate(x))
                    labels.append(f"{w.label}@{x}")
    elif variant == "riesz":
        rw = haar_riesz_wavelets(fld)
        beta = fld.beta
        for x, letter in _coarse_tiles(fld, ntiles):
            if letter != "L":
                continue
            n_ll = fld.a - 1 if fld.family is Family.MINUS else fld.a - 2
            for l in range(n_ll):
                fns.append(rw.psi_LL.translate(x + fld(l) / beta))
                labels.append(f"psi_LL@{x}+{l}/b")
            fns.append(rw.psi_LS.translate(x))
            labels.append(f"psi_LS@{x}")
        if fld.family is Family.PLUS:
            # a coarse S tile splits as L^(a-2) S: the same pattern shifted one fine tile left
            for x, letter in _coarse_tiles(fld, ntiles):
                if letter == "S":
                    for l in range(fld.a - 3):
                        fns.append(rw.psi_LL.translate(x + fld(l) / beta))
                        labels.append(f"psi_LL@{x}+{l}/b")
                    fns.append(rw.psi_LS.translate(x - beta.inv()))
                    labels.append(f"psi_LS@{x}")
    else:
        raise ValueError("variant must be 'orthonormal' or 'riesz'")
    return HaarBasis(tuple(fns), tuple(labels))


def gram_matrix(fns: Sequence[StepFn]) -> list[list[SurdSum]]:
    n = len(fns)
    spans = [(f.knots[0], f.knots[-1]) for f in fns]
    g = [[SurdSum() for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            if spans[i][0] < spans[j][1] and spans[j][0] < spans[i][1]:
                v = fns[i].inner(fns[j])
                g[i][j] = v
                g[j][i] = v
    return g


def is_identity(g: Sequence[Sequence[SurdSum]]) -> bool:
    for i, row in enumerate(g):
        for j, v in enumerate(row):
            if i == j:
                r = v.rational()
                if r is None or r != 1:
                    return False
            elif not v.is_zero():
                return False
    return True


def tile_translation_sets(fld: FieldSpec, ntiles: int) -> dict[str, list[QuadRat]]:
    out: dict[str, list[QuadRat]] = {"L": [], "S": []}
    for x, letter in _coarse_tiles(fld, ntiles):
        out[letter].append(x)
    return out
