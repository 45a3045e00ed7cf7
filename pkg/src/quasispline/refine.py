"""Two-scale (refinement) equations: coarse splines expanded in fine B-spline bases."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .linalg import RankError, SingularSystemError, solve
from .quadfield import QuadRat
from .spline import PiecewisePoly, ScalingClass, bspline_recurrence, scaling_classes
from .tiling import NodeSequence, SequenceTooShortError
from .wavelet import MotherWavelet, default_theta, mother_wavelets


class RefinementError(ValueError):
    pass


class NotInSpanError(RefinementError):
    def __init__(self, msg: str, residual: PiecewisePoly | None = None):
        super().__init__(msg)
        self.residual = residual


@dataclass(frozen=True)
class Term:
    word: str
    index: int
    node: QuadRat
    coeff: QuadRat


@dataclass(frozen=True)
class RefinementTable:
    target: str
    terms: tuple[Term, ...]

    def coefficient(self, index: int) -> QuadRat | None:
        for t in self.terms:
            if t.index == index:
                return t.coeff
        return None

    def as_dict(self) -> dict[int, QuadRat]:
        return {t.index: t.coeff for t in self.terms}

    def to_json(self, symbol: str = "tau") -> dict:
        return {
            "target": self.target,
            "terms": [
                {"word": t.word, "index": t.index, "node": t.node.format(symbol),
                 "coeff": t.coeff.format(symbol), "coeff_float": float(t.coeff)}
                for t in self.terms
            ],
        }


class FineBasis:
    """Order-s B-splines on a node sequence, looked up through their word classes."""

    def __init__(self, seq: NodeSequence, s: int, classes: Sequence[ScalingClass] | None = None):
        self.seq = seq
        self.s = s
        self.classes = {c.word: c for c in (classes if classes is not None else scaling_classes(seq, s))}

    def word(self, j: int) -> str:
        return self.seq.word(j, self.s)

    def function(self, j: int) -> PiecewisePoly:
        w = self.word(j)
        c = self.classes.get(w)
        if c is None:
            raise RefinementError(f"no scaling class for word {w}")
        return c.at(self.seq, j)


def _index_range(seq: NodeSequence, target: PiecewisePoly) -> tuple[int, int]:
    lo = seq.index_of(target.knots[0])
    hi = seq.index_of(target.knots[-1])
    if lo is None or hi is None:
        raise RefinementError("target support ends are not fine nodes")
    return lo, hi


def _check_residual(target: PiecewisePoly, terms: Sequence[Term], basis: FineBasis, label: str):
    acc = target
    for t in terms:
        acc = acc - basis.function(t.index).scale(t.coeff)
    if not acc.is_zero():
        raise NotInSpanError(f"{label}: expansion leaves a nonzero residual", acc)


def refine_linear(target: PiecewisePoly, basis: FineBasis, label: str = "") -> RefinementTable:
    """Forward recursion for piecewise-linear targets: g_j = k_j h_j + q_j, which must equal q_{j+1}."""
    if basis.s != 2:
        raise RefinementError("forward recursion needs the order-2 (hat) basis")
    seq = basis.seq
    lo, hi = _index_range(seq, target)
    t = target.refine_to([seq.node(k) for k in range(lo, hi + 1)])
    if t.degree > 1:
        raise RefinementError("target is not piecewise linear")
    if not t.pieces[0][0].is_zero():
        raise NotInSpanError(f"{label}: target does not vanish at the left end")
    terms = []
    for i in range(lo, hi - 1):
        c = t.pieces[i - lo]
        k = c[1] if len(c) > 1 else seq.field.zero()
        g = k * (seq.node(i + 1) - seq.node(i)) + c[0]
        if g != t.pieces[i + 1 - lo][0]:
            raise NotInSpanError(f"{label}: target is discontinuous at node {i + 1}")
        if not g.is_zero():
            terms.append(Term(basis.word(i), i, seq.node(i), g))
    if not t.end_value().is_zero():
        raise NotInSpanError(f"{label}: closing value {t.end_value()} is not zero")
    _check_residual(target, terms, basis, label)
    return RefinementTable(label, tuple(terms))


def refine_general(target: PiecewisePoly, basis: FineBasis, label: str = "") -> RefinementTable:
    """Exact solve matching every piece coefficient on the fine knots of the target support."""
    seq = basis.seq
    s = basis.s
    if target.is_zero():
        return RefinementTable(label, ())
    if target.degree > s - 1:
        raise NotInSpanError(f"{label}: degree {target.degree} exceeds {s - 1}")
    lo, hi = _index_range(seq, target)
    knots = [seq.node(k) for k in range(lo, hi + 1)]
    t = target.refine_to(knots)
    idx = list(range(lo, hi - s + 1))
    if not idx:
        raise NotInSpanError(f"{label}: support shorter than one B-spline")
    fns = [basis.function(j).refine_to(knots) for j in idx]
    zero = seq.field.zero()
    rows, rhs = [], []
    for m in range(hi - lo):
        for p in range(s):
            rows.append([f.pieces[m][p] if p <= f.degree else zero for f in fns])
            tp = t.pieces[m]
            rhs.append(tp[p] if p < len(tp) else zero)
    try:
        g = solve(rows, rhs)
    except SingularSystemError as exc:
        raise NotInSpanError(f"{label}: {exc}") from exc
    terms = [Term(basis.word(j), j, seq.node(j), c) for j, c in zip(idx, g) if not c.is_zero()]
    _check_residual(target, terms, basis, label)
    return RefinementTable(label, tuple(terms))


def coarse_bspline(seq: NodeSequence, k: int, s: int, theta: QuadRat) -> PiecewisePoly:
    """Order-s B-spline on the knots theta*lambda_k..theta*lambda_{k+s}, located by index in seq."""
    b = bspline_recurrence(seq, k, s)
    return PiecewisePoly([theta * x for x in b.knots], b.dilate(theta.inv()).pieces, b.degree)


def scaling_equations(seq: NodeSequence, s: int, theta: QuadRat | None = None,
                      method: str = "general") -> dict[str, RefinementTable]:
    """Refinement equation of every scaling class at its representative in [-s, 0].

    The coarse function sits on theta*Lambda, the fine basis on Lambda.
    """
    theta = theta if theta is not None else default_theta(seq)
    basis = FineBasis(seq, s)
    out = {}
    for c in scaling_classes(seq, s):
        target = coarse_bspline(seq, c.representative_index, s, theta)
        fn = refine_linear if method == "linear" else refine_general
        out[c.word] = fn(target, basis, f"phi_{c.word}")
    return out


@dataclass(frozen=True)
class WaveletEquation:
    wavelet: MotherWavelet
    table: RefinementTable


def wavelet_scaling_equations(seq: NodeSequence, s: int = 2, theta: QuadRat | None = None,
                              method: str = "general") -> list[WaveletEquation]:
    """zeta_mu(y - lambda_mu) in the order-s B-spline basis on Lambda (y = theta*x)."""
    theta = theta if theta is not None else default_theta(seq)
    basis = FineBasis(seq, s)
    out = []
    for mw in mother_wavelets(seq, s, theta):
        target = mw.zeta.shift(seq.node(mw.n))
        fn = refine_linear if method == "linear" else refine_general
        out.append(WaveletEquation(mw, fn(target, basis, f"zeta_{mw.word}@{mw.n}")))
    return out


def refinement_table(eqs: Sequence[WaveletEquation], symbol: str = "tau") -> dict:
    """Rows = fine basis translates, columns = wavelets, cells = exact strings."""
    rows = sorted({(t.index, t.word) for e in eqs for t in e.table.terms})
    columns = [f"{e.wavelet.word}@{e.wavelet.n}" for e in eqs]
    cells = []
    for idx, word in rows:
        cells.append({
            "basis": f"phi_{word}",
            "index": idx,
            "cells": [
                (e.table.coefficient(idx).format(symbol) if e.table.coefficient(idx) is not None else "")
                for e in eqs
            ],
        })
    return {"columns": columns, "rows": cells,
            "norms_sq": [e.wavelet.norm_sq.format(symbol) for e in eqs],
            "norms": [float(e.wavelet.norm_sq) ** 0.5 for e in eqs]}


def compose(outer: RefinementTable, inner: dict[int, RefinementTable], label: str = "") -> RefinementTable:
    """Substitute the expansions ``inner[j]`` of each middle-scale function into ``outer``."""
    acc: dict[int, tuple[str, QuadRat, QuadRat]] = {}
    for t in outer.terms:
        if t.index not in inner:
            raise RefinementError(f"no expansion for middle-scale index {t.index}")
        for u in inner[t.index].terms:
            w, node, c = acc.get(u.index, (u.word, u.node, u.node.field.zero()))
            acc[u.index] = (w, node, c + t.coeff * u.coeff)
    terms = [Term(w, j, node, c) for j, (w, node, c) in sorted(acc.items()) if not c.is_zero()]
    return RefinementTable(label or outer.target, tuple(terms))


def two_scale_check(seq: NodeSequence, k: int, s: int, theta: QuadRat) -> bool:
    """Direct theta^2 -> 1 expansion equals theta^2 -> theta followed by theta -> 1."""
    basis = FineBasis(seq, s)
    target = coarse_bspline(seq, k, s, theta * theta)
    direct = refine_general(target, basis, "direct")
    # by dilation invariance, the theta^2 -> theta coefficients are those of theta -> 1
    scaled = PiecewisePoly([x / theta for x in target.knots], target.dilate(theta).pieces, target.degree)
    outer = refine_general(scaled, basis, "outer")
    inner = {}
    for t in outer.terms:
        inner[t.index] = refine_general(coarse_bspline(seq, t.index, s, theta), basis, f"mid{t.index}")
    composed = compose(outer, inner)
    return composed.as_dict() == direct.as_dict()
