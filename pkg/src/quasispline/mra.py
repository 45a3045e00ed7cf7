"""Finite-window multiresolution transform and frame-bound estimates.

Coordinates: at scale j the fine knots are theta^(-j) * Lambda. Everything is
computed in the canonical variable y = theta^j * x, where the fine knots are
Lambda itself, so coefficient vectors do not depend on j.

On a window [lambda_lo, lambda_hi] the fine space is spanned by the order-s
B-splines supported inside it. It splits into
  * coarse B-splines on the theta*Lambda knots inside the window,
  * wavelets zeta_n (n in E) supported inside the window,
  * a few boundary functions completing the basis, orthogonal to both groups.
The change of basis is exact over Q(beta); boundary coefficients are marked untrusted.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Sequence

import numpy as np

from .linalg import inverse, matvec, nullspace, solve
from .quadfield import QuadRat
from .refine import FineBasis, coarse_bspline, refine_general
from .spline import PiecewisePoly, bspline_recurrence
from .tiling import NodeSequence, SequenceTooShortError
from .wavelet import build_Psi, build_zeta, compute_E, default_theta, support_plan


class MRAError(ValueError):
    pass


class WindowTooSmallError(MRAError):
    pass


@dataclass(frozen=True)
class BasisId:
    kind: str  # "phi", "zeta" or "boundary"
    word: str
    index: int


@dataclass
class CoefficientVector:
    scale: int
    ids: list[BasisId]
    values: list  # QuadRat (exact mode) or float
    window: tuple[int, int]
    trusted: list[bool] = dc_field(default_factory=list)

    def __post_init__(self):
        if len(self.ids) != len(self.values):
            raise MRAError("one value per basis function")
        if not self.trusted:
            self.trusted = [i.kind != "boundary" for i in self.ids]

    @property
    def exact(self) -> bool:
        return bool(self.values) and isinstance(self.values[0], QuadRat)

    def as_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.values])

    def to_csv_rows(self, symbol: str = "tau") -> list[list]:
        return [
            [self.scale, i.kind, i.word, i.index,
             v.format(symbol) if isinstance(v, QuadRat) else "", float(v), int(t)]
            for i, v, t in zip(self.ids, self.values, self.trusted)
        ]


def _gram(fns: Sequence[PiecewisePoly]) -> list[list[QuadRat]]:
    n = len(fns)
    zero = fns[0].field.zero()
    g = [[zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            if fns[i].knots[0] < fns[j].knots[-1] and fns[j].knots[0] < fns[i].knots[-1]:
                v = fns[i].inner(fns[j])
                g[i][j] = v
                g[j][i] = v
    return g


class Window:
    """Exact two-scale split of V_0 restricted to the node window [lo, hi]."""

    def __init__(self, seq: NodeSequence, lo: int, hi: int, s: int = 2, theta: QuadRat | None = None):
        if lo < seq.i_min or hi > seq.i_max:
            raise SequenceTooShortError("window outside the node sequence")
        if hi - lo < s + 1:
            raise WindowTooSmallError("window holds no fine B-spline")
        self.seq, self.lo, self.hi, self.s = seq, lo, hi, s
        self.theta = theta if theta is not None else default_theta(seq)
        self.basis = FineBasis(seq, s)

    # fine level -------------------------------------------------------------
    @cached_property
    def fine_index(self) -> list[int]:
        return list(range(self.lo, self.hi - self.s + 1))

    @cached_property
    def fine_ids(self) -> list[BasisId]:
        return [BasisId("phi", self.basis.word(k), k) for k in self.fine_index]

    @cached_property
    def fine_functions(self) -> list[PiecewisePoly]:
        return [self.basis.function(k) for k in self.fine_index]

    @cached_property
    def fine_gram(self) -> list[list[QuadRat]]:
        return _gram(self.fine_functions)

    @cached_property
    def fine_gram_float(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.fine_gram])

    def _fine_coeffs(self, f: PiecewisePoly) -> list[QuadRat]:
        tab = refine_general(f, self.basis).as_dict()
        zero = self.seq.field.zero()
        return [tab.get(k, zero) for k in self.fine_index]

    # coarse level and wavelets ------------------------------------------------
    @cached_property
    def coarse_index(self) -> list[int]:
        """Indices m of theta*Lambda knots: theta*lambda_m is a node inside the window."""
        out = []
        th = self.theta
        m = 0
        while self.seq.i_min <= m <= self.seq.i_max and th * self.seq.node(m) >= self.seq.node(self.lo):
            m -= 1
        m += 1
        while m <= self.seq.i_max and th * self.seq.node(m) <= self.seq.node(self.hi):
            out.append(m)
            m += 1
        return out

    @cached_property
    def coarse_functions(self) -> list[tuple[BasisId, PiecewisePoly]]:
        ms = self.coarse_index
        out = []
        for m in ms[: max(len(ms) - self.s, 0)]:
            f = coarse_bspline(self.seq, m, self.s, self.theta)
            out.append((BasisId("phi", self.seq.word(m, self.s), m), f))
        return out

    @cached_property
    def wavelet_functions(self) -> list[tuple[BasisId, PiecewisePoly]]:
        s2 = 2 * self.s
        cache: dict[str, PiecewisePoly] = {}
        out = []
        for n in compute_E(self.seq, self.theta, self.lo, self.hi):
            try:
                plan = support_plan(self.seq, n, s2, self.theta)
            except SequenceTooShortError:
                continue
            if plan.end > self.hi:
                continue
            z = cache.get(plan.word)
            if z is None:
                z = build_zeta(build_Psi(self.seq, plan, self.theta), self.s)
                z = z.shift(-z.knots[0])
                cache[plan.word] = z
            out.append((BasisId("zeta", plan.word, n), z.shift(self.seq.node(n))))
        return out

    @cached_property
    def change_of_basis(self) -> tuple[list[BasisId], list[list[QuadRat]]]:
        """Columns: fine coefficients of coarse, wavelet and boundary functions."""
        ids, cols = [], []
        for bid, f in self.coarse_functions + self.wavelet_functions:
            ids.append(bid)
            cols.append(self._fine_coeffs(f))
        nf = len(self.fine_index)
        g = self.fine_gram
        rows = [matvec(g, c) for c in cols]
        comp = self._condition(nullspace(rows, nf, self.seq.field))
        for i, v in enumerate(comp):
            ids.append(BasisId("boundary", "", i))
            cols.append(v)
        if len(cols) != nf:
            raise MRAError(f"basis size {len(cols)} != fine dimension {nf}")
        m = [[cols[j][i] for j in range(nf)] for i in range(nf)]
        return ids, m

    def _condition(self, vecs: list[list[QuadRat]]) -> list[list[QuadRat]]:
        """Exact G-orthogonalization (no square roots) and rescaling to unit max entry."""
        g = self.fine_gram
        out: list[list[QuadRat]] = []
        gu: list[list[QuadRat]] = []
        for v in vecs:
            for u, w in zip(out, gu):
                c = sum((a * b for a, b in zip(v, w)), self.seq.field.zero()) / sum(
                    (a * b for a, b in zip(u, w)), self.seq.field.zero())
                v = [a - c * b for a, b in zip(v, u)]
            big = max(v, key=lambda x: abs(float(x)))
            v = [x / big for x in v]
            out.append(v)
            gu.append(matvec(g, v))
        return out

    @cached_property
    def inverse_change(self) -> list[list[QuadRat]]:
        return inverse(self.change_of_basis[1])

    @cached_property
    def change_float(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.change_of_basis[1]])

    @property
    def n_boundary(self) -> int:
        return sum(1 for i in self.change_of_basis[0] if i.kind == "boundary")

    # transforms ----------------------------------------------------------
    def project(self, f: PiecewisePoly, scale: int = 0, exact: bool = True) -> CoefficientVector:
        """L2 projection of f (given in the scale-``scale`` variable) onto the fine window basis."""
        g = f if scale == 0 else PiecewisePoly(
            [x * self.theta ** scale for x in f.knots], f.dilate(self.theta ** (-scale)).pieces, f.degree)
        b = [g.inner(h) for h in self.fine_functions]
        if exact:
            vals = solve(self.fine_gram, b)
        else:
            vals = list(np.linalg.solve(self.fine_gram_float, np.array([float(v) for v in b])))
        return CoefficientVector(scale, list(self.fine_ids), vals, (self.lo, self.hi))

    def project_samples(self, xs: Sequence[float], ys: Sequence[float], scale: int = 0) -> CoefficientVector:
        """Discrete least-squares fit of sampled data (x in the scale-``scale`` variable)."""
        th = float(self.theta) ** scale
        y = np.asarray(xs, dtype=float) * th
        a = np.stack([f.eval_float(y) for f in self.fine_functions], axis=1)
        if a.shape[0] < a.shape[1]:
            raise MRAError("fewer samples than basis functions")
        vals, *_ = np.linalg.lstsq(a, np.asarray(ys, dtype=float), rcond=None)
        return CoefficientVector(scale, list(self.fine_ids), list(vals), (self.lo, self.hi))

    def decompose(self, c: CoefficientVector) -> tuple[CoefficientVector, CoefficientVector]:
        if c.window != (self.lo, self.hi):
            raise MRAError("window mismatch")
        ids, _ = self.change_of_basis
        if c.exact:
            out = matvec(self.inverse_change, c.values)
        else:
            out = list(np.linalg.solve(self.change_float, c.as_array()))
        coarse_ids = [i for i in ids if i.kind == "phi"]
        rest = [(i, v) for i, v in zip(ids, out) if i.kind != "phi"]
        coarse = CoefficientVector(c.scale - 1, coarse_ids, out[: len(coarse_ids)], c.window)
        detail = CoefficientVector(c.scale - 1, [i for i, _ in rest], [v for _, v in rest], c.window)
        return coarse, detail

    def reconstruct(self, coarse: CoefficientVector, detail: CoefficientVector) -> CoefficientVector:
        if coarse.window != (self.lo, self.hi) or detail.window != coarse.window:
            raise MRAError("window mismatch")
        if coarse.scale != detail.scale:
            raise MRAError("scale mismatch")
        v = list(coarse.values) + list(detail.values)
        if coarse.exact:
            out = matvec(self.change_of_basis[1], v)
        else:
            out = list(self.change_float @ np.array([float(x) for x in v]))
        return CoefficientVector(coarse.scale + 1, list(self.fine_ids), out, coarse.window)

    def function(self, c: CoefficientVector) -> PiecewisePoly:
        """Exact fine-level function from fine coefficients."""
        acc = None
        for v, f in zip(c.values, self.fine_functions):
            if isinstance(v, QuadRat) and v.is_zero():
                continue
            term = f.scale(v)
            acc = term if acc is None else acc + term
        if acc is None:
            return self.fine_functions[0].scale(0)
        return acc

    def relative_l2_error(self, a: CoefficientVector, b: CoefficientVector) -> float:
        g = self.fine_gram_float
        x, y = a.as_array(), b.as_array()
        d = x - y
        den = float(x @ g @ x)
        return float(np.sqrt(max(d @ g @ d, 0.0) / den)) if den > 0 else float(np.sqrt(max(d @ g @ d, 0.0)))


def random_element(win: Window, rng: np.random.Generator, lo: int = -9, hi: int = 9) -> CoefficientVector:
    """Seeded random element of the fine space with small integer coefficients."""
    fld = win.seq.field
    vals = [fld(int(rng.integers(lo, hi + 1)), int(rng.integers(lo, hi + 1))) for _ in win.fine_index]
    return CoefficientVector(0, list(win.fine_ids), vals, (win.lo, win.hi))


@dataclass(frozen=True)
class FrameBounds:
    window: tuple[int, int]
    size: int
    lower: float
    upper: float


def wavelet_gram(seq: NodeSequence, lo: int, hi: int, s: int = 2, theta: QuadRat | None = None,
                 include_coarse: bool = False) -> np.ndarray:
    """Gram matrix of unit-norm wavelets (optionally with unit-norm coarse B-splines) in the window."""
    win = Window(seq, lo, hi, s, theta)
    fns = [f for _, f in win.wavelet_functions]
    if include_coarse:
        fns = [f for _, f in win.coarse_functions] + fns
    if not fns:
        raise WindowTooSmallError("no wavelet fits in the window")
    g = _gram(fns)
    gf = np.array([[float(v) for v in row] for row in g])
    d = np.sqrt(np.diag(gf))
    return gf / np.outer(d, d)


def frame_bounds(seq: NodeSequence, window_sizes: Sequence[int], s: int = 2, theta: QuadRat | None = None,
                 include_coarse: bool = False) -> list[FrameBounds]:
    """Extreme eigenvalues of finite-section Gram matrices for windows centred at 0."""
    out = []
    for w in window_sizes:
        lo, hi = -(w // 2), w - w // 2
        g = wavelet_gram(seq, lo, hi, s, theta, include_coarse)
        ev = np.linalg.eigvalsh(g)
        out.append(FrameBounds((lo, hi), g.shape[0], float(ev[0]), float(ev[-1])))
    return out


def gram_bounds(g: np.ndarray) -> tuple[float, float]:
    ev = np.linalg.eigvalsh(np.asarray(g, dtype=float))
    return float(ev[0]), float(ev[-1])
