"""Interpolating spline wavelets on a self-similar node sequence."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .linalg import RankError, nullspace
from .quadfield import GOLDEN, QuadRat
from .spline import PiecewisePoly, SplineError
from .tiling import NodeSequence, SequenceTooShortError, TilingError


class WaveletError(ValueError):
    pass


def default_theta(seq: NodeSequence) -> QuadRat:
    if seq.field != GOLDEN:
        raise WaveletError("no default inflation factor for this field; pass theta")
    return GOLDEN.beta ** 2


def compute_E(seq: NodeSequence, theta: QuadRat, lo: int | None = None, hi: int | None = None) -> list[int]:
    """Indices n with lambda_{n+1} outside theta * Lambda."""
    lo = seq.i_min if lo is None else max(lo, seq.i_min)
    hi = seq.i_max - 1 if hi is None else min(hi, seq.i_max - 1)
    return [n for n in range(lo, hi + 1) if not seq.contains_scaled(seq.node(n + 1), theta)]


def check_E_is_L(seq: NodeSequence, theta: QuadRat) -> bool:
    """On the Fibonacci chain with theta = tau^2, E coincides with the left ends of L tiles."""
    e = set(compute_E(seq, theta))
    ls = {k for k in range(seq.i_min, seq.i_max) if seq.letter(k) == "L"}
    return e == ls


@dataclass(frozen=True)
class WaveletSupportPlan:
    n: int
    N: int
    word: str
    theta_points_inside: tuple[int, ...]
    s2: int

    @property
    def end(self) -> int:
        return self.n + self.N


def _theta_inside(seq: NodeSequence, n: int, N: int, theta: QuadRat) -> list[int]:
    return [k for k in range(n + 1, n + N) if seq.contains_scaled(seq.node(k), theta)]


def support_plan(seq: NodeSequence, n: int, s2: int, theta: QuadRat) -> WaveletSupportPlan:
    """Smallest N >= s2 with N = s2 + #(theta*Lambda inside (lambda_n, lambda_{n+N}))."""
    if seq.contains_scaled(seq.node(n + 1), theta):
        raise WaveletError(f"{n} is not in E")
    N = s2
    while True:
        if n + N > seq.i_max:
            raise SequenceTooShortError(f"support of wavelet at {n} leaves the sequence")
        inside = _theta_inside(seq, n, N, theta)
        if N == s2 + len(inside):
            return WaveletSupportPlan(n, N, seq.word(n, N), tuple(inside), s2)
        N += 1


def enumerate_mother_words(seq: NodeSequence, s: int, theta: QuadRat) -> list[WaveletSupportPlan]:
    """One plan per distinct support word, represented by the rightmost start index <= 0.

    Words are collected over every admissible start in the sequence.
    """
    s2 = 2 * s
    plans: dict[str, WaveletSupportPlan] = {}
    for n in compute_E(seq, theta):
        try:
            p = support_plan(seq, n, s2, theta)
        except SequenceTooShortError:
            continue
        cur = plans.get(p.word)
        if cur is None or (cur.n < p.n <= 0) or (cur.n > 0 and p.n < cur.n):
            plans[p.word] = p
    if not plans:
        raise SequenceTooShortError("no complete wavelet support inside the sequence")
    return sorted(plans.values(), key=lambda p: p.n)


def _deriv_at(t: QuadRat, ncoef: int, r: int) -> list[QuadRat]:
    """Row giving the r-th derivative at local coordinate t of sum c_j t^j."""
    one = t.field.one()
    zero = t.field.zero()
    row = []
    for j in range(ncoef):
        if j < r:
            row.append(zero)
        else:
            row.append(math.perm(j, r) * t ** (j - r) if j > r else math.factorial(r) * one)
    return row


@dataclass(frozen=True)
class PsiSystem:
    rows: list
    labels: list
    ncols: int


def psi_system(seq: NodeSequence, n: int, N: int, s2: int, theta: QuadRat) -> PsiSystem:
    """Homogeneous constraints on the N*s2 local coefficients of an order-s2 spline on [lambda_n, lambda_{n+N}]."""
    if n < seq.i_min or n + N > seq.i_max:
        raise SequenceTooShortError("support outside sequence")
    fld = seq.field
    zero = fld.zero()
    ncols = N * s2
    rows, labels = [], []

    def put(piece: int, coeffs: list[QuadRat], sign: int = 1, row: list | None = None):
        row = row if row is not None else [zero] * ncols
        for j, c in enumerate(coeffs):
            row[piece * s2 + j] = row[piece * s2 + j] + (c if sign > 0 else -c)
        return row

    h = [seq.node(n + i + 1) - seq.node(n + i) for i in range(N)]
    for i in range(1, N):
        for r in range(s2 - 1):
            row = put(i - 1, _deriv_at(h[i - 1], s2, r))
            put(i, _deriv_at(zero, s2, r), -1, row)
            rows.append(row)
            labels.append(f"smooth d{r} at node {n + i}")
    for r in range(s2 - 1):
        rows.append(put(0, _deriv_at(zero, s2, r)))
        labels.append(f"vanish d{r} at node {n}")
    for r in range(s2 - 1):
        rows.append(put(N - 1, _deriv_at(h[-1], s2, r)))
        labels.append(f"vanish d{r} at node {n + N}")
    for k in _theta_inside(seq, n, N, theta):
        rows.append(put(k - n, _deriv_at(zero, s2, 0)))
        labels.append(f"zero at node {k}")
    return PsiSystem(rows, labels, ncols)


def psi_nullity(seq: NodeSequence, n: int, N: int, s2: int, theta: QuadRat) -> int:
    sysm = psi_system(seq, n, N, s2, theta)
    return len(nullspace(sysm.rows, sysm.ncols, seq.field))


def build_Psi(seq: NodeSequence, plan: WaveletSupportPlan, theta: QuadRat, u: QuadRat | None = None) -> PiecewisePoly:
    """The order-s2 interpolating spline on the planned support.

    Without ``u`` the scale is fixed by a unit leading coefficient on the first piece;
    with ``u`` the value at lambda_{n+1} is set to u.
    """
    s2, n, N = plan.s2, plan.n, plan.N
    sysm = psi_system(seq, n, N, s2, theta)
    basis = nullspace(sysm.rows, sysm.ncols, seq.field)
    if len(basis) != 1:
        raise RankError(
            f"solution space of dimension {len(basis)} (expected 1) for support {n}..{n + N}",
            sysm.ncols - len(basis), sysm.ncols - 1, sysm.labels,
        )
    v = basis[0]
    pieces = [v[i * s2 : (i + 1) * s2] for i in range(N)]
    knots = [seq.node(n + i) for i in range(N + 1)]
    raw = PiecewisePoly(knots, pieces, s2 - 1, n)
    if u is None:
        lead = pieces[0][-1]
        if lead.is_zero():
            raise WaveletError("first piece has no leading term")
        return raw.scale(lead.inv())
    if u.is_zero():
        raise WaveletError("u must be nonzero")
    at = raw(seq.node(n + 1))
    if at.is_zero():
        raise WaveletError("interpolation node is a zero of the spline")
    return raw.scale(u / at)


def build_zeta(Psi: PiecewisePoly, s: int) -> PiecewisePoly:
    if Psi.degree != 2 * s - 1:
        raise WaveletError(f"expected degree {2 * s - 1}, got {Psi.degree}")
    return Psi.differentiate(s)


@dataclass(frozen=True)
class MotherWavelet:
    word: str
    n: int
    s: int
    zeta: PiecewisePoly  # centred at lambda_n = 0
    psi_unnormalized: PiecewisePoly  # zeta(theta x)
    norm_sq: QuadRat  # ||zeta(theta x)||^2
    theta: QuadRat

    @property
    def zeta_norm_sq(self) -> QuadRat:
        return self.norm_sq * self.theta

    def psi_float(self, x):
        return self.psi_unnormalized.eval_float(x) / math.sqrt(float(self.norm_sq))


def build_psi(zeta: PiecewisePoly, theta: QuadRat, word: str = "", n: int = 0, s: int = 0) -> MotherWavelet:
    if zeta.is_zero():
        raise WaveletError("zero wavelet")
    z0 = zeta.shift(-zeta.knots[0])
    scaled = z0.dilate(theta)
    return MotherWavelet(word, n, s, z0, scaled, scaled.norm_sq(), theta)


def mother_wavelets(seq: NodeSequence, s: int, theta: QuadRat | None = None) -> list[MotherWavelet]:
    theta = theta if theta is not None else default_theta(seq)
    out = []
    for plan in enumerate_mother_words(seq, s, theta):
        zeta = build_zeta(build_Psi(seq, plan, theta), s)
        out.append(build_psi(zeta, theta, plan.word, plan.n, s))
    return out


def overlap_counts(plans: Iterable[WaveletSupportPlan], lo: int, hi: int) -> dict[int, int]:
    """For each interval [lambda_m, lambda_{m+1}], m in [lo, hi), the number of supports covering it."""
    counts = {m: 0 for m in range(lo, hi)}
    for p in plans:
        for m in range(max(p.n, lo), min(p.end, hi)):
            counts[m] += 1
    return counts


def minimal_length(s: int) -> int:
    """p = ceil((2s-2) tau) + 1 for the Fibonacci chain."""
    tau = GOLDEN.beta
    return math.ceil((2 * s - 2) * tau) + 1


def table_rows(mw: MotherWavelet, seq: NodeSequence, symbol: str = "tau") -> list[dict]:
    """Per-interval (k_i, q_i) of zeta, with zeta = k_i (x - lambda_i) + q_i in the linear case."""
    rows = []
    z = mw.zeta
    for i, c in enumerate(z.pieces):
        rows.append({
            "word": mw.word,
            "interval": [mw.n + i, mw.n + i + 1],
            "coefficients": [x.format(symbol) for x in c],
            "k": c[1].format(symbol) if len(c) > 1 else None,
            "q": c[0].format(symbol),
        })
    return rows
