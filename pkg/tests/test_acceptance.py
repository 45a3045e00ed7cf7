"""Acceptance criteria 1-10, one PASS/FAIL line each.

Run under pytest (lines appear in the terminal summary) or directly:
    python3 tests/test_acceptance.py
"""
from __future__ import annotations

import math
import sys
import time

import numpy as np
import pytest

from quasispline.golden import load_golden
from quasispline.haar import gram_matrix, haar_refinement, haar_v1_basis, is_identity
from quasispline.mra import CoefficientVector, Window, frame_bounds, random_element
from quasispline.quadfield import GOLDEN, field_make
from quasispline.spline import bspline_recurrence, bspline_vandermonde, normalize_integral
from quasispline.tiling import classify_words, generate_fibonacci_chain, left_ends_of_all_words
from quasispline.verify import FAIL, WARN, Report, check_scaled_norms, check_wavelet_refinement
from quasispline.wavelet import (build_Psi, compute_E, enumerate_mother_words, minimal_length, mother_wavelets,
                                 overlap_counts, support_plan)

TAU = GOLDEN.beta
THETA = TAU ** 2
DECIMAL_TOL = 1e-3
FLOAT_RT_TOL = 1e-10


def _seq(lo: int = -60, hi: int = 60):
    return generate_fibonacci_chain((lo, hi))


def criterion_1() -> tuple[bool, str]:
    ch = load_golden()["chain"]
    idx = ch["indices"]
    seq = generate_fibonacci_chain((idx[0], idx[-1] + 1))
    bad = []
    for i, k in enumerate(idx):
        x = seq.node(k)
        if seq.letter(k) != ch["letters"][i] or x != ch["values"][i] or x != ch["expansions"][i]:
            bad.append(k)
        if seq.contains_scaled(x, THETA) != ch["in_scaled_set"][i]:
            bad.append(k)
    return not bad, f"{len(idx)} points, mismatches at {bad}" if bad else f"{len(idx)} points exact"


def criterion_2() -> tuple[bool, str]:
    seq = _seq()
    wav = {m.word: m for m in mother_wavelets(seq, 2, THETA)}
    bad, cells = [], 0
    for z in load_golden()["zeta"]:
        mw = wav.get(z["word"])
        if mw is None or mw.n != z["start"] or len(mw.zeta.pieces) != len(z["k"]):
            bad.append(z["word"])
            continue
        for piece, k, q in zip(mw.zeta.pieces, z["k"], z["q"]):
            cells += 2
            if piece[1] != k or piece[0] != q:
                bad.append(z["word"])
        if mw.zeta_norm_sq != z["norm"].square:
            bad.append(f"{z['word']} norm")
        if abs(math.sqrt(float(mw.zeta_norm_sq)) - z["norm"].decimal) > DECIMAL_TOL:
            bad.append(f"{z['word']} decimal")
    return not bad, f"{cells} (k, q) cells and 4 norms" + (f"; bad: {bad}" if bad else " exact")


def criterion_3() -> tuple[bool, str]:
    seq = _seq(-40, 40)
    golden = load_golden()
    rep = Report()
    check_wavelet_refinement(rep, golden, seq)
    check_scaled_norms(rep, golden, {m.word: m for m in mother_wavelets(seq, 2, THETA)})
    fails = [c for c in rep.checks if c.status == FAIL]
    flagged_cells = [c for c in rep.checks if c.status == WARN and " cell " in c.name]
    label_flag = any(c.status == WARN and c.name.startswith("scaled norm") and "label" in c.name for c in rep.checks)
    ok = not fails and len(flagged_cells) <= 2 and label_flag
    detail = (f"{rep.count('PASS')} checks exact, {len(flagged_cells)} flagged cell(s): "
              + "; ".join(c.detail for c in flagged_cells)
              + ("; norm-label anomaly flagged" if label_flag else "; norm-label anomaly NOT flagged"))
    if fails:
        detail += "; failures: " + "; ".join(f"{c.name} ({c.detail})" for c in fails)
    return ok, detail


def criterion_4() -> tuple[bool, str]:
    seq = _seq(-80, 80)
    words = [p.word for p in enumerate_mother_words(seq, 2, THETA)]
    ok = sorted(words) == sorted(["LLSLS", "LSLSLL", "LSLLS", "LLSLL"])
    parts = [f"s=2 {words}"]
    for s in (2, 3, 4):
        plans = enumerate_mother_words(seq, s, THETA)
        p = math.ceil((2 * s - 2) * GOLDEN.beta_float) + 1
        lengths = sorted({pl.N for pl in plans})
        ok &= len(plans) == 2 * s and set(lengths) <= {p, p + 1} and minimal_length(s) == p
        parts.append(f"s={s}: {len(plans)} words, lengths {lengths}")
    return ok, "; ".join(parts)


def criterion_5() -> tuple[bool, str]:
    cases = [("minus", 1), ("minus", 2), ("minus", 3), ("plus", 3)]
    ok, n_eq = True, 0
    for family, a in cases:
        for e in haar_refinement(field_make(family, a)):
            n_eq += 1
            ok &= e.holds()
    basis = haar_v1_basis(field_make("minus", 1), 100)
    ident = is_identity(gram_matrix(basis.functions))
    return ok and ident, (f"{n_eq} refinement equations with zero residual; a=1 Gram over 100 tiles "
                          f"({len(basis.functions)} functions) {'is' if ident else 'is NOT'} the identity")


def criterion_6() -> tuple[bool, str]:
    seq = _seq(-30, 30)
    ok, count = True, 0
    for s in (2, 3, 4):
        for n in range(-20, 20):
            b = bspline_recurrence(seq, n, s)
            count += 1
            ok &= list(b.knots) == [seq.node(n + i) for i in range(s + 1)]
            ok &= len(b.knots) - 2 == s - 1
            ok &= b.integral() == (seq.node(n + s) - seq.node(n)) / s
            ok &= b.is_smooth(s - 2)
            ok &= normalize_integral(bspline_vandermonde(seq, n, s).spline) == b
    return ok, f"{count} B-splines (s = 2, 3, 4): support, integral, smoothness, Vandermonde route"


def criterion_7() -> tuple[bool, str]:
    seq = _seq(-80, 80)
    ok, parts = True, []
    for s in (2, 3):
        plans = enumerate_mother_words(seq, s, THETA)
        for mw in mother_wavelets(seq, s, THETA):
            ok &= all(mw.zeta.moment(k).is_zero() for k in range(s)) and not mw.zeta.moment(s).is_zero()
        zeros = 0
        for plan in plans:
            Psi = build_Psi(seq, plan, THETA)
            for k in range(plan.n, plan.end + 1):
                x = seq.node(k)
                if seq.contains_scaled(x, THETA):
                    zeros += 1
                    ok &= Psi(x).is_zero()
        all_plans = [support_plan(seq, n, 2 * s, THETA) for n in compute_E(seq, THETA, -50, 50)]
        counts = set(overlap_counts(all_plans, -30, 30).values())
        ok &= counts <= {2 * s - 1, 2 * s}
        parts.append(f"s={s}: moments ok, {zeros} theta-node zeros, overlaps {sorted(counts)}")
    return ok, "; ".join(parts)


def criterion_8() -> tuple[bool, str]:
    n_max, window = 2000, 5000
    lo = -window // 2
    seq = generate_fibonacci_chain((lo, lo + window + n_max))
    A, B = seq.integer_coords()
    # prefix counts of L for the direct tally
    is_l = np.array([c == "L" for c in seq.letters], dtype=np.int64)
    pref = np.concatenate([[0], np.cumsum(is_l)])
    starts = np.arange(window)
    inv_tau = 1 / GOLDEN.beta_float
    ok = True
    for n in range(1, n_max + 1):
        dA = A[starts + n] - A[starts]
        dB = B[starts + n] - B[starts]
        direct_l = pref[starts + n] - pref[starts]
        # tau^2 (dA + dB tau - n/tau) with n/tau = n(tau - 1): p + q tau, p = dA + n, q = dB - n
        p, q = dA + n, dB - n
        formula_rational = np.all(p + 2 * q == 0)
        formula_l = p + q
        lo_l, hi_l = math.floor(n * inv_tau), math.ceil(n * inv_tau)
        ok &= bool(formula_rational and np.array_equal(formula_l, direct_l)
                   and np.all((direct_l == lo_l) | (direct_l == hi_l)))
        if not ok:
            return False, f"letter counts disagree at n = {n}"
    small = _seq(-60, 60)
    for n in range(1, 51):
        cls = classify_words(small, n)
        ends = left_ends_of_all_words(small, n)
        ok &= len(cls) == n + 1 and len({small.word(k, n) for k in ends}) == n + 1
    return ok, f"letter counts for n <= {n_max} at {window} starts; n+1 words and left ends for n <= 50"


def criterion_9() -> tuple[bool, str]:
    seq = _seq(-40, 40)
    win = Window(seq, -30, 30, 2, THETA)
    rng = np.random.default_rng(20260101)
    exact_ok, worst = 0, 0.0
    for _ in range(100):
        c = random_element(win, rng)
        coarse, detail = win.decompose(c)
        exact_ok += win.reconstruct(coarse, detail).values == c.values
        cf = CoefficientVector(0, c.ids, [float(v) for v in c.values], c.window)
        fc, fd = win.decompose(cf)
        worst = max(worst, win.relative_l2_error(cf, win.reconstruct(fc, fd)))
    ok = exact_ok == 100 and worst <= FLOAT_RT_TOL
    return ok, f"exact {exact_ok}/100, worst float relative L2 error {worst:.2e} (window {win.n_boundary} boundary fns)"


def criterion_10() -> tuple[bool, str]:
    seq = _seq(-60, 60)
    by_window = frame_bounds(seq, [20, 40, 80], 2, THETA)
    b40, b80 = by_window[1], by_window[2]
    rel_lo = abs(b80.lower - b40.lower) / b40.lower
    rel_hi = abs(b80.upper - b40.upper) / b40.upper
    ok = all(b.lower > 1e-3 for b in by_window) and rel_lo < 0.2 and rel_hi < 0.2
    vals = ", ".join(f"{w}: [{b.lower:.4f}, {b.upper:.4f}]" for w, b in zip((20, 40, 80), by_window))
    return ok, f"lambda_min/max {vals}; 40->80 change {rel_lo:.1%} / {rel_hi:.1%}"


CRITERIA = {
    1: ("chain reproduction", criterion_1),
    2: ("wavelet piece tables and norms", criterion_2),
    3: ("wavelet refinement table and scaled norms", criterion_3),
    4: ("mother words", criterion_4),
    5: ("Haar identities", criterion_5),
    6: ("B-spline contract", criterion_6),
    7: ("wavelet structure", criterion_7),
    8: ("word combinatorics", criterion_8),
    9: ("round-trip transform", criterion_9),
    10: ("frame-bound sanity", criterion_10),
}


def _line(k: int, ok: bool, detail: str, seconds: float) -> str:
    return f"{'PASS' if ok else 'FAIL'} criterion {k} {CRITERIA[k][0]}: {detail} ({seconds:.1f}s)"


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k):
    t0 = time.perf_counter()
    ok, detail = CRITERIA[k][1]()
    line = _line(k, ok, detail, time.perf_counter() - t0)
    try:
        from conftest import ACCEPTANCE_LINES
        ACCEPTANCE_LINES[k] = line
    except ImportError:
        pass
    print(line)
    assert ok, line


if __name__ == "__main__":
    failed = 0
    for k in sorted(CRITERIA):
        t0 = time.perf_counter()
        ok, detail = CRITERIA[k][1]()
        failed += not ok
        print(_line(k, ok, detail, time.perf_counter() - t0), flush=True)
    sys.exit(1 if failed else 0)
