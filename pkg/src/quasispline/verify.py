"""Recompute the reference tables and compare them cell by cell with the shipped golden data."""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

from .golden import load_golden
from .quadfield import GOLDEN
from .refine import scaling_equations, wavelet_scaling_equations
from .tiling import generate_fibonacci_chain
from .wavelet import enumerate_mother_words, mother_wavelets

PASS, WARN, FAIL = "PASS", "WARN", "FAIL"
MAX_FLAGGED_CELLS = 2


@dataclass
class Check:
    name: str
    status: str
    detail: str = ""


@dataclass
class Report:
    checks: list[Check] = dc_field(default_factory=list)

    def add(self, name: str, ok: bool, detail: str = "", warn: bool = False):
        status = PASS if ok else (WARN if warn else FAIL)
        self.checks.append(Check(name, status, detail))

    def count(self, status: str) -> int:
        return sum(1 for c in self.checks if c.status == status)

    def passed(self, strict: bool = False) -> bool:
        bad = {FAIL, WARN} if strict else {FAIL}
        return not any(c.status in bad for c in self.checks)

    def lines(self) -> list[str]:
        return [f"{c.status} {c.name}" + (f": {c.detail}" if c.detail else "") for c in self.checks]

    def to_json(self) -> dict:
        return {
            "summary": {s: self.count(s) for s in (PASS, WARN, FAIL)},
            "checks": [{"name": c.name, "status": c.status, "detail": c.detail} for c in self.checks],
        }


def _fmt(x) -> str:
    return x.format("t")


def check_chain(rep: Report, golden: dict):
    ch = golden["chain"]
    idx = ch["indices"]
    seq = generate_fibonacci_chain((idx[0], idx[-1] + 1))
    theta = GOLDEN.beta ** 2
    for i, k in enumerate(idx):
        x = seq.node(k)
        rep.add(f"chain letter {k}", seq.letter(k) == ch["letters"][i], f"{seq.letter(k)} vs {ch['letters'][i]}")
        rep.add(f"chain expansion {k}", x == ch["expansions"][i], f"{_fmt(x)} vs {_fmt(ch['expansions'][i])}")
        rep.add(f"chain value {k}", x == ch["values"][i], f"{_fmt(x)} vs {_fmt(ch['values'][i])}")
        flag = seq.contains_scaled(x, theta)
        rep.add(f"chain scaled-set flag {k}", flag == ch["in_scaled_set"][i])


def check_mother_words(rep: Report, golden: dict, seq):
    mw = golden["mother_words"]
    theta = GOLDEN.beta ** 2
    plans = enumerate_mother_words(seq, mw["s"], theta)
    got = [(p.word, p.n) for p in plans]
    want = list(zip(mw["words"], mw["starts"]))
    rep.add("mother words", sorted(got) == sorted(want), f"{got} vs {want}")


def check_zeta(rep: Report, golden: dict, wavelets: dict):
    for z in golden["zeta"]:
        mw = wavelets.get(z["word"])
        if mw is None or mw.n != z["start"]:
            rep.add(f"zeta {z['word']} present", False, "not constructed at the expected start")
            continue
        pieces = mw.zeta.pieces
        rep.add(f"zeta {z['word']} piece count", len(pieces) == len(z["k"]), f"{len(pieces)} vs {len(z['k'])}")
        for i, (k, q) in enumerate(zip(z["k"], z["q"])):
            if i >= len(pieces):
                break
            ci = pieces[i]
            rep.add(f"zeta {z['word']} k[{i}]", ci[1] == k, f"{_fmt(ci[1])} vs {_fmt(k)}")
            rep.add(f"zeta {z['word']} q[{i}]", ci[0] == q, f"{_fmt(ci[0])} vs {_fmt(q)}")
        nsq = mw.zeta_norm_sq
        rep.add(f"zeta {z['word']} norm (exact)", nsq == z["norm"].square, f"{_fmt(nsq)} vs {_fmt(z['norm'].square)}")
        val = math.sqrt(float(nsq))
        rep.add(f"zeta {z['word']} norm (decimal)", abs(val - z["norm"].decimal) <= 1e-3,
                f"{val:.6f} vs {z['norm'].decimal}")


def check_scaling_equations(rep: Report, golden: dict, seq):
    eqs = scaling_equations(seq, 2)
    for e in golden["scaling_equations"]:
        tab = eqs.get(e["word"])
        if tab is None:
            rep.add(f"scaling equation {e['word']}", False, "missing")
            continue
        got = {(t.word, t.node): t.coeff for t in tab.terms}
        want = {(w, node): c for w, node, c in e["terms"]}
        ok = got == want
        rep.add(f"scaling equation {e['word']}", ok,
                "" if ok else f"{sorted((k[0], _fmt(k[1]), _fmt(v)) for k, v in got.items())}")


def check_wavelet_refinement(rep: Report, golden: dict, seq):
    eqs = {e.wavelet.n: e for e in wavelet_scaling_equations(seq, 2)}
    rows = dict((idx, basis) for basis, idx in golden["wavelet_refinement"]["rows"])
    flagged = 0
    for col in golden["wavelet_refinement"]["columns"]:
        e = eqs.get(col["start"])
        if e is None:
            rep.add(f"refinement column @{col['start']}", False, "no wavelet starts there")
            continue
        word = e.wavelet.word
        rep.add(f"refinement column @{col['start']} label", col["printed_label"] == word,
                f"printed {col['printed_label']}, recomputed {word}", warn=True)
        got = e.table.as_dict()
        for t in e.table.terms:
            if rows.get(t.index) not in (None, t.word):
                rep.add(f"refinement row {t.index} basis", False, f"{t.word} vs {rows.get(t.index)}")
        for idx in sorted(set(got) | set(col["cells"])):
            g = got.get(idx)
            w = col["cells"].get(idx)
            name = f"refinement {word}@{col['start']} cell {idx}"
            if g is not None and w is not None and g == w:
                rep.add(name, True)
                continue
            flagged += 1
            detail = (f"printed {col['cell_text'].get(idx, '(empty)')}, "
                      f"recomputed {_fmt(g) if g is not None else '(empty)'}")
            rep.add(name, False, detail, warn=flagged <= MAX_FLAGGED_CELLS)


def check_scaled_norms(rep: Report, golden: dict, wavelets: dict):
    for i, d in enumerate(golden["scaled_norms"]):
        ref = d["norm"]
        match = [w for w in wavelets.values() if w.norm_sq == ref.square]
        name = f"scaled norm #{i + 1}"
        if not match:
            rep.add(name, False, f"no wavelet has squared norm {_fmt(ref.square)}")
            continue
        mw = match[0]
        val = math.sqrt(float(mw.norm_sq))
        rep.add(f"{name} (exact)", True, mw.word)
        rep.add(f"{name} (decimal)", abs(val - ref.decimal) <= 1e-3, f"{val:.4f} vs {ref.decimal}")
        rep.add(f"{name} label", d["printed_label"] == mw.word,
                f"printed {d['printed_label']}, matched by value to {mw.word}", warn=True)


def run_verification(golden_path=None) -> Report:
    golden = load_golden(golden_path)
    rep = Report()
    seq = generate_fibonacci_chain((-40, 40))
    check_chain(rep, golden)
    check_mother_words(rep, golden, seq)
    wavelets = {m.word: m for m in mother_wavelets(seq, 2)}
    check_zeta(rep, golden, wavelets)
    check_scaling_equations(rep, golden, seq)
    check_wavelet_refinement(rep, golden, seq)
    check_scaled_norms(rep, golden, wavelets)
    return rep
