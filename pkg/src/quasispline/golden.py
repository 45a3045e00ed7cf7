"""Reference data shipped with the package and a tiny exact expression parser for it."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .quadfield import GOLDEN, FieldSpec, QuadRat


class GoldenDataError(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:(\d+)|(t)|([-+*/^()]))")


def _tokenize(text: str) -> list[str]:
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise GoldenDataError(f"bad character at {pos} in {text!r}")
        out.append(m.group(m.lastindex))
        pos = m.end()
    return out


class _Parser:
    """expr := term (('+'|'-') term)*; term := unary (('*'|'/'|implicit) unary)*;
    unary := '-' unary | power; power := atom ('^' int)?; atom := int | t | '(' expr ')'."""

    def __init__(self, text: str, fld: FieldSpec):
        self.toks = _tokenize(text)
        self.i = 0
        self.fld = fld
        self.text = text

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expect=None):
        tok = self.peek()
        if tok is None or (expect is not None and tok != expect):
            raise GoldenDataError(f"expected {expect or 'token'} in {self.text!r}")
        self.i += 1
        return tok

    def parse(self) -> QuadRat:
        v = self.expr()
        if self.peek() is not None:
            raise GoldenDataError(f"trailing input in {self.text!r}")
        return v

    def expr(self):
        v = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()
            w = self.term()
            v = v + w if op == "+" else v - w
        return v

    def term(self):
        v = self.unary()
        while True:
            tok = self.peek()
            if tok == "*":
                self.take()
                v = v * self.unary()
            elif tok == "/":
                self.take()
                v = v / self.unary()
            elif tok is not None and (tok == "(" or tok == "t" or tok.isdigit()):
                v = v * self.unary()
            else:
                return v

    def unary(self):
        if self.peek() == "-":
            self.take()
            return -self.unary()
        return self.power()

    def power(self):
        v = self.atom()
        if self.peek() == "^":
            self.take()
            exp = self.take()
            if not exp.isdigit():
                raise GoldenDataError(f"integer exponent expected in {self.text!r}")
            v = v ** int(exp)
        return v

    def atom(self):
        tok = self.take()
        if tok.isdigit():
            return self.fld(int(tok))
        if tok == "t":
            return self.fld.beta
        if tok == "(":
            v = self.expr()
            self.take(")")
            return v
        raise GoldenDataError(f"unexpected {tok!r} in {self.text!r}")


def parse_expr(text: str, fld: FieldSpec = GOLDEN) -> QuadRat:
    """Evaluate an arithmetic expression in t (the field generator), e.g. '-6(1+26t)/11'."""
    return _Parser(text, fld).parse()


@dataclass(frozen=True)
class NormSpec:
    coeff: QuadRat
    radicand: QuadRat
    decimal: float

    @property
    def square(self) -> QuadRat:
        return self.coeff * self.coeff * self.radicand

    @classmethod
    def from_json(cls, d: dict) -> NormSpec:
        return cls(parse_expr(d["coeff"]), parse_expr(d["radicand"]), float(d["decimal"]))


def load_golden(path: str | Path | None = None) -> dict:
    """Load and validate the reference data; every expression is parsed eagerly."""
    try:
        if path is None:
            text = resources.files("quasispline").joinpath("data/golden.json").read_text(encoding="utf-8")
        else:
            text = Path(path).read_text(encoding="utf-8")
        raw = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise GoldenDataError(f"cannot read reference data: {exc}") from exc
    try:
        ch = raw["chain"]
        chain = {
            "indices": [int(i) for i in ch["indices"]],
            "letters": str(ch["letters"]),
            "expansions": [parse_expr(e) for e in ch["expansions"]],
            "values": [parse_expr(e) for e in ch["values"]],
            "in_scaled_set": [bool(b) for b in ch["in_scaled_set"]],
        }
        n = len(chain["indices"])
        if not all(len(chain[k]) == n for k in ("letters", "expansions", "values", "in_scaled_set")):
            raise GoldenDataError("chain rows have different lengths")
        zeta = [
            {
                "word": z["word"], "start": int(z["start"]),
                "k": [parse_expr(e) for e in z["k"]], "q": [parse_expr(e) for e in z["q"]],
                "norm": NormSpec.from_json(z["norm"]),
            }
            for z in raw["zeta"]
        ]
        scaling = [
            {
                "word": e["word"], "start": int(e["start"]),
                "terms": [(t["basis"], parse_expr(t["node"]), parse_expr(t["coeff"])) for t in e["terms"]],
            }
            for e in raw["scaling_equations"]
        ]
        wr = raw["wavelet_refinement"]
        refinement = {
            "rows": [(r["basis"], int(r["index"])) for r in wr["rows"]],
            "columns": [
                {"printed_label": c["printed_label"], "start": int(c["start"]),
                 "cells": {int(k): parse_expr(v) for k, v in c["cells"].items()},
                 "cell_text": {int(k): v for k, v in c["cells"].items()}}
                for c in wr["columns"]
            ],
        }
        scaled_norms = [
            {"printed_label": d["printed_label"], "norm": NormSpec.from_json(d)} for d in raw["scaled_norms"]
        ]
        mw = raw["mother_words"]
        mother = {"s": int(mw["s"]), "words": list(mw["words"]), "starts": [int(x) for x in mw["starts"]]}
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, GoldenDataError):
            raise
        raise GoldenDataError(f"malformed reference data: {exc!r}") from exc
    return {"chain": chain, "zeta": zeta, "scaling_equations": scaling, "wavelet_refinement": refinement,
            "scaled_norms": scaled_norms, "mother_words": mother}
