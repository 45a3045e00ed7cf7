"""Command-line interface: generate, wavelets, verify, sample."""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path

from .golden import GoldenDataError, parse_expr
from .quadfield import GOLDEN, FieldError, field_make
from .refine import scaling_equations, refinement_table, wavelet_scaling_equations
from .spline import scaling_classes
from .tiling import TilingError, generate_beta_integers, generate_fibonacci_chain, greedy_beta_digits, chain_rows
from .wavelet import (WaveletError, build_Psi, build_psi, build_zeta, enumerate_mother_words, table_rows)

EXIT_OK, EXIT_VERIFY_FAILED, EXIT_CONFIG, EXIT_COMPUTE = 0, 1, 2, 3
OUTDIR_ENV = "QUASISPLINE_OUTDIR"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    family: str = "minus"
    a: int = 1
    set_kind: str = "fibonacci"
    s: int = 2
    index_range: tuple[int, int] = (-5, 5)
    letters: int = 8
    symmetric: bool = False
    u: str | None = None
    fmt: str = "text"
    density: int = 100
    emit: str = "summary"
    function: str = ""
    strict: bool = False
    golden: str | None = None

    def validate(self) -> RunConfig:
        if self.set_kind not in ("fibonacci", "beta"):
            raise ConfigError(f"unknown set {self.set_kind!r}")
        try:
            field_make(self.family, self.a)
        except (FieldError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        if self.s < 1:
            raise ConfigError("s must be >= 1")
        if self.letters < 0:
            raise ConfigError("letters must be >= 0")
        if self.density < 1:
            raise ConfigError("density must be >= 1")
        if self.fmt not in ("json", "csv", "text"):
            raise ConfigError(f"unknown format {self.fmt!r}")
        return self

    def to_json(self) -> dict:
        d = asdict(self)
        d["index_range"] = list(self.index_range)
        return d


def parse_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split("..")
        return int(lo), int(hi)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"range must look like -5..5, got {text!r}") from exc


def _csv(rows: list[list], header: list[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _symbol(cfg: RunConfig) -> str:
    # canonical generator symbol in machine-readable exports
    return "tau" if cfg.fmt == "text" else "b"


def _meta(cfg: RunConfig, timestamp: bool) -> dict:
    meta = {"config": cfg.to_json()}
    if timestamp:
        meta["timestamp"] = datetime.now(timezone.utc).isoformat()
    return meta


# generate ---------------------------------------------------------------------
def cmd_generate(cfg: RunConfig, timestamp: bool) -> str:
    header = ["index", "letter", "expansion", "value", "float", "in_scaled_set"]
    if cfg.set_kind == "fibonacci":
        lo, hi = cfg.index_range
        if hi < lo:
            rows = []
        else:
            seq = generate_fibonacci_chain((lo, hi + 1))
            rows = chain_rows(seq, lo, hi, symbol=_symbol(cfg))
            for r in rows:
                r["in_scaled_set"] = r.pop("in_theta_lambda")
    else:
        fld = field_make(cfg.family, cfg.a)
        rows = []
        if cfg.letters > 0:
            seq = generate_beta_integers(fld, cfg.letters, symmetric=cfg.symmetric)
            for k in seq.indices():
                x = seq.node(k)
                sign = "-" if x.sign() < 0 else ""
                rows.append({
                    "index": k,
                    "letter": seq.letter(k) if k < seq.i_max else None,
                    "expansion": sign + greedy_beta_digits(abs(x), fld),
                    "value": x.format("beta" if cfg.fmt == "text" else "b"),
                    "float": float(x),
                    "in_scaled_set": None,
                })
    if cfg.fmt == "json":
        return _json({"meta": _meta(cfg, timestamp), "points": rows})
    table = [[r["index"], r["letter"] or "", r["expansion"], r["value"], repr(r["float"]),
              "" if r["in_scaled_set"] is None else ("yes" if r["in_scaled_set"] else "no")] for r in rows]
    if cfg.fmt == "csv":
        return _csv(table, header)
    return "\n".join("\t".join(str(c) for c in row) for row in [header] + table) + "\n"


# wavelets ---------------------------------------------------------------------
def _fib_seq(cfg: RunConfig, margin: int = 0):
    if cfg.set_kind != "fibonacci":
        raise ConfigError("wavelet systems are available for the Fibonacci chain only")
    reach = 10 * cfg.s + 20 + margin
    return generate_fibonacci_chain((-reach, reach))


def _wavelet_system(cfg: RunConfig):
    seq = _fib_seq(cfg)
    theta = GOLDEN.beta ** 2
    u = parse_expr(cfg.u) if cfg.u is not None else None
    out = []
    for plan in enumerate_mother_words(seq, cfg.s, theta):
        Psi = build_Psi(seq, plan, theta, u)
        zeta = build_zeta(Psi, cfg.s)
        out.append((plan, Psi, build_psi(zeta, theta, plan.word, plan.n, cfg.s)))
    return seq, out


def cmd_wavelets(cfg: RunConfig, timestamp: bool) -> str:
    if cfg.emit == "refinement":
        if cfg.s != 2 or cfg.u is not None:
            raise ConfigError("refinement export uses s = 2 and the default scale convention")
        seq = _fib_seq(cfg)
        rt = refinement_table(wavelet_scaling_equations(seq, 2), _symbol(cfg))
        if cfg.fmt == "json":
            return _json({"meta": _meta(cfg, timestamp), "table": rt,
                          "scaling_equations": {w: t.to_json("b") for w, t in scaling_equations(seq, 2).items()}})
        rows = [[r["basis"], r["index"]] + r["cells"] for r in rt["rows"]]
        header = ["basis", "index"] + rt["columns"]
        if cfg.fmt == "csv":
            return _csv(rows, header)
        lines = ["\t".join(header)] + ["\t".join(str(c) for c in r) for r in rows]
        lines.append("\t".join(["norm", ""] + [f"{n:.4f}" for n in rt["norms"]]))
        return "\n".join(lines) + "\n"

    seq, system = _wavelet_system(cfg)
    sym = _symbol(cfg)
    if cfg.emit == "tables":
        rows = []
        for plan, _, mw in system:
            for r in table_rows(mw, seq, sym):
                rows.append([mw.word, plan.n, seq.word(r["interval"][0], 1), r["interval"][0], r["k"] or "", r["q"]])
        if cfg.fmt == "json":
            return _json({"meta": _meta(cfg, timestamp), "wavelets": [
                {"word": mw.word, "start": plan.n, "pieces": table_rows(mw, seq, sym),
                 "norm_sq": mw.zeta_norm_sq.format(sym), "norm": float(mw.zeta_norm_sq) ** 0.5}
                for plan, _, mw in system]})
        header = ["word", "start", "tile", "interval_start", "k", "q"]
        if cfg.fmt == "csv":
            return _csv(rows, header)
        lines = ["\t".join(header)] + ["\t".join(str(c) for c in r) for r in rows]
        for plan, _, mw in system:
            lines.append(f"norm {mw.word}\t{mw.zeta_norm_sq.format('tau')}\t{float(mw.zeta_norm_sq) ** 0.5:.4f}")
        return "\n".join(lines) + "\n"
    if cfg.emit != "summary":
        raise ConfigError(f"unknown emit mode {cfg.emit!r}")
    classes = scaling_classes(seq, cfg.s)
    summary = {
        "s": cfg.s,
        "scaling_classes": [c.word for c in classes],
        "wavelets": [
            {"word": mw.word, "start": plan.n, "support_length": plan.N,
             "norm_sq": mw.zeta_norm_sq.format(sym), "scaled_norm_sq": mw.norm_sq.format(sym),
             "scaled_norm": float(mw.norm_sq) ** 0.5}
            for plan, _, mw in system
        ],
    }
    if cfg.fmt == "json":
        return _json({"meta": _meta(cfg, timestamp), **summary})
    rows = [[w["word"], w["start"], w["support_length"], w["norm_sq"], f"{w['scaled_norm']:.4f}"]
            for w in summary["wavelets"]]
    header = ["word", "start", "support_length", "norm_sq", "scaled_norm"]
    if cfg.fmt == "csv":
        return _csv(rows, header)
    lines = [f"scaling classes: {' '.join(summary['scaling_classes'])}",
             f"wavelets: {len(rows)}", "\t".join(header)]
    lines += ["\t".join(str(c) for c in r) for r in rows]
    return "\n".join(lines) + "\n"


# sample -----------------------------------------------------------------------
def cmd_sample(cfg: RunConfig, timestamp: bool) -> str:
    kind, _, word = cfg.function.partition(":")
    if kind not in ("phi", "zeta", "psi", "Psi") or not word:
        raise ConfigError("function must be phi:WORD, zeta:WORD, psi:WORD or Psi:WORD")
    if kind == "phi":
        seq = _fib_seq(cfg)
        cls = {c.word: c for c in scaling_classes(seq, cfg.s)}
        if word not in cls:
            raise ConfigError(f"no scaling class {word!r}; have {sorted(cls)}")
        f = cls[word].at(seq, cls[word].representative_index)
        fn, x0, x1 = f.eval_float, float(f.knots[0]), float(f.knots[-1])
    else:
        _, system = _wavelet_system(cfg)
        match = [(p, P, m) for p, P, m in system if m.word == word]
        if not match:
            raise ConfigError(f"no mother wavelet {word!r}; have {[m.word for _, _, m in system]}")
        plan, Psi, mw = match[0]
        if kind == "Psi":
            f = Psi
            fn = f.eval_float
        elif kind == "zeta":
            f = mw.zeta.shift(Psi.knots[0])
            fn = f.eval_float
        else:
            f = mw.psi_unnormalized.shift(Psi.knots[0] / mw.theta)
            norm = float(mw.norm_sq) ** 0.5
            fn = lambda x: f.eval_float(x) / norm  # noqa: E731
        x0, x1 = float(f.knots[0]), float(f.knots[-1])
    import numpy as np

    n = max(int(round((x1 - x0) * cfg.density)), 1)
    xs = np.linspace(x0, x1, n + 1)
    ys = fn(xs)
    rows = [[repr(float(x)), repr(float(y))] for x, y in zip(xs, ys)]
    if cfg.fmt == "json":
        return _json({"meta": _meta(cfg, timestamp), "samples": [[float(x), float(y)] for x, y in zip(xs, ys)]})
    return _csv(rows, ["x", "y"])


# verify -----------------------------------------------------------------------
def cmd_verify(cfg: RunConfig, timestamp: bool) -> tuple[str, int]:
    from .verify import run_verification

    rep = run_verification(cfg.golden)
    ok = rep.passed(strict=cfg.strict)
    if cfg.fmt == "json":
        text = _json({"meta": _meta(cfg, timestamp), **rep.to_json(), "ok": ok})
    else:
        lines = rep.lines()
        lines.append(f"summary: {rep.count('PASS')} pass, {rep.count('WARN')} warn, {rep.count('FAIL')} fail"
                     + (" (strict)" if cfg.strict else ""))
        text = "\n".join(lines) + "\n"
    return text, EXIT_OK if ok else EXIT_VERIFY_FAILED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quasispline", description="Spline and Haar wavelets on aperiodic point sets.")
    p.add_argument("--timestamp", action="store_true", help="add a timestamp to JSON metadata")
    p.add_argument("--output", "-o", help=f"write to this file (relative paths resolve under ${OUTDIR_ENV})")
    # the same options after the subcommand; SUPPRESS keeps the top-level values when absent
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--timestamp", action="store_true", default=argparse.SUPPRESS)
    shared.add_argument("--output", "-o", default=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt_default="text"):
        sp.add_argument("--format", dest="fmt", default=fmt_default, choices=["json", "csv", "text"])
        sp.add_argument("--set", dest="set_kind", default="fibonacci", choices=["fibonacci", "beta"])
        sp.add_argument("--family", default="minus", choices=["minus", "plus"])
        sp.add_argument("--a", type=int, default=1)

    g = sub.add_parser("generate", parents=[shared], help="export a node sequence")
    common(g, "csv")
    g.add_argument("--range", dest="index_range", type=parse_range, default=(-5, 5))
    g.add_argument("--letters", type=int, default=8)
    g.add_argument("--symmetric", action="store_true")

    w = sub.add_parser("wavelets", parents=[shared], help="build the spline wavelet system")
    common(w)
    w.add_argument("--s", type=int, default=2)
    w.add_argument("--emit", default="summary", choices=["summary", "tables", "refinement"])
    w.add_argument("--u", help="fix Psi(lambda_{n+1}) = u instead of a unit leading coefficient")

    v = sub.add_parser("verify", parents=[shared], help="compare recomputed tables with the reference data")
    v.add_argument("--format", dest="fmt", default="text", choices=["json", "text"])
    v.add_argument("--strict", action="store_true", help="treat warnings as failures")
    v.add_argument("--golden", help="alternative reference data file")

    s = sub.add_parser("sample", parents=[shared], help="dense samples of one function for plotting")
    common(s, "csv")
    s.add_argument("--s", type=int, default=2)
    s.add_argument("--function", required=True, help="phi:WORD, zeta:WORD, psi:WORD or Psi:WORD")
    s.add_argument("--density", type=int, default=100, help="points per unit length")
    s.add_argument("--u")
    return p


def _config(ns: argparse.Namespace) -> RunConfig:
    keys = RunConfig.__dataclass_fields__
    kw = {k: getattr(ns, k) for k in keys if hasattr(ns, k) and getattr(ns, k) is not None}
    return RunConfig(**kw).validate()


def _write(text: str, output: str | None):
    if output is None:
        sys.stdout.write(text)
        return
    path = Path(output)
    if not path.is_absolute() and os.environ.get(OUTDIR_ENV):
        path = Path(os.environ[OUTDIR_ENV]) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _join_range(argv: list[str]) -> list[str]:
    # "--range -5..5" would otherwise be read as an option
    out, i = [], 0
    while i < len(argv):
        if argv[i] == "--range" and i + 1 < len(argv):
            out.append(f"--range={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(_join_range(list(sys.argv[1:] if argv is None else argv)))
    try:
        cfg = _config(ns)
        code = EXIT_OK
        if cfg.command == "generate":
            text = cmd_generate(cfg, ns.timestamp)
        elif cfg.command == "wavelets":
            text = cmd_wavelets(cfg, ns.timestamp)
        elif cfg.command == "sample":
            text = cmd_sample(cfg, ns.timestamp)
        else:
            text, code = cmd_verify(cfg, ns.timestamp)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GoldenDataError as exc:
        print(f"reference data error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except (TilingError, WaveletError, ArithmeticError, ValueError) as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    _write(text, ns.output)
    return code


if __name__ == "__main__":
    sys.exit(main())
