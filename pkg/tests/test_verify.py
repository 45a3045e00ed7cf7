from __future__ import annotations

import json
from importlib import resources

import pytest

from quasispline.golden import GoldenDataError, load_golden, parse_expr
from quasispline.quadfield import GOLDEN
from quasispline.verify import FAIL, PASS, WARN, run_verification

t = GOLDEN.beta


@pytest.mark.parametrize("text, value", [
    ("6", GOLDEN(6)),
    ("-6(1+26t)/11", -6 * (1 + 26 * t) / 11),
    ("12(18+17t)/11", 12 * (18 + 17 * t) / 11),
    ("t^2", t + 1),
    ("-(2+t)", -(2 + t)),
    ("3 4", GOLDEN(12)),
])
def test_parse_expr(text, value):
    assert parse_expr(text) == value


@pytest.mark.parametrize("bad", ["", "6(", "x", "t^t", "1+"])
def test_parse_expr_errors(bad):
    with pytest.raises(GoldenDataError):
        parse_expr(bad)


def test_load_golden_shipped():
    g = load_golden()
    assert g["chain"]["indices"] == list(range(-5, 6))
    assert len(g["zeta"]) == 4


def test_load_golden_malformed(tmp_path):
    raw = json.loads(resources.files("quasispline").joinpath("data/golden.json").read_text())
    del raw["zeta"]
    p = tmp_path / "g.json"
    p.write_text(json.dumps(raw))
    with pytest.raises(GoldenDataError):
        load_golden(p)
    p.write_text("{")
    with pytest.raises(GoldenDataError):
        load_golden(p)


def test_run_verification():
    rep = run_verification()
    assert rep.count(FAIL) == 0
    assert rep.passed()
    assert not rep.passed(strict=True)
    warns = [c.name for c in rep.checks if c.status == WARN]
    assert len(warns) == 4
    assert sum(1 for c in rep.checks if c.status == WARN and " cell " in c.name) <= 2
    assert rep.count(PASS) > 100


def test_tampered_cell_fails(tmp_path):
    raw = json.loads(resources.files("quasispline").joinpath("data/golden.json").read_text())
    raw["zeta"][0]["q"][1] = "7"
    p = tmp_path / "g.json"
    p.write_text(json.dumps(raw))
    rep = run_verification(p)
    assert rep.count(FAIL) == 1
