from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from quasispline.quadfield import GOLDEN
from quasispline.spline import (PiecewisePoly, SupportError, bspline_recurrence, bspline_vandermonde, indicator,
                                normalize_integral, scaling_classes, vandermonde_residuals, vandermonde_weights)

t = GOLDEN.beta
one, zero = GOLDEN.one(), GOLDEN.zero()


def test_indicator_is_order1_bspline(chain):
    b = bspline_recurrence(chain, 0, 1)
    assert b == indicator(chain.node(0), chain.node(1))
    assert b(chain.node(0)) == 1
    assert b(chain.node(1)) == 0


def test_hat_LL(chain):
    cls = {c.word: c for c in scaling_classes(chain, 2)}
    f = cls["LL"].function
    assert f(zero) == 0 and f(one) == 1 and f(GOLDEN(2)) == 0
    assert f(GOLDEN(Fraction(1, 2))) == Fraction(1, 2)
    assert f(GOLDEN(Fraction(3, 2))) == Fraction(1, 2)
    assert f.integral() == 1


def test_hat_SL_and_LS(chain):
    cls = {c.word: c for c in scaling_classes(chain, 2)}
    sl = cls["SL"].function
    # rises over an S gap (1/tau), falls over an L gap (1)
    assert list(sl.knots) == [zero, t.inv(), t.inv() + 1]
    assert sl(t.inv()) == 1
    assert cls["LS"].function.integral() == t / 2


@pytest.mark.parametrize("s, count", [(2, 3), (3, 4), (4, 5)])
def test_class_counts(chain, s, count):
    assert len(scaling_classes(chain, s)) == count


def test_vandermonde_uniform():
    nodes = [zero, one, GOLDEN(2)]
    w = vandermonde_weights(nodes)
    assert w == [Fraction(1, 4), Fraction(-1, 2), Fraction(1, 4)]
    assert all(r.is_zero() for r in vandermonde_residuals(nodes, w))
    assert sum((a * x * x for a, x in zip(w, nodes)), zero) == Fraction(1, 2)


@pytest.mark.parametrize("s", [1, 2, 3, 4])
def test_recurrence_matches_vandermonde(chain, s):
    for n in range(-6, 6):
        b = bspline_recurrence(chain, n, s)
        v = bspline_vandermonde(chain, n, s)
        assert normalize_integral(v.spline) == b


@pytest.mark.parametrize("s", [2, 3, 4])
def test_partition_of_unity(chain, s):
    x = chain.node(0) + GOLDEN(Fraction(1, 3))
    total = sum((bspline_recurrence(chain, n, s)(x) for n in range(-s - 1, 2)), zero)
    assert total == 1


@pytest.mark.parametrize("s", [2, 3, 4])
def test_bspline_contract(chain, s):
    for n in range(-8, 8):
        b = bspline_recurrence(chain, n, s)
        assert list(b.knots) == [chain.node(n + i) for i in range(s + 1)]
        assert b.integral() == (chain.node(n + s) - chain.node(n)) / s
        assert b.is_smooth(s - 2)
        assert not b.is_smooth(s - 1)
        assert b.is_positive_inside()


def test_calculus_roundtrip(chain):
    b = bspline_recurrence(chain, 0, 3)
    d = b.differentiate()
    assert d.antidifferentiate() == b
    assert d.integral() == 0
    assert PiecewisePoly([zero, one], [[GOLDEN(3)]]).differentiate().is_zero()


def test_antidifferentiate_rejects_noncompact():
    with pytest.raises(SupportError):
        indicator(zero, one).antidifferentiate(check_compact=True)


def test_dilate_and_shift(chain, theta):
    b = bspline_recurrence(chain, 0, 2)
    d = b.dilate(theta)
    x = GOLDEN(Fraction(1, 5))
    assert d(x) == b(theta * x)
    assert b.shift(t)(x + t) == b(x)
    assert b.mirror()(-x) == b(x)


def test_json_roundtrip(chain):
    b = bspline_recurrence(chain, -3, 3)
    assert PiecewisePoly.from_json(b.to_json()) == b


def test_eval_float_matches_exact(chain):
    b = bspline_recurrence(chain, -2, 3)
    xs = [chain.node(-2) + GOLDEN(Fraction(k, 7)) for k in range(20)]
    ys = b.eval_float([float(x) for x in xs])
    for x, y in zip(xs, ys):
        assert abs(float(b(x)) - y) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=3, max_size=3))
def test_inner_product_bilinear(coeffs):
    fs = [indicator(zero, one), indicator(one, t + 1), indicator(GOLDEN(Fraction(1, 2)), t)]
    f = fs[0].scale(coeffs[0]) + fs[1].scale(coeffs[1])
    g = fs[2]
    assert f.inner(g) == fs[0].inner(g) * coeffs[0] + fs[1].inner(g) * coeffs[1]
    assert f.norm_sq() == f.inner(f)
