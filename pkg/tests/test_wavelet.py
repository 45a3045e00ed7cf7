from __future__ import annotations

import math

import pytest

from quasispline.golden import parse_expr
from quasispline.quadfield import GOLDEN
from quasispline.tiling import generate_fibonacci_chain
from quasispline.wavelet import (build_Psi, build_zeta, check_E_is_L, compute_E, enumerate_mother_words,
                                 minimal_length, mother_wavelets, overlap_counts, psi_nullity, support_plan)


@pytest.fixture(scope="module")
def long_chain():
    return generate_fibonacci_chain((-80, 80))


def test_E_is_L_sites(chain, theta):
    assert check_E_is_L(chain, theta)
    E = compute_E(chain, theta, -10, 10)
    assert all(chain.letter(n) == "L" for n in E)


def test_mother_words_s2(chain, theta):
    plans = enumerate_mother_words(chain, 2, theta)
    assert [(p.word, p.n, p.N) for p in plans] == [
        ("LLSLS", -5, 5), ("LSLSLL", -4, 6), ("LSLLS", -2, 5), ("LLSLL", 0, 5)]


@pytest.mark.parametrize("s", [2, 3, 4])
def test_mother_word_counts_and_lengths(long_chain, theta, s):
    plans = enumerate_mother_words(long_chain, s, theta)
    assert len(plans) == 2 * s
    p = minimal_length(s)
    assert p == math.ceil((2 * s - 2) * GOLDEN.beta_float) + 1
    assert {pl.N for pl in plans} <= {p, p + 1}


def test_nullspace_is_one_dimensional(chain, theta):
    for p in enumerate_mother_words(chain, 2, theta):
        assert psi_nullity(chain, p.n, p.N, 4, theta) == 1


@pytest.mark.parametrize("s", [2, 3])
def test_zeta_vanishing_moments(long_chain, theta, s):
    for mw in mother_wavelets(long_chain, s, theta):
        assert all(mw.zeta.moment(k).is_zero() for k in range(s))
        assert not mw.zeta.moment(s).is_zero()


@pytest.mark.parametrize("s", [2, 3])
def test_Psi_vanishes_on_scaled_set(long_chain, theta, s):
    for plan in enumerate_mother_words(long_chain, s, theta):
        Psi = build_Psi(long_chain, plan, theta)
        assert Psi.is_smooth(2 * s - 2)
        for k in range(plan.n, plan.end + 1):
            x = long_chain.node(k)
            if long_chain.contains_scaled(x, theta):
                assert Psi(x).is_zero()


@pytest.mark.parametrize("s", [2, 3])
def test_overlap_counts(long_chain, theta, s):
    E = compute_E(long_chain, theta, -40, 40)
    plans = [support_plan(long_chain, n, 2 * s, theta) for n in E]
    counts = overlap_counts(plans, -20, 20)
    assert set(counts.values()) <= {2 * s - 1, 2 * s}


def test_zeta_first_piece_and_u_convention(chain, theta):
    plan = enumerate_mother_words(chain, 2, theta)[0]
    zeta = build_zeta(build_Psi(chain, plan, theta), 2)
    assert zeta.pieces[0][1] == 6 and zeta.pieces[0][0] == 0
    # a different u rescales everything by a constant
    u = parse_expr("2")
    Psi_u = build_Psi(chain, plan, theta, u)
    assert Psi_u(chain.node(plan.n + 1)) == 2
    ratio = build_zeta(Psi_u, 2).pieces[1][0] / zeta.pieces[1][0]
    assert build_zeta(Psi_u, 2) == zeta.scale(ratio)


def test_scaled_norm_relation(chain, theta):
    for mw in mother_wavelets(chain, 2, theta):
        assert mw.zeta_norm_sq == mw.norm_sq * theta
