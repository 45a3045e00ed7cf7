from __future__ import annotations

import pytest

from quasispline.quadfield import GOLDEN, field_make
from quasispline.tiling import (NotABetaIntegerError, SequenceTooShortError, beta_substitution,
                                classify_words, cut_and_project, default_window, fibonacci_by_substitution,
                                fibonacci_node, fibonacci_substitution, generate_beta_integers,
                                generate_fibonacci_chain, greedy_beta_digits, is_beta_integer,
                                left_ends_of_all_words, model_set_by_sieving, model_set_by_substitution,
                                rescale, chain_rows, word_letter_counts)

t = GOLDEN.beta


def test_fibonacci_node_formula():
    assert fibonacci_node(0) == 0
    assert fibonacci_node(1) == 1
    assert fibonacci_node(3) == 1 + t
    assert fibonacci_node(-2) == -t


def test_chain_letters_and_lengths(chain):
    assert chain.word(-5, 11) == "LLSLSLLSLLS"
    for k in range(-20, 20):
        gap = chain.node(k + 1) - chain.node(k)
        assert gap == (1 if chain.letter(k) == "L" else t - 1)


def test_chain_is_model_set(chain):
    w = default_window()
    for k in range(-30, 30):
        assert w.contains(chain.node(k).conjugate())
    pts = cut_and_project(w, chain.node(-10), chain.node(10))
    assert pts == [chain.node(k) for k in range(-10, 11)]


def test_chain_rows(chain):
    rows = chain_rows(chain, -5, 5)
    assert [r["in_theta_lambda"] for r in rows] == [True, False, False, True, False, True,
                                                    False, False, True, False, False]
    assert rows[0]["expansion"] == "-1000"


def test_substitution_route_matches_chain(chain):
    sub = fibonacci_by_substitution(40, 40)
    for k in range(-30, 30):
        assert sub.node(k) == chain.node(k)


def test_substitution_rules():
    rule = fibonacci_substitution()
    # tau^2 inflation of the chain
    assert rule.apply("L") == "LLS"
    assert rule.apply("S") == "LS"
    assert rule.is_consistent()
    for fld in [field_make("minus", 1), field_make("minus", 2), field_make("plus", 3)]:
        assert beta_substitution(fld).is_consistent()


@pytest.mark.parametrize("a", [1, 2, 3])
def test_model_set_routes_agree(a):
    fld = field_make("minus", a)
    sub = model_set_by_substitution(fld, 6, 6)
    bound = min(-sub[0], sub[-1])
    sieve = model_set_by_sieving(fld, bound, 30)
    assert [x for x in sub if abs(x) <= bound] == [x for x in sieve if abs(x) <= bound]


def test_beta_integers_minus1():
    z = generate_beta_integers(GOLDEN, 8)
    assert [z.node(k) for k in range(6)] == [0, 1, t, t + 1, t + 2, 2 * t + 1]
    assert z.word(0, 8) == "LSLLSLSL"
    for k in z.indices():
        assert is_beta_integer(z.node(k))


def test_beta_integers_symmetric():
    z = generate_beta_integers(GOLDEN, 5, symmetric=True)
    for k in range(0, 5):
        assert z.node(-k) == -z.node(k)


def test_greedy_digits():
    assert greedy_beta_digits(t + 1) == "100"
    assert greedy_beta_digits(GOLDEN(2), frac_digits=4) == "10.01"
    with pytest.raises(NotABetaIntegerError):
        greedy_beta_digits(GOLDEN(2))


@pytest.mark.parametrize("n, count", [(1, 2), (2, 3), (4, 5)])
def test_classify_words_counts(chain, n, count):
    cls = classify_words(chain, n)
    assert len(cls) == count
    if n == 2:
        assert [c.word for c in cls] == ["LL", "LS", "SL"]


def test_classify_words_windows_partition(chain):
    cls = classify_words(chain, 3)
    for c in cls:
        lo, hi = c.window
        for k in c.indices:
            if -40 <= k <= 40:
                y = chain.node(k).conjugate()
                assert lo <= y < hi


def test_left_ends(chain):
    assert left_ends_of_all_words(chain, 2) == [-2, -1, 0]
    assert len({chain.word(k, 5) for k in left_ends_of_all_words(chain, 5)}) == 6


def test_letter_counts(chain):
    assert word_letter_counts(chain, 0, 5) == (4, 1)
    assert word_letter_counts(chain, 0, 1) == (1, 0)
    assert word_letter_counts(chain, -3, 3) == (1, 2)


def test_too_short():
    seq = generate_fibonacci_chain((0, 3))
    with pytest.raises(SequenceTooShortError):
        classify_words(seq, 5)
    with pytest.raises(IndexError):
        seq.node(10)


def test_rescale_is_self_similar(chain, theta):
    big = rescale(chain, theta)
    for k in range(-10, 10):
        assert chain.contains(big.node(k))
