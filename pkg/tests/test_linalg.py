from __future__ import annotations

import pytest

from quasispline.linalg import SingularSystemError, inverse, matvec, nullspace, rank, solve
from quasispline.quadfield import GOLDEN

t = GOLDEN.beta
one, zero = GOLDEN.one(), GOLDEN.zero()


def test_solve_and_inverse():
    a = [[t, one], [one, -t]]
    b = [one, zero]
    x = solve(a, b)
    assert matvec(a, x) == b
    ai = inverse(a)
    prod = [[sum((a[i][k] * ai[k][j] for k in range(2)), zero) for j in range(2)] for i in range(2)]
    assert prod == [[one, zero], [zero, one]]


def test_singular():
    with pytest.raises(SingularSystemError):
        solve([[one, t], [t, t + 1]], [one, one])


def test_nullspace_and_rank():
    rows = [[one, t, t + 1]]
    ns = nullspace(rows, 3, GOLDEN)
    assert len(ns) == 2
    for v in ns:
        assert matvec(rows, v) == [zero]
    assert rank([[one, t], [t, t + 1]]) == 1
