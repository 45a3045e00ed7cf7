"""Exact Gauss-Jordan elimination over Q(beta)."""
from __future__ import annotations

from typing import Sequence

from .quadfield import FieldSpec, QuadRat


class SingularSystemError(ArithmeticError):
    """The linear system has no solution or no unique solution."""


class RankError(SingularSystemError):
    def __init__(self, msg: str, rank: int, expected: int, constraints: list[str] | None = None):
        super().__init__(msg)
        self.rank = rank
        self.expected = expected
        self.constraints = constraints or []


def rref(rows: Sequence[Sequence[QuadRat]], ncols: int | None = None) -> tuple[list[list[QuadRat]], list[int]]:
    """Reduced row echelon form; pivots chosen as the first nonzero entry (no magnitude pivoting)."""
    m = [list(r) for r in rows]
    if not m:
        return m, []
    ncols = len(m[0]) if ncols is None else ncols
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if not m[i][c].is_zero()), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = m[r][c].inv()
        row = [v * inv if not v.is_zero() else v for v in m[r]]
        m[r] = row
        nz = [j for j in range(c, len(row)) if not row[j].is_zero()]
        for i in range(len(m)):
            if i == r:
                continue
            f = m[i][c]
            if f.is_zero():
                continue
            mi = m[i]
            for j in nz:
                mi[j] = mi[j] - f * row[j]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows: Sequence[Sequence[QuadRat]]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence[QuadRat]], ncols: int, field: FieldSpec) -> list[list[QuadRat]]:
    """Basis of the right nullspace, one vector per free column (free entry set to 1)."""
    if not rows:
        return [[field.one() if i == j else field.zero() for i in range(ncols)] for j in range(ncols)]
    red, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [field.zero()] * ncols
        v[fc] = field.one()
        for i, pc in enumerate(pivots):
            v[pc] = -red[i][fc]
        basis.append(v)
    return basis


def solve(a: Sequence[Sequence[QuadRat]], b: Sequence[QuadRat]) -> list[QuadRat]:
    """Unique solution of a possibly overdetermined but consistent system."""
    n = len(a[0])
    aug = [list(row) + [bi] for row, bi in zip(a, b)]
    red, pivots = rref(aug, n + 1)
    if n in pivots:
        raise SingularSystemError("inconsistent system")
    if len(pivots) < n:
        raise RankError("underdetermined system", len(pivots), n)
    return [red[i][n] for i in range(n)]


def inverse(a: Sequence[Sequence[QuadRat]]) -> list[list[QuadRat]]:
    n = len(a)
    fld = a[0][0].field
    aug = [list(row) + [fld.one() if i == j else fld.zero() for j in range(n)] for i, row in enumerate(a)]
    red, pivots = rref(aug, n)
    if pivots != list(range(n)):
        raise SingularSystemError("matrix is singular")
    return [row[n:] for row in red]


def matvec(a: Sequence[Sequence[QuadRat]], v: Sequence[QuadRat]) -> list[QuadRat]:
    out = []
    for row in a:
        acc = None
        for x, y in zip(row, v):
            if x.is_zero() or y.is_zero():
                continue
            acc = x * y if acc is None else acc + x * y
        out.append(acc if acc is not None else v[0].field.zero())
    return out
