from __future__ import annotations

import pytest

from quasispline.refine import (FineBasis, NotInSpanError, coarse_bspline, refine_general, refine_linear,
                                scaling_equations, refinement_table, two_scale_check, wavelet_scaling_equations)
from quasispline.spline import bspline_recurrence


def test_linear_and_general_agree(chain, theta):
    lin = scaling_equations(chain, 2, theta, method="linear")
    gen = scaling_equations(chain, 2, theta, method="general")
    assert {w: t.as_dict() for w, t in lin.items()} == {w: t.as_dict() for w, t in gen.items()}


def test_scaling_equation_LL(chain, theta):
    # phi_LL(x/theta) on theta*Lambda knots: hat with nodal values at the fine nodes
    eqs = scaling_equations(chain, 2, theta)
    tab = eqs["LL"]
    target = coarse_bspline(chain, next(c for c in range(-2, 1) if chain.word(c, 2) == "LL"), 2, theta)
    for term in tab.terms:
        assert term.coeff == target(chain.node(term.index + 1))


@pytest.mark.parametrize("s", [2, 3])
def test_general_reproduces_coarse(chain, theta, s):
    basis = FineBasis(chain, s)
    for k in range(-3, 2):
        tab = refine_general(coarse_bspline(chain, k, s, theta), basis)
        assert all(not t.coeff.is_zero() for t in tab.terms)


def test_wavelet_equations_linear_vs_general(chain, theta):
    a = wavelet_scaling_equations(chain, 2, theta, method="linear")
    b = wavelet_scaling_equations(chain, 2, theta, method="general")
    assert [e.table.as_dict() for e in a] == [e.table.as_dict() for e in b]
    tab = refinement_table(b)
    assert len(tab["columns"]) == 4
    assert len(tab["rows"]) == 9


def test_two_scale_composition(chain, theta):
    for k in (-2, 0, 1):
        assert two_scale_check(chain, k, 2, theta)


def test_not_in_span(chain):
    basis = FineBasis(chain, 2)
    cubic = bspline_recurrence(chain, 0, 4)
    with pytest.raises(NotInSpanError):
        refine_general(cubic, basis)
    with pytest.raises(NotInSpanError):
        refine_linear(bspline_recurrence(chain, 0, 1), basis)
