from __future__ import annotations

import pytest

from quasispline.haar import (SurdSum, StepFn, gram_matrix, gram_schmidt, haar_orthonormal_wavelets,
                              haar_refinement, haar_riesz_wavelets, haar_scaling, haar_v1_basis, is_identity,
                              orthonormal_generating_sets)
from quasispline.quadfield import field_make

FIELDS = [("minus", 1), ("minus", 2), ("minus", 3), ("plus", 3), ("plus", 4)]
IDS = [f"{f}{a}" for f, a in FIELDS]


@pytest.mark.parametrize("family, a", FIELDS, ids=IDS)
def test_scaling_functions_unit_norm(family, a):
    hs = haar_scaling(field_make(family, a))
    assert hs.phi_L.norm_sq() == 1
    assert hs.phi_S.norm_sq() == 1
    assert hs.phi_L.inner(hs.phi_S.translate(hs.len_L)).is_zero()


@pytest.mark.parametrize("family, a", FIELDS, ids=IDS)
def test_refinement_equations(family, a):
    eqs = haar_refinement(field_make(family, a))
    assert eqs
    for e in eqs:
        assert e.holds(), e.label


@pytest.mark.parametrize("family, a", FIELDS, ids=IDS)
def test_orthonormal_wavelets(family, a):
    fld = field_make(family, a)
    gens = orthonormal_generating_sets(fld)
    wav = haar_orthonormal_wavelets(fld)
    assert len(wav) == sum(len(g) - 1 for g in gens.values())
    hs = haar_scaling(fld)
    for w in wav:
        assert w.fn.norm_sq() == 1
        host = hs.phi_L if w.tile == "L" else hs.phi_S
        assert w.fn.inner(host).is_zero()


@pytest.mark.parametrize("family, a", FIELDS, ids=IDS)
def test_small_window_gram_identity(family, a):
    basis = haar_v1_basis(field_make(family, a), 12)
    assert is_identity(gram_matrix(basis.functions))


def test_riesz_normalizers_agree():
    for family, a in FIELDS:
        rw = haar_riesz_wavelets(field_make(family, a))
        assert rw.normalizer_agrees
        assert rw.psi_LS.norm_sq() == 1


def test_riesz_system_is_well_conditioned():
    fld = field_make("minus", 2)
    basis = haar_v1_basis(fld, 10, variant="riesz")
    g = gram_matrix(basis.functions)
    gf = [[float(v) for v in row] for row in g]
    import numpy as np

    ev = np.linalg.eigvalsh(np.array(gf))
    assert ev[0] > 1e-3


def test_gram_schmidt_orthonormal():
    fld = field_make("minus", 1)
    hs = haar_scaling(fld)
    one = fld.one()
    fns = [hs.phi_L, StepFn.indicator(fld.zero(), one / 2), StepFn.indicator(one / 3, one)]
    ortho = gram_schmidt(fns)
    assert is_identity(gram_matrix(ortho))


def test_surdsum_arithmetic():
    fld = field_make("minus", 1)
    x = SurdSum.of(fld.beta)
    assert (x - x).is_zero()
    assert (x * x).rational() == fld.beta ** 2
