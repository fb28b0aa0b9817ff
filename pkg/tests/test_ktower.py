import dataclasses

import numpy as np
import pytest

from kgalmod.errors import ExceptionalError, TowerShapeError
from kgalmod.fpla import ModPMatrix
from kgalmod.gmod import decompose
from kgalmod.ktower import (
    NEG_INF,
    check_shapes,
    compute_exceptional,
    is_embeddable,
    tower_direct_sum,
    validate_axioms,
    zero_tower,
)
from kgalmod.lfield import LocalFieldSpec, generate_tower, standard_specs, vp

SPECS = standard_specs()


def tower(q, n=1, p=3, style="totally_ramified"):
    return generate_tower(LocalFieldSpec(p, q, n, 2, style))


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: f"p{s.p}-q{s.q}-n{s.n}-{s.style[:3]}")
def test_generated_towers_validate(spec):
    rep = validate_axioms(generate_tower(spec), strict=True)
    assert rep.passed, rep.lines()


def test_broken_inclusion_reports_witness():
    T = tower(13)
    iota = dict(T.iota)
    iota[(0, 1)] = ModPMatrix.identity(3, 2)
    rep = validate_axioms(dataclasses.replace(T, iota=iota))
    fails = [c for c in rep.failures() if c.name == "kummer.iota_side"]
    assert fails
    assert list(fails[0].witness) == list(T.a_class[0])


def test_broken_norm_compatibility_detected():
    T = tower(109, 2)
    norm = dict(T.norm)
    norm[(2, 1)] = ModPMatrix.zeros(3, 2, 2)
    rep = validate_axioms(dataclasses.replace(T, norm=norm))
    assert not rep.passed


@pytest.mark.parametrize("strict", [False, True])
def test_zero_tower_passes(strict):
    assert validate_axioms(zero_tower(3, 2, 2), strict=strict).passed


def test_report_lines_format():
    line = validate_axioms(tower(19)).lines()[0]
    assert line.startswith("PASS ")


def test_exceptional_q13_index_zero():
    r = compute_exceptional(tower(13))
    assert r.index == 0 and not r.embeddable
    assert r.a_class.tolist() == [1, 0]


def test_exceptional_q19_embeddable():
    r = compute_exceptional(tower(19))
    assert r.index == NEG_INF and r.embeddable
    assert r.index_str() == "-inf"


def test_exceptional_no_candidate():
    with pytest.raises(ExceptionalError, match="no candidate"):
        compute_exceptional(zero_tower(3, 1, 2))


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: f"p{s.p}-q{s.q}-n{s.n}-{s.style[:3]}")
def test_index_bounded_and_embeddability(spec):
    r = compute_exceptional(generate_tower(spec))
    assert r.index == NEG_INF or 0 <= r.index <= spec.n - 1
    if spec.style == "totally_ramified":
        # a cyclic p^(n+1) extension of the same kind exists iff p^(n+1) | q - 1
        assert r.embeddable == (vp(spec.q - 1, spec.p) >= spec.n + 1)
    else:
        assert r.embeddable


def test_sum_with_zero_tower_is_identity():
    T = tower(13)
    S, _ = tower_direct_sum(T, zero_tower(3, 1, 2))
    for i in range(2):
        for d in (1, 2):
            assert decompose(S.module(i, d)).multiplicities == decompose(T.module(i, d)).multiplicities


def test_sum_doubles_multiplicities():
    T = tower(13)
    S, _ = tower_direct_sum(T, T)
    base = decompose(T.module(1, 1)).multiplicities
    assert decompose(S.module(1, 1)).multiplicities == {k: 2 * v for k, v in base.items()}


def test_sum_mismatched_height():
    with pytest.raises(TowerShapeError):
        tower_direct_sum(tower(19), tower(19, 2))


def test_sum_keeps_higher_degree_axioms():
    _, rep = tower_direct_sum(tower(13), tower(19))
    # only the degree-1 Kummer sequence can break: degree 0 is shared
    assert {(c.name, c.degree) for c in rep.failures()} <= {("kummer.iota_side", 1), ("kummer.norm_side", 1)}


def test_relative_tower_shape():
    T = tower(109, 2)
    R = T.relative(1)
    check_shapes(R)
    assert R.n == 1
    assert R.sigma_at(1, 1) == T.sigma_at(2, 1).power(3)


def test_truncate_top_class():
    T = tower(109, 2)
    U = T.truncate(1)
    assert U.n == 1 and U.t == 1
    assert np.array_equal(U.top_class, T.a_class[1])


def test_is_embeddable_matches_report():
    for q in (13, 19):
        assert is_embeddable(tower(q)) == compute_exceptional(tower(q)).embeddable


def test_shape_check_rejects_missing_map():
    T = tower(19)
    sigma = dict(T.sigma)
    del sigma[(1, 2)]
    with pytest.raises(TowerShapeError):
        check_shapes(dataclasses.replace(T, sigma=sigma))
