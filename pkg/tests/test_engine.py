import dataclasses
import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kgalmod.engine import (
    build_gamma,
    check_fixed_elements_are_norms,
    construct_theorem2,
    dimension_gap_check,
    fixed_norms_exhaustive,
    gamma_results,
    h_length,
    lift_fixed_element,
    verify_theorem1,
)
from kgalmod.errors import LiftError, NotEmbeddableError, TowerShapeError
from kgalmod.fpla import ModPMatrix, Subspace, enumerate_space
from kgalmod.gmod import cyclic_span, jordan_sigma, make_module
from kgalmod.ktower import compute_exceptional, tower_direct_sum
from kgalmod.lfield import LocalFieldSpec, generate_tower, standard_specs

TOWERS = {(s.p, s.q, s.n, s.style): generate_tower(s) for s in standard_specs()}
EMBEDDABLE = [k for k, T in TOWERS.items() if compute_exceptional(T).embeddable]


def tower(q, n=1, p=3, style="totally_ramified"):
    return TOWERS[(p, q, n, style)]


def brute_length(T, i, d, v):
    th = T.sigma_at(i, d) - ModPMatrix.identity(T.p, T.dim(i, d))
    v = np.asarray(v) % T.p
    ell = 0
    while v.any():
        v = th @ v
        ell += 1
    return ell


def fixed_space(T, i, d):
    return Subspace.kernel(T.sigma_at(i, d) - ModPMatrix.identity(T.p, T.dim(i, d)))


def module_span(T, i, d, gens):
    return cyclic_span(T.module(i, d), gens) if gens else Subspace.zero(T.p, T.dim(i, d))


# -- coarse decomposition ---------------------------------------------------


@pytest.mark.parametrize("q, expected", [(13, {2: 1}), (19, {1: 2})])
def test_theorem1_examples(q, expected):
    rep = verify_theorem1(tower(q), 1)
    assert rep.multiplicities == expected
    assert rep.passed


def test_gap_checker_flags_block_seven():
    m = make_module(3, 2, jordan_sigma(3, [7, 2]))
    assert dimension_gap_check(m) == [7]


@given(st.lists(st.sampled_from([k for k in TOWERS if k[0] == 3 and k[2] == 2]), min_size=1, max_size=3), st.sampled_from([1, 2]))
def test_theorem1_on_sums(keys, d):
    S = TOWERS[keys[0]]
    for k in keys[1:]:
        S, _ = tower_direct_sum(S, TOWERS[k])
    rep = verify_theorem1(S, d)
    assert rep.passed
    top = S.p**S.n
    assert all(k == top or k <= 2 * S.p ** (S.n - 1) for k in rep.multiplicities)


# -- Gamma -----------------------------------------------------------------


@pytest.mark.parametrize("key", EMBEDDABLE[:4])
def test_gamma_degree_one_is_everything(key):
    T = TOWERS[key]
    g = build_gamma(T, T.n, 1)
    assert g.gamma == Subspace.full(T.p, 1)


def test_gamma_q13_complements_uniformizer():
    T = tower(13)
    g = build_gamma(T, 1, 2)
    assert g.gamma.dim == 1
    norm_image = Subspace.span(3, 2, [[1, 0]])
    assert Subspace.column_space(T.norm_at(1, 1)) == norm_image
    assert (g.gamma & norm_image).dim == 0
    assert g.passed


def test_gamma_recursion_q109():
    T = tower(109, 2)
    rep = construct_theorem2(T, 2)
    gams = gamma_results(rep)
    assert len(gams) >= 2
    assert all(g.passed for g in gams)


@pytest.mark.parametrize("key", EMBEDDABLE)
def test_gamma_clauses_independently(key):
    T = TOWERS[key]
    p = T.p
    for d in (1, 2):
        for g in gamma_results(construct_theorem2(T, d, check=False)):
            i, e = g.level, g.degree - 1
            if e == 0:
                continue
            norm_image = Subspace.column_space(T.norm_at(i, e))
            # direct complement of the norm image
            assert (g.gamma & norm_image).dim == 0
            assert g.gamma + norm_image == Subspace.full(p, T.dim(i - 1, e))
            # lengths and level of origin
            for z, j in g.generators():
                assert brute_length(T, i - 1, e, z) == p**j
                assert Subspace.column_space(T.iota_comp(j, i - 1, e)).contains(Subspace.span(p, T.dim(i - 1, e), [z]))
            # cup with a is injective on Gamma
            cup = T.cup_a_at(i - 1, e + 1)
            assert g.gamma.image(cup).dim == g.gamma.dim
            assert g.gamma.image(cup) == Subspace.column_space(cup)
            hyp, fails = fixed_norms_exhaustive(T, g)
            assert fails == 0


# -- fine decomposition ----------------------------------------------------


def test_theorem2_q19():
    rep = construct_theorem2(tower(19), 1)
    assert [x.tolist() for x in rep.X[0]] == [[1, 0]]
    assert [y.tolist() for y in rep.Y[0]] == [[0, 1]]
    assert rep.Y[1] == []
    assert rep.multiplicities == {1: 2}
    assert rep.passed


@pytest.mark.parametrize("d", [1, 2])
def test_theorem2_q109(d):
    assert construct_theorem2(tower(109, 2), d).passed


def test_theorem2_not_embeddable():
    with pytest.raises(NotEmbeddableError, match="tower not embeddable"):
        construct_theorem2(tower(13), 1)


def test_theorem2_needs_top_cup():
    T = dataclasses.replace(tower(19), cup_an=None)
    with pytest.raises(TowerShapeError):
        construct_theorem2(T, 1)


@pytest.mark.parametrize("key", EMBEDDABLE)
@pytest.mark.parametrize("d", [1, 2])
def test_theorem2_independently(key, d):
    T = TOWERS[key]
    p, n = T.p, T.n
    rep = construct_theorem2(T, d, check=False)
    gens = [(g, i) for parts in (rep.X, rep.Y) for i, gs in enumerate(parts) for g in gs]
    for g, i in gens:
        assert brute_length(T, n, d, g) == p**i
    spans = [module_span(T, n, d, [g]) for g, _ in gens]
    total = Subspace.zero(p, T.dim(n, d))
    for s in spans:
        total = total + s
    assert total == Subspace.full(p, T.dim(n, d))
    assert sum(s.dim for s in spans) == T.dim(n, d)
    fixed = fixed_space(T, n, d)
    for i in range(n + 1):
        tail = module_span(T, n, d, [g for j in range(i, n + 1) for g in rep.Y[j]])
        target = Subspace.column_space(T.iota_comp(0, n, d) @ T.norm_comp(i, 0, d))
        assert tail & fixed == target
    for i, xs in enumerate(rep.X):
        image = Subspace.column_space(T.cup_an[d] @ T.iota_comp(i, n, d - 1)) if d > 1 else Subspace.column_space(T.cup_an[d])
        for x in xs:
            assert image.contains(Subspace.span(p, T.dim(n, d), [x]))


# -- lifting and norms -----------------------------------------------------


def test_lift_zero():
    assert not lift_fixed_element(tower(13), 0, 1, [0, 0]).any()


def test_lift_unit_class():
    x = lift_fixed_element(tower(13), 0, 1, [0, 1])
    assert x.tolist() == [0, 1]
    assert brute_length(tower(13), 0, 1, x) == 1


def test_lift_corrupted_tower():
    T = tower(13)
    bad = dataclasses.replace(T, iota={k: v * 0 for k, v in T.iota.items()})
    with pytest.raises(LiftError, match="no lift: axiom violation"):
        lift_fixed_element(bad, 0, 1, [0, 1])


def test_lift_rejects_unfixed():
    with pytest.raises(ValueError):
        lift_fixed_element(tower(13), 0, 1, [1, 0])


@pytest.mark.parametrize("key", list(TOWERS))
def test_lifts_exhaustive(key):
    T = TOWERS[key]
    n, p = T.n, T.p
    for d in (1, 2):
        for g in enumerate_space(p, T.dim(n, d)):
            if (T.norm_at(n, d) @ g).any():
                continue
            for i in range(n + 1):
                if ((T.sigma_at(n, d).power(p**i) @ g - g) % p).any():
                    continue
                x = lift_fixed_element(T, i, d, g)
                assert np.array_equal(T.iota_comp(i, n, d) @ x, g % p)
                assert brute_length(T, i, d, x) == brute_length(T, n, d, g)


def test_scan_q19_height_two():
    rep = check_fixed_elements_are_norms(tower(19, 2), 1, 0)
    assert rep.mode == "exhaustive" and rep.total == 9
    assert rep.passed


def test_scan_vacuous_counted():
    # not embeddable: the hypothesis fails for short classes with nonzero norm
    rep = check_fixed_elements_are_norms(tower(13), 1, 0)
    assert not rep.embeddable
    assert rep.vacuous > 0
    assert rep.passed


def test_scan_on_sum_of_q13():
    S, _ = tower_direct_sum(tower(13), tower(13))
    assert S.dim(1, 1) == 4
    assert check_fixed_elements_are_norms(S, 1, 0).passed


def test_scan_sampling_deterministic():
    T = tower(109, 2)
    a = check_fixed_elements_are_norms(T, 1, 1, gammas=[[1, 0], [0, 1]])
    b = check_fixed_elements_are_norms(T, 1, 1, gammas=[[1, 0], [0, 1]])
    assert a == b and a.total == 2


@pytest.mark.parametrize("key", [k for k in TOWERS if k[2] == 2])
def test_relative_lengths(key):
    T = TOWERS[key]
    for g in enumerate_space(T.p, 2):
        assert h_length(T, 0, 1, g) == brute_length(T, T.n, 1, g)
        assert h_length(T, 1, 1, g) <= T.p


def test_cor36_hypotheses_exist():
    total = 0
    for key in EMBEDDABLE:
        for g in gamma_results(construct_theorem2(TOWERS[key], 2, check=False)):
            total += fixed_norms_exhaustive(TOWERS[key], g)[0]
    assert total > 0


@pytest.mark.parametrize("combo", list(itertools.combinations([k for k in TOWERS if k[:1] == (5,) and k[2] == 1], 2))[:6])
def test_scan_pairwise_sums_p5(combo):
    S, _ = tower_direct_sum(TOWERS[combo[0]], TOWERS[combo[1]])
    for d in (1, 2):
        assert check_fixed_elements_are_norms(S, d, 0).passed


REGULAR_TOWER = """\
tower p=3 n=1 m=1
space level=0 degree=1 dim=1
space level=1 degree=1 dim=3
map sigma level=0 degree=1
1
map iota level=0 degree=1
{iota}
map cup_a level=0 degree=1
1
map sigma level=1 degree=1
0 0 1
1 0 0
0 1 0
map norm level=1 degree=1
1 1 1
class a level=0 : 1
class xi level=0 : 0
class xi level=1 : 0 0 0
"""


def test_scan_fires_on_regular_module():
    from kgalmod.towerfile import parse_tower

    # iota N is the all-ones matrix, which is (sigma - 1)^2 here
    T = parse_tower(REGULAR_TOWER.format(iota="1\n1\n1"))
    rep = check_fixed_elements_are_norms(T, 1, 0)
    assert rep.checked == 24  # 18 classes of length 3, 6 norm-zero of length 2
    assert rep.passed


def test_scan_detects_missing_norms():
    from kgalmod.towerfile import parse_tower

    T = parse_tower(REGULAR_TOWER.format(iota="0\n0\n0"))
    rep = check_fixed_elements_are_norms(T, 1, 0)
    assert rep.checked == 24
    assert len(rep.failures) == 24
