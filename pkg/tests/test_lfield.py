import pytest
from hypothesis import given
from hypothesis import strategies as st

from kgalmod.lfield import (
    Q_LIST,
    K1Class,
    LocalFieldSpec,
    discrete_log,
    generate_tower,
    k1_reduce,
    primitive_root,
    standard_specs,
    tame_symbol,
    xi_exponent,
)


def test_sigma_q13_shifts_uniformizer():
    s = generate_tower(LocalFieldSpec(3, 13, 1)).sigma[(1, 1)]
    # 12 / 3 = 4 = 1 mod 3
    assert s.tolist() == [[1, 0], [1, 1]]


def test_sigma_q19_trivial():
    assert generate_tower(LocalFieldSpec(3, 19, 1)).sigma[(1, 1)].is_identity()


@pytest.mark.parametrize("spec", [s for s in standard_specs() if s.style == "unramified"], ids=str)
def test_unramified_action_trivial(spec):
    T = generate_tower(spec)
    assert all(m.is_identity() for m in T.sigma.values())


@pytest.mark.parametrize("q", [7, 13, 19, 37, 109])
def test_tame_symbol_uniformizer_unit(q):
    assert tame_symbol((1, 0), (0, 1), 3, q) == 2


@given(st.integers(0, 100), st.integers(0, 100))
def test_tame_symbol_units_vanish(e1, e2):
    assert tame_symbol((0, e1), (0, e2), 3, 13) == 0


@pytest.mark.parametrize("p, q", [(3, 7), (3, 13), (5, 11), (5, 31)])
def test_tame_symbol_minus_one(p, q):
    assert tame_symbol((1, 0), (1, 0), p, q) == 0


@given(st.integers(-5, 5), st.integers(0, 30), st.integers(-5, 5), st.integers(0, 30))
def test_tame_symbol_antisymmetric(va, ea, vb, eb):
    assert (tame_symbol((va, ea), (vb, eb), 3, 19) + tame_symbol((vb, eb), (va, ea), 3, 19)) % 3 == 0


@pytest.mark.parametrize(
    "v, e, expected",
    [(3, 6, (0, 0)), (1, 4, (1, 1)), (9, 1, (0, 1))],
)
def test_k1_reduce(v, e, expected):
    c = k1_reduce(v, e, LocalFieldSpec(3, 19, 2), 1)
    assert (c.v, c.u) == expected


def test_t_at_ramified_level_vanishes():
    spec = LocalFieldSpec(3, 109, 2)
    for i in (1, 2):
        assert k1_reduce(3**i, 0, spec, i) == K1Class(0, 0)


@pytest.mark.parametrize("q", [7, 11, 13, 19, 31, 37, 41, 101, 109, 251])
def test_primitive_root_and_log(q):
    g = primitive_root(q)
    assert len({pow(g, k, q) for k in range(q - 1)}) == q - 1
    for x in (1, 2, q - 1):
        assert pow(g, discrete_log(x, q), q) == x


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(p=3, q=13, n=2),
        dict(p=3, q=9, n=1),
        dict(p=3, q=11, n=1),
        dict(p=3, q=19, n=1, m=3),
        dict(p=3, q=19, n=0),
        dict(p=3, q=19, n=1, style="wild"),
        dict(p=4, q=13, n=1),
    ],
)
def test_spec_rejected(kwargs):
    with pytest.raises(ValueError):
        LocalFieldSpec(**kwargs)


def test_unramified_allows_small_valuation():
    LocalFieldSpec(3, 13, 2, style="unramified")


def test_xi_exponent_ramified():
    assert xi_exponent(LocalFieldSpec(3, 19, 1), 1) == 0
    assert xi_exponent(LocalFieldSpec(3, 13, 1), 0) == 1


def test_standard_specs_cover_required_q():
    got = {s.q for s in standard_specs() if s.p == 3}
    assert {7, 13, 19, 37, 109} <= got
    assert set(Q_LIST) == {3, 5}


def test_generation_deterministic():
    a = generate_tower(LocalFieldSpec(5, 251, 2))
    b = generate_tower(LocalFieldSpec(5, 251, 2))
    assert all(a.sigma[k] == b.sigma[k] for k in a.sigma)
