import pytest

from kgalmod.errors import TowerFormatError
from kgalmod.ktower import tower_direct_sum, zero_tower
from kgalmod.lfield import LocalFieldSpec, generate_tower, standard_specs
from kgalmod.towerfile import parse_tower, read_tower, serialize_tower, towers_equal, write_tower

SMALL = """\
# one level
tower p=3 n=1 m=1
space level=0 degree=1 dim=1
space level=1 degree=1 dim=1
map sigma level=0 degree=1
1
map iota level=0 degree=1
0
map cup_a level=0 degree=1
1
map sigma level=1 degree=1
1
map norm level=1 degree=1
1
class a level=0 : 1
class xi level=0 : 0
class xi level=1 : 0
"""


@pytest.mark.parametrize("spec", standard_specs(), ids=lambda s: f"p{s.p}-q{s.q}-n{s.n}-{s.style[:3]}")
def test_round_trip(spec):
    T = generate_tower(spec)
    text = serialize_tower(T)
    U = parse_tower(text)
    assert towers_equal(T, U)
    assert serialize_tower(U) == text


def test_round_trip_sum_and_zero():
    T = generate_tower(LocalFieldSpec(3, 13, 1))
    S, _ = tower_direct_sum(T, T)
    assert towers_equal(parse_tower(serialize_tower(S)), S)
    Z = zero_tower(3, 2, 2)
    assert towers_equal(parse_tower(serialize_tower(Z)), Z)


def test_parse_minimal():
    T = parse_tower(SMALL)
    assert (T.p, T.n, T.m) == (3, 1, 1)
    assert T.cup_an is None


def test_file_io(tmp_path):
    T = generate_tower(LocalFieldSpec(5, 11, 1))
    path = tmp_path / "t.twr"
    write_tower(T, path)
    assert towers_equal(read_tower(path), T)


@pytest.mark.parametrize(
    "mutate, line",
    [
        (lambda s: s.replace("tower p=3", "tower q=3"), 2),
        (lambda s: s.replace("map sigma level=0 degree=1\n1", "map sigma level=0 degree=1\n3"), 6),
        (lambda s: s.replace("map iota level=0 degree=1\n0", "map iota level=0 degree=1\n0 0"), 8),
        (lambda s: s.replace("class a level=0 : 1", "class a level=0 : x"), 15),
        (lambda s: s.replace("map norm", "map nrom"), 13),
        (lambda s: s + "space level=0 degree=1 dim=1\n", 18),
        (lambda s: s + "bogus\n", 18),
    ],
)
def test_parse_errors_cite_line(mutate, line):
    with pytest.raises(TowerFormatError) as exc:
        parse_tower(mutate(SMALL))
    assert exc.value.line == line
    assert str(exc.value).startswith(f"line {line}:")


def test_truncated_map():
    with pytest.raises(TowerFormatError, match="rows"):
        parse_tower("tower p=3 n=1 m=1\nspace level=0 degree=1 dim=2\nmap sigma level=0 degree=1\n1 0\n")


def test_incomplete_tower():
    with pytest.raises(TowerFormatError, match="incomplete"):
        parse_tower("tower p=3 n=1 m=1\n")


def test_even_modulus_rejected():
    with pytest.raises(TowerFormatError):
        parse_tower("tower p=4 n=1 m=1\n")
