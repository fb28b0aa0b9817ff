import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kgalmod.errors import FplaError
from kgalmod.fpla import (
    ModPMatrix,
    Subspace,
    analyze,
    block_diag,
    complement_within,
    enumerate_space,
    is_prime,
    random_matrix,
    solve,
    subspace_ops,
)


def brute_kernel(m: ModPMatrix) -> set:
    """Every x with m @ x == 0, by enumeration."""
    return {tuple(x) for x in itertools.product(range(m.p), repeat=m.cols) if not (m.data @ np.array(x, dtype=np.int64) % m.p).any()}


def brute_span(p, vectors, n) -> set:
    vectors = [np.asarray(v) for v in vectors]
    out = set()
    for coeffs in itertools.product(range(p), repeat=len(vectors)):
        acc = np.zeros(n, dtype=np.int64)
        for c, v in zip(coeffs, vectors):
            acc = (acc + c * v) % p
        out.add(tuple(int(x) for x in acc))
    return out


small = st.builds(
    lambda p, r, c, seed: random_matrix(p, r, c, seed),
    st.sampled_from([3, 5]),
    st.integers(0, 4),
    st.integers(0, 4),
    st.integers(0, 10**6),
)


def test_identity_rank():
    a = analyze(ModPMatrix.identity(3, 2))
    assert a.rank == 2
    assert a.kernel.dim == 0


def test_rank_one_kernel():
    a = analyze(ModPMatrix(3, [[1, 2], [2, 4]]))
    assert a.rank == 1
    assert a.kernel == Subspace.span(3, 2, [[1, 1]])


def test_zero_matrix():
    a = analyze(ModPMatrix.zeros(5, 3, 3))
    assert a.rank == 0
    assert a.kernel == Subspace.full(5, 3)
    assert a.image.dim == 0


@pytest.mark.parametrize("p", [0, 1, 2, 4, 9])
def test_bad_modulus(p):
    with pytest.raises(FplaError):
        ModPMatrix(p, [[1]])


def test_is_prime():
    assert [k for k in range(30) if is_prime(k)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


@given(small)
def test_rank_nullity_against_enumeration(m):
    a = analyze(m)
    ker = brute_kernel(m)
    assert len(ker) == m.p ** (m.cols - a.rank)
    assert {tuple(int(x) for x in v) for v in a.kernel.enumerate()} == ker
    assert a.image.dim == a.rank


@given(small)
def test_rref_is_reduced(m):
    r = analyze(m).rref.data
    lead = []
    for row in r:
        nz = np.flatnonzero(row)
        if len(nz):
            lead.append(nz[0])
            assert row[nz[0]] == 1
    assert lead == sorted(lead)
    for k, c in enumerate(lead):
        assert np.count_nonzero(r[:, c]) == 1


def test_complement_coordinate():
    e1 = Subspace.span(3, 2, [[1, 0]])
    assert complement_within(e1, Subspace.full(3, 2)) == Subspace.span(3, 2, [[0, 1]])


def test_intersection_coordinate():
    a = Subspace.span(3, 3, [[1, 0, 0], [0, 1, 0]])
    b = Subspace.span(3, 3, [[0, 1, 0], [0, 0, 1]])
    ops = subspace_ops(a, b)
    assert ops["intersection"] == Subspace.span(3, 3, [[0, 1, 0]])
    assert ops["sum"] == Subspace.full(3, 3)
    assert not ops["contains"]


def test_complement_diagonal():
    a = Subspace.span(5, 2, [[1, 1]])
    c = complement_within(a, Subspace.full(5, 2))
    assert c.dim == 1
    assert (a + c).dim == 2


@given(st.sampled_from([3, 5]), st.integers(1, 4), st.integers(0, 10**6))
def test_sum_and_intersection_against_enumeration(p, n, seed):
    rng = np.random.Generator(np.random.PCG64(seed))
    va = rng.integers(0, p, size=(int(rng.integers(0, 3)), n))
    vb = rng.integers(0, p, size=(int(rng.integers(0, 3)), n))
    a, b = Subspace.span(p, n, va), Subspace.span(p, n, vb)
    sa, sb = brute_span(p, va, n), brute_span(p, vb, n)
    enum = lambda s: {tuple(int(x) for x in v) for v in s.enumerate()}  # noqa: E731
    assert enum(a & b) == sa & sb
    assert enum(a + b) == brute_span(p, list(va) + list(vb), n)
    assert a.contains(a & b) and (a + b).contains(b)


@given(st.sampled_from([3, 5]), st.integers(1, 5), st.integers(0, 10**6))
def test_complement_is_direct(p, n, seed):
    rng = np.random.Generator(np.random.PCG64(seed))
    w = Subspace.span(p, n, rng.integers(0, p, size=(3, n)))
    a = w & Subspace.span(p, n, rng.integers(0, p, size=(2, n)))
    c = complement_within(a, w)
    assert (a & c).dim == 0
    assert a + c == w


def test_random_matrix_deterministic():
    assert random_matrix(5, 3, 4, 11) == random_matrix(5, 3, 4, 11)


def test_random_matrix_seeds_differ():
    same = sum(random_matrix(3, 3, 3, s) == random_matrix(3, 3, 3, s + 1) for s in range(100))
    # collision chance per pair is 3^-9
    assert same <= 1


def test_random_matrix_empty():
    m = random_matrix(3, 0, 4, 0)
    assert m.shape == (0, 4)
    assert analyze(m).kernel == Subspace.full(3, 4)


@given(small, st.integers(0, 10**6))
def test_solve_consistent(m, seed):
    rng = np.random.Generator(np.random.PCG64(seed))
    x0 = rng.integers(0, m.p, size=m.cols)
    b = m @ x0
    x = solve(m, b)
    assert x is not None
    assert np.array_equal(m @ x, b)


def test_solve_inconsistent():
    assert solve(ModPMatrix(3, [[1, 0], [1, 0]]), [1, 2]) is None


def test_solve_within():
    m = ModPMatrix(3, [[1, 1]])
    w = Subspace.span(3, 2, [[0, 1]])
    x = solve(m, [2], within=w)
    assert x.tolist() == [0, 2]


def test_inverse_and_power():
    m = ModPMatrix(5, [[1, 2], [3, 4]])
    assert (m @ m.inverse()).is_identity()
    assert m.power(0).is_identity()
    assert m.power(3) == m @ m @ m


def test_block_diag():
    b = block_diag(3, [ModPMatrix(3, [[1, 1], [0, 1]]), ModPMatrix(3, [[2]])])
    assert b.tolist() == [[1, 1, 0], [0, 1, 0], [0, 0, 2]]


def test_enumerate_space_size():
    v = enumerate_space(3, 3)
    assert v.shape == (27, 3)
    assert len({tuple(r) for r in v}) == 27


def test_zero_ambient_subspace():
    s = Subspace.zero(3, 0)
    assert s.dim == 0
    assert (s + Subspace.full(3, 0)).dim == 0
