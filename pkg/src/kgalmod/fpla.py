"""Exact linear algebra over the prime field F_p.

Matrices act on column vectors.  Entries are ``int64`` reduced into ``[0, p)``;
with ``p <= 2**15`` every intermediate product fits comfortably in 64 bits.

Subspaces are stored by their reduced row echelon basis, which is unique for a
given span, so two constructions of the same subspace compare equal bit for bit.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import FplaError

MAX_MODULUS = 1 << 15


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def check_modulus(p: int) -> None:
    if not isinstance(p, (int, np.integer)) or not _odd_prime(int(p)):
        raise FplaError(f"modulus must be an odd prime, got {p!r}")
    if p > MAX_MODULUS:
        raise FplaError(f"modulus {p} exceeds supported bound {MAX_MODULUS}")


@functools.lru_cache(maxsize=64)
def _odd_prime(p: int) -> bool:
    return p % 2 == 1 and is_prime(p)


# ---------------------------------------------------------------------------
# raw array kernels


def _rref(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of ``a`` (copied) and its pivot columns."""
    a = np.array(a, dtype=np.int64) % p
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        sub = a[r:, c]
        k = int(sub.argmax())  # entries are non-negative, so a zero max means a zero column
        if sub[k] == 0:
            continue
        k += r
        if k != r:
            a[[r, k]] = a[[k, r]]
        inv = pow(int(a[r, c]), -1, p)
        if inv != 1:
            a[r] = (a[r] * inv) % p
        col = a[:, c].copy()
        col[r] = 0
        if col.any():
            a -= np.outer(col, a[r])
            a %= p
        pivots.append(c)
        r += 1
    return a, pivots


def _rank(a: np.ndarray, p: int) -> int:
    if a.size == 0:
        return 0
    return len(_rref(a, p)[1])


def _kernel_rows(a: np.ndarray, p: int) -> np.ndarray:
    """Basis (as rows) of ``{x : a @ x = 0}``; not canonicalized."""
    rows, cols = a.shape
    if rows == 0:
        return np.eye(cols, dtype=np.int64)
    r, piv = _rref(a, p)
    free = [c for c in range(cols) if c not in set(piv)]
    k = np.zeros((len(free), cols), dtype=np.int64)
    if free:
        k[np.arange(len(free)), free] = 1
        if piv:
            k[:, piv] = (-r[: len(piv)][:, free].T) % p
    return k


def _echelon_basis(vectors: np.ndarray, p: int) -> np.ndarray:
    if vectors.shape[0] == 0:
        return vectors.reshape(0, vectors.shape[1]).astype(np.int64)
    r, piv = _rref(vectors, p)
    return r[: len(piv)]


# ---------------------------------------------------------------------------
# matrices


class ModPMatrix:
    """Immutable dense matrix over F_p."""

    __slots__ = ("p", "data")
    __hash__ = None  # type: ignore[assignment]

    def __init__(self, p: int, data, shape: tuple[int, int] | None = None):
        arr = np.array(data, dtype=np.int64)
        if shape is not None:
            arr = arr.reshape(shape)
        if arr.ndim != 2:
            raise FplaError(f"matrix data must be 2-dimensional, got shape {arr.shape}")
        check_modulus(p)
        arr = arr % p
        arr.setflags(write=False)
        object.__setattr__(self, "p", int(p))
        object.__setattr__(self, "data", arr)

    def __setattr__(self, name, value):
        raise AttributeError("ModPMatrix is immutable")

    @classmethod
    def zeros(cls, p: int, rows: int, cols: int) -> "ModPMatrix":
        return cls(p, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, p: int, n: int) -> "ModPMatrix":
        return cls(p, np.eye(n, dtype=np.int64))

    @classmethod
    def from_rows(cls, p: int, rows: Sequence[Sequence[int]], cols: int | None = None) -> "ModPMatrix":
        if len(rows) == 0:
            return cls.zeros(p, 0, cols or 0)
        return cls(p, rows)

    @classmethod
    def from_columns(cls, p: int, columns: Sequence, rows: int) -> "ModPMatrix":
        if len(columns) == 0:
            return cls.zeros(p, rows, 0)
        return cls(p, np.column_stack([np.asarray(c, dtype=np.int64) for c in columns]))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def T(self) -> "ModPMatrix":
        return ModPMatrix(self.p, self.data.T)

    def _check(self, other: "ModPMatrix") -> None:
        if other.p != self.p:
            raise FplaError(f"modulus mismatch: {self.p} vs {other.p}")

    def __matmul__(self, other):
        if isinstance(other, ModPMatrix):
            self._check(other)
            if self.cols != other.rows:
                raise FplaError(f"cannot multiply {self.shape} by {other.shape}")
            return ModPMatrix(self.p, self.data @ other.data)
        v = np.asarray(other, dtype=np.int64)
        if v.shape[0] != self.cols:
            raise FplaError(f"cannot apply {self.shape} matrix to vector of length {v.shape[0]}")
        return (self.data @ v) % self.p

    def __add__(self, other: "ModPMatrix") -> "ModPMatrix":
        self._check(other)
        if self.shape != other.shape:
            raise FplaError(f"shape mismatch: {self.shape} vs {other.shape}")
        return ModPMatrix(self.p, self.data + other.data)

    def __sub__(self, other: "ModPMatrix") -> "ModPMatrix":
        self._check(other)
        if self.shape != other.shape:
            raise FplaError(f"shape mismatch: {self.shape} vs {other.shape}")
        return ModPMatrix(self.p, self.data - other.data)

    def __neg__(self) -> "ModPMatrix":
        return ModPMatrix(self.p, -self.data)

    def __mul__(self, k: int) -> "ModPMatrix":
        return ModPMatrix(self.p, self.data * (int(k) % self.p))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModPMatrix):
            return NotImplemented
        return self.p == other.p and self.shape == other.shape and bool(np.array_equal(self.data, other.data))

    def __repr__(self) -> str:
        return f"ModPMatrix(p={self.p}, {self.data.tolist()})"

    def power(self, k: int) -> "ModPMatrix":
        if self.rows != self.cols:
            raise FplaError("power of a non-square matrix")
        result = np.eye(self.rows, dtype=np.int64)
        base = self.data
        while k:
            if k & 1:
                result = (result @ base) % self.p
            k >>= 1
            if k:
                base = (base @ base) % self.p
        return ModPMatrix(self.p, result)

    def is_zero(self) -> bool:
        return not self.data.any()

    def is_identity(self) -> bool:
        return self.rows == self.cols and bool(np.array_equal(self.data, np.eye(self.rows, dtype=np.int64)))

    def column(self, j: int) -> np.ndarray:
        return self.data[:, j].copy()

    def rank(self) -> int:
        return _rank(self.data, self.p)

    def tolist(self) -> list[list[int]]:
        return self.data.tolist()

    def inverse(self) -> "ModPMatrix":
        n = self.rows
        if n != self.cols:
            raise FplaError("inverse of a non-square matrix")
        r, piv = _rref(np.hstack([self.data, np.eye(n, dtype=np.int64)]), self.p)
        if piv[:n] != list(range(n)):
            raise FplaError("matrix is singular")
        return ModPMatrix(self.p, r[:, n:])

    def restrict(self, basis: np.ndarray) -> np.ndarray:
        """Images of the rows of ``basis``, returned as rows."""
        return (np.asarray(basis, dtype=np.int64) @ self.data.T) % self.p


def block_diag(p: int, blocks: Iterable[ModPMatrix]) -> ModPMatrix:
    blocks = list(blocks)
    r = sum(b.rows for b in blocks)
    c = sum(b.cols for b in blocks)
    out = np.zeros((r, c), dtype=np.int64)
    i = j = 0
    for b in blocks:
        out[i : i + b.rows, j : j + b.cols] = b.data
        i += b.rows
        j += b.cols
    return ModPMatrix(p, out)


# ---------------------------------------------------------------------------
# subspaces


class Subspace:
    """Subspace of F_p^ambient_dim held as a canonical RREF basis (rows)."""

    __slots__ = ("p", "ambient_dim", "basis", "_pivots", "_annihilator")
    __hash__ = None  # type: ignore[assignment]

    def __init__(self, p: int, ambient_dim: int, vectors=None, *, _echelon: bool = False):
        self.p = int(p)
        self.ambient_dim = int(ambient_dim)
        if vectors is None:
            vecs = np.zeros((0, ambient_dim), dtype=np.int64)
        else:
            vecs = np.asarray(vectors, dtype=np.int64)
            vecs = (vecs.reshape(-1, ambient_dim) if ambient_dim else np.zeros((0, 0), dtype=np.int64)) % p
        if _echelon:
            basis = vecs
        else:
            basis = _echelon_basis(vecs, self.p)
        basis.setflags(write=False)
        self.basis = basis
        self._pivots: list[int] | None = None
        self._annihilator: np.ndarray | None = None

    # constructors
    @classmethod
    def zero(cls, p: int, n: int) -> "Subspace":
        return cls(p, n)

    @classmethod
    def full(cls, p: int, n: int) -> "Subspace":
        return cls(p, n, np.eye(n, dtype=np.int64), _echelon=True)

    @classmethod
    def span(cls, p: int, n: int, vectors) -> "Subspace":
        vectors = list(vectors) if not isinstance(vectors, np.ndarray) else vectors
        if len(vectors) == 0:
            return cls.zero(p, n)
        return cls(p, n, np.vstack([np.asarray(v, dtype=np.int64).reshape(-1, n) for v in vectors]))

    @classmethod
    def column_space(cls, m: ModPMatrix) -> "Subspace":
        return cls(m.p, m.rows, m.data.T)

    @classmethod
    def kernel(cls, m: ModPMatrix) -> "Subspace":
        return cls(m.p, m.cols, _kernel_rows(m.data, m.p))

    # basic data
    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def pivots(self) -> list[int]:
        if self._pivots is None:
            self._pivots = [int(np.flatnonzero(row)[0]) for row in self.basis]
        return self._pivots

    def vectors(self) -> list[np.ndarray]:
        return [row.copy() for row in self.basis]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.p == other.p
            and self.ambient_dim == other.ambient_dim
            and bool(np.array_equal(self.basis, other.basis))
        )

    def __repr__(self) -> str:
        return f"Subspace(p={self.p}, ambient={self.ambient_dim}, basis={self.basis.tolist()})"

    def _check(self, other: "Subspace") -> None:
        if self.p != other.p or self.ambient_dim != other.ambient_dim:
            raise FplaError(
                f"incompatible subspaces: (p={self.p}, n={self.ambient_dim}) vs (p={other.p}, n={other.ambient_dim})"
            )

    def reduce(self, v) -> np.ndarray:
        """Remainder of ``v`` (vector or stack of row vectors) modulo this subspace."""
        v = np.asarray(v, dtype=np.int64) % self.p
        if self.dim == 0:
            return v
        coeffs = v[..., self.pivots]
        return (v - coeffs @ self.basis) % self.p

    def annihilator(self) -> np.ndarray:
        """Rows ``c`` with ``c . u = 0`` for all ``u`` here; ``v`` lies here iff ``A @ v == 0``."""
        if self._annihilator is None:
            self._annihilator = _kernel_rows(self.basis, self.p) if self.dim else np.eye(self.ambient_dim, dtype=np.int64)
        return self._annihilator

    def contains(self, other) -> bool:
        if isinstance(other, Subspace):
            self._check(other)
            if other.dim == 0:
                return True
            return not self.reduce(other.basis).any()
        v = np.asarray(other, dtype=np.int64)
        if v.shape[-1] != self.ambient_dim:
            raise FplaError(f"vector length {v.shape[-1]} != ambient dimension {self.ambient_dim}")
        return not self.reduce(v).any()

    def members(self, vectors: np.ndarray) -> np.ndarray:
        """Boolean membership mask for a stack of row vectors."""
        ann = self.annihilator()
        if ann.shape[0] == 0:
            return np.ones(vectors.shape[0], dtype=bool)
        return ~((vectors @ ann.T) % self.p).any(axis=1)

    def __add__(self, other: "Subspace") -> "Subspace":
        self._check(other)
        return Subspace(self.p, self.ambient_dim, np.vstack([self.basis, other.basis]))

    def __and__(self, other: "Subspace") -> "Subspace":
        self._check(other)
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.p, self.ambient_dim)
        # x A = y B  <=>  [x | y] @ [A ; -B] = 0
        stacked = np.vstack([self.basis, (-other.basis) % self.p])
        k = _kernel_rows(stacked.T, self.p)
        return Subspace(self.p, self.ambient_dim, (k[:, : self.dim] @ self.basis) % self.p)

    def complement_within(self, w: "Subspace") -> "Subspace":
        """Deterministic ``C`` with ``self (+) C = w``.

        Walks ``w``'s echelon basis in pivot order and keeps each vector that is
        independent of ``self`` plus the vectors kept so far.
        """
        self._check(w)
        if not w.contains(self):
            raise FplaError("complement_within: subspace is not contained in the target")
        return Subspace(self.p, self.ambient_dim, self.complement_vectors(w), _echelon=False)

    def complement_vectors(self, w: "Subspace") -> np.ndarray:
        """The kept vectors of ``w``'s basis (see ``complement_within``), unnormalized."""
        p = self.p
        ech = [row for row in self.basis]
        piv = list(self.pivots)
        kept = []
        for vec in w.basis:
            r = vec.copy()
            for row, c in zip(ech, piv):
                if r[c]:
                    r = (r - r[c] * row) % p
            nz = np.flatnonzero(r)
            if nz.size == 0:
                continue
            c = int(nz[0])
            r = (r * pow(int(r[c]), -1, p)) % p
            ech = [(row - row[c] * r) % p if row[c] else row for row in ech]
            ech.append(r)
            piv.append(c)
            kept.append(vec.copy())
        if not kept:
            return np.zeros((0, self.ambient_dim), dtype=np.int64)
        return np.vstack(kept)

    def image(self, m: ModPMatrix) -> "Subspace":
        if m.cols != self.ambient_dim:
            raise FplaError(f"map with {m.cols} columns applied to subspace of F_p^{self.ambient_dim}")
        if self.dim == 0:
            return Subspace.zero(self.p, m.rows)
        return Subspace(self.p, m.rows, m.restrict(self.basis))

    def preimage(self, m: ModPMatrix) -> "Subspace":
        """``{x : m @ x in self}``."""
        if m.rows != self.ambient_dim:
            raise FplaError("preimage: dimension mismatch")
        ann = self.annihilator()
        if ann.shape[0] == 0:
            return Subspace.full(self.p, m.cols)
        return Subspace.kernel(ModPMatrix(self.p, ann @ m.data))

    def coordinates(self, v) -> np.ndarray:
        """Coefficients of ``v`` in this subspace's echelon basis; ``v`` must lie here."""
        v = np.asarray(v, dtype=np.int64) % self.p
        if not self.contains(v):
            raise FplaError("vector not in subspace")
        return v[self.pivots].copy()

    def enumerate(self) -> np.ndarray:
        """All ``p**dim`` elements, as rows, in lexicographic coefficient order."""
        return enumerate_space(self.p, self.dim) @ self.basis % self.p


def enumerate_space(p: int, dim: int) -> np.ndarray:
    """All vectors of F_p^dim as rows; row k holds the base-p digits of k, most significant first."""
    if dim == 0:
        return np.zeros((1, 0), dtype=np.int64)
    idx = np.arange(p**dim, dtype=np.int64)
    powers = p ** np.arange(dim - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // powers[None, :]) % p


# ---------------------------------------------------------------------------
# operations


@dataclass(frozen=True)
class Analysis:
    rank: int
    kernel: Subspace
    image: Subspace
    rref: ModPMatrix


def analyze(m: ModPMatrix) -> Analysis:
    r, piv = _rref(m.data, m.p) if m.rows else (m.data.copy(), [])
    return Analysis(
        rank=len(piv),
        kernel=Subspace.kernel(m),
        image=Subspace.column_space(m),
        rref=ModPMatrix(m.p, r),
    )


def subspace_ops(a: Subspace, b: Subspace) -> dict:
    a._check(b)
    return {"sum": a + b, "intersection": a & b, "contains": a.contains(b)}


def complement_within(a: Subspace, w: Subspace) -> Subspace:
    return a.complement_within(w)


def solve(m: ModPMatrix, b, within: Subspace | None = None) -> np.ndarray | None:
    """One solution ``x`` of ``m @ x = b`` (free variables zero), or ``None``.

    With ``within`` the solution is sought inside that subspace of the source.
    """
    b = np.asarray(b, dtype=np.int64) % m.p
    if within is not None:
        if within.dim == 0:
            return np.zeros(m.cols, dtype=np.int64) if not b.any() else None
        restricted = ModPMatrix(m.p, m.restrict(within.basis).T)
        y = solve(restricted, b)
        return None if y is None else (y @ within.basis) % m.p
    if m.cols == 0:
        return np.zeros(0, dtype=np.int64) if not b.any() else None
    r, piv = _rref(np.hstack([m.data, b.reshape(-1, 1)]), m.p)
    if piv and piv[-1] == m.cols:
        return None
    x = np.zeros(m.cols, dtype=np.int64)
    x[piv] = r[: len(piv), m.cols]
    return x


def random_matrix(p: int, rows: int, cols: int, seed: int) -> ModPMatrix:
    """Uniform matrix over F_p drawn from numpy's PCG64 bit generator seeded with ``seed``."""
    check_modulus(p)
    rng = np.random.Generator(np.random.PCG64(seed))
    return ModPMatrix(p, rng.integers(0, p, size=(rows, cols), dtype=np.int64))


def random_invertible(p: int, n: int, rng: np.random.Generator) -> ModPMatrix:
    while True:
        m = ModPMatrix(p, rng.integers(0, p, size=(n, n), dtype=np.int64))
        if m.rank() == n:
            return m
