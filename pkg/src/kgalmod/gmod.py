"""Modules over F_p[G] for a cyclic group G = Z/p^n.

A module is a vector space with the matrix of a fixed generator ``sigma``.
Since ``F_p[G]`` is a discrete valuation ring with uniformizer ``theta =
sigma - 1``, everything here is driven by powers of ``theta``:

* the length of ``w`` is the least ``l`` with ``theta^l w = 0``;
* ``V_k = im(theta^(k-1)) & ker(theta)`` filters the fixed submodule;
* a complement of ``V_(k+1)`` in ``V_k``, lifted through ``theta^(k-1)``,
  gives the generators of the summands of dimension ``k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import FplaError, InternalError, ModuleError
from .fpla import ModPMatrix, Subspace, _rank, check_modulus, random_invertible, solve


@dataclass(frozen=True, eq=False)
class GModule:
    p: int
    n: int
    sigma: ModPMatrix

    @property
    def dim(self) -> int:
        return self.sigma.rows

    @property
    def order(self) -> int:
        return self.p**self.n

    @property
    def theta(self) -> ModPMatrix:
        return self.sigma - ModPMatrix.identity(self.p, self.dim)

    def theta_power(self, k: int) -> ModPMatrix:
        return self.theta.power(k)

    def fixed(self) -> Subspace:
        return Subspace.kernel(self.theta)


def make_module(p: int, n: int, sigma: ModPMatrix) -> GModule:
    check_modulus(p)
    if n < 0:
        raise ModuleError(f"n must be non-negative, got {n}")
    if sigma.p != p:
        raise ModuleError(f"modulus mismatch: module over F_{p}, matrix over F_{sigma.p}")
    if sigma.rows != sigma.cols:
        raise ModuleError(f"sigma must be square, got {sigma.shape}")
    if sigma.rank() != sigma.rows:
        raise ModuleError("sigma is not invertible")
    if not sigma.power(p**n).is_identity():
        raise ModuleError(f"sigma^({p}^{n}) is not the identity")
    m = GModule(p, n, sigma)
    if not m.theta.power(p**n).is_zero():
        raise ModuleError(f"(sigma - 1)^({p}^{n}) is not zero")
    return m


def _check_vector(m: GModule, w) -> np.ndarray:
    w = np.asarray(w, dtype=np.int64) % m.p
    if w.shape != (m.dim,):
        raise FplaError(f"vector of shape {w.shape} in a module of dimension {m.dim}")
    return w


def length(m: GModule, w) -> int:
    w = _check_vector(m, w)
    theta = m.theta.data
    ell = 0
    while w.any():
        w = (theta @ w) % m.p
        ell += 1
        if ell > m.order:
            raise InternalError("length exceeds group order")
    return ell


def lengths(m: GModule, vectors: np.ndarray) -> np.ndarray:
    """Vectorized :func:`length` over a stack of row vectors."""
    cur = np.asarray(vectors, dtype=np.int64) % m.p
    out = np.zeros(cur.shape[0], dtype=np.int64)
    tt = m.theta.data.T
    while True:
        nz = cur.any(axis=1)
        if not nz.any():
            return out
        out[nz] += 1
        cur = (cur @ tt) % m.p


def nilpotency_index(m: GModule) -> int:
    """Least ``s`` with ``theta^s = 0``."""
    t = m.theta
    cur = ModPMatrix.identity(m.p, m.dim)
    s = 0
    while not cur.is_zero():
        cur = cur @ t
        s += 1
    return s


def cyclic_span(m: GModule, generators) -> Subspace:
    """The F_p[G]-submodule generated by ``generators``."""
    vecs = []
    tt = m.theta.data.T
    for g in generators:
        g = _check_vector(m, g)
        while g.any():
            vecs.append(g)
            g = (tt.T @ g) % m.p
    return Subspace.span(m.p, m.dim, vecs)


def v_filtration(m: GModule) -> list[Subspace]:
    """``[V_1, ..., V_(p^n)]`` with ``V_i = im(theta^(i-1)) & ker(theta)``."""
    theta = m.theta
    fixed = Subspace.kernel(theta)
    out = []
    power = ModPMatrix.identity(m.p, m.dim)
    zero = Subspace.zero(m.p, m.dim)
    for i in range(1, m.order + 1):
        if power.is_zero():
            out.extend([zero] * (m.order - i + 1))
            break
        out.append(Subspace.column_space(power) & fixed)
        power = power @ theta
    for a, b in zip(out, out[1:]):
        if not a.contains(b):
            raise InternalError("V-filtration is not decreasing")
    return out


@dataclass
class Decomposition:
    """Cyclic generators ``(vector, dimension)`` and the multiplicity table.

    ``multiplicities`` holds only the dimensions that occur.
    """

    generators: list[tuple[np.ndarray, int]]
    multiplicities: dict[int, int] = field(default_factory=dict)

    def count(self, d: int) -> int:
        return self.multiplicities.get(d, 0)

    @property
    def dim(self) -> int:
        return sum(d * c for d, c in self.multiplicities.items())


def decompose(m: GModule) -> Decomposition:
    """Split ``m`` into cyclic summands by lifting complements down the V-filtration."""
    if m.dim == 0:
        return Decomposition([], {})
    theta = m.theta
    # powers[k] = theta^k, up to the first zero power
    powers = [ModPMatrix.identity(m.p, m.dim)]
    while not powers[-1].is_zero():
        powers.append(powers[-1] @ theta)
    s = len(powers) - 1
    if s > m.order:
        raise InternalError("theta is not nilpotent of the group order")
    # V_k = theta^(k-1)(ker theta^k)
    filt = [None] + [Subspace.kernel(powers[k]).image(powers[k - 1]) for k in range(1, s + 1)]
    filt.append(Subspace.zero(m.p, m.dim))

    generators: list[tuple[np.ndarray, int]] = []
    mult: dict[int, int] = {}
    for k in range(s, 0, -1):
        if not filt[k].contains(filt[k + 1]):
            raise InternalError(f"V_{k + 1} is not contained in V_{k}")
        chosen = filt[k + 1].complement_vectors(filt[k])
        for x in chosen:
            alpha = solve(powers[k - 1], x)
            if alpha is None:
                raise InternalError(f"fixed vector {x.tolist()} has no preimage under theta^{k - 1}")
            generators.append((alpha, k))
        if len(chosen):
            mult[k] = len(chosen)

    gens = np.array([g for g, _ in generators], dtype=np.int64)
    dims = np.array([k for _, k in generators], dtype=np.int64)
    got = lengths(m, gens)
    if not np.array_equal(got, dims):
        bad = int(np.flatnonzero(got != dims)[0])
        raise InternalError(f"generator {gens[bad].tolist()} has length {got[bad]}, expected {dims[bad]}")
    if dims.sum() != m.dim:
        raise InternalError("summand dimensions do not add up to the module dimension")
    # fixed part of <g> is spanned by theta^(k-1) g, so exclusion is a rank test
    tops = np.array([powers[k - 1] @ g for g, k in generators])
    if _rank(tops, m.p) != len(generators):
        raise InternalError("fixed parts of the summands are dependent")
    orbit = np.array([powers[j] @ g for g, k in generators for j in range(k)])
    if _rank(orbit, m.p) != m.dim:
        raise InternalError("summands do not span the module")
    return Decomposition(generators, dict(sorted(mult.items())))


def multiplicities_oracle(m: GModule) -> dict[int, int]:
    """Multiplicities from ranks of theta powers alone.

    ``count(d) = r(d-1) - 2 r(d) + r(d+1)`` with ``r(k) = rank(theta^k)``.
    """
    ranks = [m.dim]
    theta = m.theta
    cur = ModPMatrix.identity(m.p, m.dim)
    while ranks[-1] > 0:
        cur = cur @ theta
        ranks.append(cur.rank())
    ranks += [0, 0]
    out = {}
    for d in range(1, len(ranks) - 1):
        c = ranks[d - 1] - 2 * ranks[d] + ranks[d + 1]
        if c:
            out[d] = c
    return out


def exclusion_check(m: GModule, submodules, cross_check: bool = True) -> bool:
    """Whether the fixed parts of the given submodules are independent.

    Each submodule is given by a list of generators.  With ``cross_check`` the
    answer is compared against independence of the submodules themselves
    (dimension of the sum) and a disagreement raises :class:`InternalError`.
    """
    spans = [cyclic_span(m, gens) for gens in submodules]
    fixed = m.fixed()
    fixed_parts = [u & fixed for u in spans]
    total = Subspace.zero(m.p, m.dim)
    for u in fixed_parts:
        total = total + u
    independent = total.dim == sum(u.dim for u in fixed_parts)
    if cross_check:
        whole = Subspace.zero(m.p, m.dim)
        for u in spans:
            whole = whole + u
        if (whole.dim == sum(u.dim for u in spans)) != independent:
            raise InternalError("fixed-part independence disagrees with module independence")
    return independent


def verify_operator_identities(m: GModule, i: int, j: int) -> bool:
    """``sum_{k < p^(i-j)} sigma^(k p^j) == (sigma - 1)^(p^i - p^j)`` on ``m``."""
    if not 0 <= j <= i <= m.n:
        raise ModuleError(f"need 0 <= j <= i <= n, got i={i}, j={j}, n={m.n}")
    p = m.p
    step = m.sigma.power(p**j)
    acc = ModPMatrix.zeros(p, m.dim, m.dim)
    cur = ModPMatrix.identity(p, m.dim)
    for _ in range(p ** (i - j)):
        acc = acc + cur
        cur = cur @ step
    return acc == m.theta.power(p**i - p**j)


def gap_dimensions(p: int, n: int, multiplicities: dict[int, int]) -> list[int]:
    """Summand dimensions strictly between ``2 p^(n-1)`` and ``p^n``."""
    if n == 0:
        return []
    lo, hi = 2 * p ** (n - 1), p**n
    return sorted(d for d, c in multiplicities.items() if c and lo < d < hi)


def jordan_sigma(p: int, shape) -> ModPMatrix:
    """Unipotent block-diagonal matrix with Jordan blocks of the given sizes."""
    dim = sum(shape)
    a = np.eye(dim, dtype=np.int64)
    start = 0
    for size in shape:
        for r in range(start + 1, start + size):
            a[r, r - 1] = 1
        start += size
    return ModPMatrix(p, a)


def random_module(p: int, n: int, dim: int, seed: int, max_block: int | None = None) -> tuple[GModule, list[int]]:
    """Random conjugate of a random unipotent Jordan shape; returns the module and its shape."""
    rng = np.random.Generator(np.random.PCG64(seed))
    cap = min(p**n, dim) if max_block is None else min(max_block, p**n, dim)
    shape = []
    left = dim
    while left:
        size = int(rng.integers(1, min(cap, left) + 1))
        shape.append(size)
        left -= size
    j = jordan_sigma(p, shape)
    if dim == 0:
        return make_module(p, n, j), shape
    c = random_invertible(p, dim, rng)
    return make_module(p, n, c @ j @ c.inverse()), shape
