"""Finite matrix model of a mod-p Milnor K-theory tower.

A tower of cyclic extensions ``F = E_0 < E_1 < ... < E_n`` with group
``Z/p^n`` is recorded through the spaces ``k[i][d] = k_d E_i`` together with

* ``sigma[i][d]``: the action of the generator on ``k[i][d]``;
* ``iota[i][d]: k[i][d] -> k[i+1][d]`` and ``norm[i][d]: k[i][d] -> k[i-1][d]``;
* ``cup_a[i][d]: k[i][d-1] -> k[i][d]``, multiplication by ``{a_i}`` where
  ``E_(i+1) = E_i(a_i^(1/p))``;
* optionally ``cup_xi[i][d]`` (multiplication by ``{xi_p}``) and
  ``cup_an[d]`` (multiplication by ``{a_n^t}`` on the top level).

Degree 0 is never stored: it is one-dimensional with trivial action,
``iota = 1`` and ``norm = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ExceptionalError, TowerShapeError
from .fpla import ModPMatrix, Subspace, block_diag, check_modulus, enumerate_space
from .gmod import GModule, make_module

NEG_INF = float("-inf")

Key = tuple[int, int]


@dataclass(frozen=True, eq=False)
class Tower:
    p: int
    n: int
    m: int
    dims: dict[Key, int]
    sigma: dict[Key, ModPMatrix]
    iota: dict[Key, ModPMatrix]
    norm: dict[Key, ModPMatrix]
    cup_a: dict[Key, ModPMatrix]
    a_class: dict[int, np.ndarray]
    xi_class: dict[int, np.ndarray]
    cup_xi: Optional[dict[Key, ModPMatrix]] = None
    cup_an: Optional[dict[int, ModPMatrix]] = None
    an_class: Optional[np.ndarray] = None
    t: Optional[int] = None

    # --- accessors with implicit degree 0

    def dim(self, i: int, d: int) -> int:
        if d == 0:
            return 1
        if d > self.m:
            return 0
        return self.dims[(i, d)]

    def sigma_at(self, i: int, d: int) -> ModPMatrix:
        if d == 0:
            return ModPMatrix.identity(self.p, 1)
        return self.sigma[(i, d)]

    def iota_at(self, i: int, d: int) -> ModPMatrix:
        if not 0 <= i < self.n:
            raise TowerShapeError(f"no inclusion out of level {i}")
        if d == 0:
            return ModPMatrix.identity(self.p, 1)
        return self.iota[(i, d)]

    def norm_at(self, i: int, d: int) -> ModPMatrix:
        if not 0 < i <= self.n:
            raise TowerShapeError(f"no norm out of level {i}")
        if d == 0:
            return ModPMatrix.zeros(self.p, 1, 1)
        return self.norm[(i, d)]

    def cup_a_at(self, i: int, d: int) -> ModPMatrix:
        if d < 1:
            raise TowerShapeError("cup maps start in degree 1")
        return self.cup_a[(i, d)]

    def iota_comp(self, j: int, i: int, d: int) -> ModPMatrix:
        """Inclusion ``k[j][d] -> k[i][d]`` for ``j <= i``."""
        if j > i:
            raise TowerShapeError(f"inclusion from level {j} to lower level {i}")
        out = ModPMatrix.identity(self.p, self.dim(j, d))
        for h in range(j, i):
            out = self.iota_at(h, d) @ out
        return out

    def norm_comp(self, i: int, j: int, d: int) -> ModPMatrix:
        """Norm ``k[i][d] -> k[j][d]`` for ``j <= i``."""
        if j > i:
            raise TowerShapeError(f"norm from level {i} to higher level {j}")
        out = ModPMatrix.identity(self.p, self.dim(i, d))
        for h in range(i, j, -1):
            out = self.norm_at(h, d) @ out
        return out

    def module(self, i: int, d: int) -> GModule:
        """``k[i][d]`` as a module over the group ``Z/p^i`` of ``E_i/F``."""
        return make_module(self.p, i, self.sigma_at(i, d))

    @property
    def top_class(self) -> np.ndarray:
        """The class multiplying on the top level: ``t * a_n``."""
        if self.an_class is None or self.t is None:
            raise TowerShapeError("tower has no a_n class")
        return (self.t * self.an_class) % self.p

    # --- derived towers

    def truncate(self, h: int) -> "Tower":
        """The subtower ``E_0 < ... < E_h``; ``a_h`` plays the role of the top class with ``t = 1``."""
        if not 1 <= h <= self.n:
            raise TowerShapeError(f"cannot truncate a height-{self.n} tower at {h}")
        if h == self.n:
            return self
        keep = lambda dct: {k: v for k, v in dct.items() if k[0] <= h}  # noqa: E731
        return Tower(
            p=self.p,
            n=h,
            m=self.m,
            dims=keep(self.dims),
            sigma=keep(self.sigma),
            iota={k: v for k, v in self.iota.items() if k[0] < h},
            norm=keep(self.norm),
            cup_a={k: v for k, v in self.cup_a.items() if k[0] < h},
            a_class={i: v for i, v in self.a_class.items() if i < h},
            xi_class={i: v for i, v in self.xi_class.items() if i <= h},
            cup_xi=None if self.cup_xi is None else keep(self.cup_xi),
            cup_an={d: self.cup_a[(h, d)] for d in range(1, self.m + 1)},
            an_class=self.a_class[h].copy(),
            t=1,
        )

    def relative(self, j: int) -> "Tower":
        """The tower of ``E_n / E_j``: levels ``j..n`` renumbered, generator ``sigma^(p^j)``."""
        if not 0 <= j < self.n:
            raise TowerShapeError(f"relative tower needs 0 <= j < n, got {j}")
        if j == 0:
            return self
        shift = lambda dct, lo=j: {(k[0] - j, k[1]): v for k, v in dct.items() if k[0] >= lo}  # noqa: E731
        q = self.p**j
        return Tower(
            p=self.p,
            n=self.n - j,
            m=self.m,
            dims=shift(self.dims),
            sigma={(i - j, d): s.power(q) for (i, d), s in self.sigma.items() if i >= j},
            iota=shift(self.iota),
            norm={(i - j, d): v for (i, d), v in self.norm.items() if i > j},
            cup_a=shift(self.cup_a),
            a_class={i - j: v for i, v in self.a_class.items() if i >= j},
            xi_class={i - j: v for i, v in self.xi_class.items() if i >= j},
            cup_xi=None if self.cup_xi is None else shift(self.cup_xi),
            cup_an=self.cup_an,
            an_class=self.an_class,
            t=self.t,
        )


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise TowerShapeError(msg)


def check_shapes(T: Tower) -> None:
    """Raise :class:`TowerShapeError` unless every required piece is present with the right shape."""
    check_modulus(T.p)
    _require(T.n >= 1, f"tower height must be at least 1, got {T.n}")
    _require(T.m >= 1, f"top degree must be at least 1, got {T.m}")
    p = T.p

    def mat(store, key, rows, cols, label):
        _require(store is not None and key in store, f"missing {label} at {key}")
        a = store[key]
        _require(isinstance(a, ModPMatrix) and a.p == p, f"{label} at {key} is not a matrix mod {p}")
        _require(a.shape == (rows, cols), f"{label} at {key} has shape {a.shape}, expected {(rows, cols)}")

    def vec(v, size, label):
        _require(v is not None, f"missing {label}")
        v = np.asarray(v)
        _require(v.shape == (size,), f"{label} has shape {v.shape}, expected ({size},)")

    for i in range(T.n + 1):
        for d in range(1, T.m + 1):
            _require((i, d) in T.dims and T.dims[(i, d)] >= 0, f"missing dimension of space level={i} degree={d}")
    for i in range(T.n + 1):
        for d in range(1, T.m + 1):
            k = T.dim(i, d)
            mat(T.sigma, (i, d), k, k, "sigma")
            if i < T.n:
                mat(T.iota, (i, d), T.dim(i + 1, d), k, "iota")
                mat(T.cup_a, (i, d), k, T.dim(i, d - 1), "cup_a")
            if i > 0:
                mat(T.norm, (i, d), T.dim(i - 1, d), k, "norm")
            if T.cup_xi is not None:
                mat(T.cup_xi, (i, d), k, T.dim(i, d - 1), "cup_xi")
        if i < T.n:
            _require(i in T.a_class, f"missing class a level={i}")
            vec(T.a_class[i], T.dim(i, 1), f"class a level={i}")
        _require(i in T.xi_class, f"missing class xi level={i}")
        vec(T.xi_class[i], T.dim(i, 1), f"class xi level={i}")
    if T.cup_an is not None:
        for d in range(1, T.m + 1):
            mat(T.cup_an, d, T.dim(T.n, d), T.dim(T.n, d - 1), "cup_an")
    if T.an_class is not None:
        vec(T.an_class, T.dim(T.n, 1), "class an")
    if T.t is not None:
        _require(1 <= T.t < p, f"scalar t={T.t} outside [1, {p})")


# ---------------------------------------------------------------------------
# axiom validation


@dataclass
class CheckResult:
    name: str
    level: int | None
    degree: int | None
    passed: bool
    witness: list[int] | None = None
    detail: str = ""

    def line(self) -> str:
        where = []
        if self.level is not None:
            where.append(f"level={self.level}")
        if self.degree is not None:
            where.append(f"degree={self.degree}")
        s = f"{'PASS' if self.passed else 'FAIL'} {self.name}"
        if where:
            s += " " + " ".join(where)
        if not self.passed:
            if self.detail:
                s += f": {self.detail}"
            if self.witness is not None:
                s += f" witness={self.witness}"
        return s


@dataclass
class ValidationReport:
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def names(self) -> set[str]:
        return {c.name for c in self.checks}

    def lines(self) -> list[str]:
        return [c.line() for c in self.checks]


def _witness_cols(a: ModPMatrix, target: Subspace) -> np.ndarray | None:
    """First column of ``a`` outside ``target``."""
    for j in range(a.cols):
        col = a.column(j)
        if not target.contains(col):
            return col
    return None


def _witness_rows(vectors: np.ndarray, target: Subspace) -> np.ndarray | None:
    for v in vectors:
        if not target.contains(v):
            return v
    return None


def _eq_witness(a: ModPMatrix, b: ModPMatrix) -> np.ndarray | None:
    """Standard basis vector where the two maps differ, or ``None`` when equal."""
    diff = (a.data - b.data) % a.p
    cols = np.flatnonzero(diff.any(axis=0))
    if cols.size == 0:
        return None
    e = np.zeros(a.cols, dtype=np.int64)
    e[cols[0]] = 1
    return e


def validate_axioms(T: Tower, strict: bool = False) -> ValidationReport:
    """Run every structural check; shapes are verified first and raise on failure."""
    check_shapes(T)
    p, n, m = T.p, T.n, T.m
    rep = ValidationReport()

    def add(name, i, d, witness, detail=""):
        rep.checks.append(
            CheckResult(name, i, d, witness is None, None if witness is None else np.asarray(witness).tolist(), detail)
        )

    def same(name, i, d, a, b, detail=""):
        add(name, i, d, _eq_witness(a, b), detail)

    def inside(name, i, d, a_cols: ModPMatrix, target: Subspace, detail=""):
        add(name, i, d, _witness_cols(a_cols, target), detail)

    def equal_spaces(name, i, d, lhs: Subspace, rhs: Subspace, detail=""):
        w = _witness_rows(lhs.basis, rhs)
        if w is None:
            w = _witness_rows(rhs.basis, lhs)
        add(name, i, d, w, detail)

    for i in range(n + 1):
        for d in range(1, m + 1):
            s = T.sigma_at(i, d)
            same("order", i, d, s.power(p**i), ModPMatrix.identity(p, s.rows), f"sigma^({p}^{i}) != 1")

    for i in range(n + 1):
        for d in range(1, m + 1):
            s = T.sigma_at(i, d)
            if i < n:
                same("equivariance.iota", i, d, T.iota_at(i, d) @ s, T.sigma_at(i + 1, d) @ T.iota_at(i, d))
                ca = T.cup_a_at(i, d)
                same("equivariance.cup_a", i, d, ca @ T.sigma_at(i, d - 1), s @ ca)
            if i > 0:
                same("equivariance.norm", i, d, T.norm_at(i, d) @ s, T.sigma_at(i - 1, d) @ T.norm_at(i, d))
            if T.cup_xi is not None:
                cx = T.cup_xi[(i, d)]
                same("equivariance.cup_xi", i, d, cx @ T.sigma_at(i, d - 1), s @ cx)

    for i in range(n + 1):
        s1 = T.sigma_at(i, 1)
        for label, cls in (("a", T.a_class.get(i)), ("xi", T.xi_class.get(i))):
            if cls is None:
                continue
            diff = (s1 @ cls - cls) % p
            add(f"fixedness.{label}", i, 1, None if not diff.any() else cls)
        if i < n:
            col = ModPMatrix.from_columns(p, [T.a_class[i]], T.dim(i, 1))
            same("cup_degree1.a", i, 1, T.cup_a_at(i, 1), col)
        if T.cup_xi is not None:
            col = ModPMatrix.from_columns(p, [T.xi_class[i]], T.dim(i, 1))
            same("cup_degree1.xi", i, 1, T.cup_xi[(i, 1)], col)
    if T.cup_an is not None and T.an_class is not None and T.t is not None:
        col = ModPMatrix.from_columns(p, [T.top_class], T.dim(n, 1))
        same("cup_degree1.an", n, 1, T.cup_an[1], col)

    for i in range(1, n):
        for j in range(i):
            img = T.norm_comp(i, j, 1) @ T.a_class[i]
            add("norm_compatibility", i, 1, None if np.array_equal(img, T.a_class[j] % p) else T.a_class[i], f"to level {j}")

    for i in range(n):
        for d in range(1, m + 1):
            ca = T.cup_a_at(i, d)
            # norm side; skipped in degree 1 on a zero space, where it holds vacuously
            if not (d == 1 and T.dim(i, 1) == 0):
                equal_spaces(
                    "kummer.norm_side",
                    i,
                    d,
                    Subspace.column_space(T.norm_at(i + 1, d - 1)),
                    Subspace.kernel(ca),
                    "im(norm) != ker(cup_a)",
                )
            ker_iota = Subspace.kernel(T.iota_at(i, d))
            w = _witness_cols(ca, ker_iota)
            if w is None:
                w = _witness_rows(ker_iota.basis, Subspace.column_space(ca))
            add("kummer.iota_side", i, d, w, "im(cup_a) != ker(iota)")

    for i in range(n - 1):
        for d in range(1, m + 1):
            lhs = T.norm_at(i + 1, d) @ T.cup_a_at(i + 1, d) @ T.iota_at(i, d - 1)
            same("projection", i, d, lhs, T.cup_a_at(i, d))
    if T.cup_an is not None:
        for d in range(1, m + 1):
            lhs = T.norm_at(n, d) @ T.cup_an[d] @ T.iota_at(n - 1, d - 1)
            same("projection.an", n - 1, d, lhs, T.cup_a_at(n - 1, d))
    if T.an_class is not None and T.t is not None:
        img = (T.norm_at(n, 1) @ T.top_class) % p
        add("an_norm", n, 1, None if np.array_equal(img, T.a_class[n - 1] % p) else T.an_class)

    for i in range(1, n + 1):
        for j in range(i):
            for d in range(0, m + 1):
                lhs = T.iota_comp(j, i, d) @ T.norm_comp(i, j, d)
                theta = T.sigma_at(i, d) - ModPMatrix.identity(p, T.dim(i, d))
                same("norm_as_power", i, d, lhs, theta.power(p**i - p**j), f"from level {j}")

    if strict:
        for d in range(1, m + 1):
            s = T.sigma_at(n, d)
            fixed = Subspace.kernel(s.power(p ** (n - 1)) - ModPMatrix.identity(p, s.rows))
            lhs = Subspace.kernel(T.norm_at(n, d)) & fixed
            equal_spaces("lms", n, d, lhs, Subspace.column_space(T.iota_at(n - 1, d)))
        missing = [
            name
            for name, val in (("cup_xi", T.cup_xi), ("cup_an", T.cup_an), ("an_class", T.an_class), ("t", T.t))
            if val is None
        ]
        rep.checks.append(
            CheckResult("optional_data", None, None, not missing, None, "missing " + ", ".join(missing) if missing else "")
        )
    return rep


# ---------------------------------------------------------------------------
# exceptional elements


@dataclass
class ExceptionalReport:
    a_class: np.ndarray
    t: int
    index: float
    embeddable: bool

    def index_str(self) -> str:
        return "-inf" if self.index == NEG_INF else str(int(self.index))


def compute_exceptional(T: Tower, cap: int = 10**5) -> ExceptionalReport:
    """Search ``k[n][1]`` for a class of minimal index whose norm to ``F`` dies in ``E``.

    The index of ``a`` is the least level ``i`` with ``(sigma - 1) a`` in the
    image of ``k[i][1]``, and ``-inf`` when ``a`` is fixed.  Only candidates
    whose norm to level ``n-1`` is a nonzero multiple of ``a_(n-1)`` are
    admissible, since ``t`` must exist.
    """
    check_shapes(T)
    p, n = T.p, T.n
    D = T.dim(n, 1)
    if p**D > cap:
        raise ExceptionalError(f"enumeration cap exceeded: {p}^{D} > {cap}")
    allv = enumerate_space(p, D)
    n0 = T.norm_comp(n, 0, 1)
    down = allv @ n0.data.T % p
    back = down @ T.iota_comp(0, n, 1).data.T % p
    mask = down.any(axis=1) & ~back.any(axis=1)
    cands = allv[mask]
    if cands.shape[0] == 0:
        raise ExceptionalError("no candidate: no class has a norm that dies on the top level")

    target = T.a_class[n - 1] % p
    nn = cands @ T.norm_at(n, 1).data.T % p
    ts = np.zeros(cands.shape[0], dtype=np.int64)
    if target.any():
        piv = int(np.flatnonzero(target)[0])
        lead = nn[:, piv]
        ok = lead != 0
        inv = np.array([pow(int(x), -1, p) if x else 0 for x in lead], dtype=np.int64)
        ts = (inv * int(target[piv])) % p
        ok &= ~((ts[:, None] * nn - target[None, :]) % p).any(axis=1)
    else:
        ok = np.zeros(cands.shape[0], dtype=bool)
    if not ok.any():
        raise ExceptionalError("no valid t: no candidate has norm a nonzero multiple of a_(n-1)")
    cands, ts = cands[ok], ts[ok]

    theta = T.sigma_at(n, 1) - ModPMatrix.identity(p, D)
    moved = cands @ theta.data.T % p
    index = np.full(cands.shape[0], np.inf)
    index[~moved.any(axis=1)] = NEG_INF
    for i in range(n, -1, -1):
        inside = Subspace.column_space(T.iota_comp(i, n, 1)).members(moved)
        index[inside & (index != NEG_INF)] = i
    best = int(np.argmin(index))
    idx = index[best]
    if idx > n - 1:
        raise ExceptionalError(f"index bound violated: minimal index {idx} exceeds n-1 = {n - 1}")
    return ExceptionalReport(cands[best].copy(), int(ts[best]), NEG_INF if idx == NEG_INF else int(idx), bool(idx == NEG_INF))


def is_embeddable(T: Tower) -> bool:
    """Embeddability of the top extension; towers without an exceptional class count as non-embeddable."""
    try:
        return compute_exceptional(T).embeddable
    except ExceptionalError:
        return False


# ---------------------------------------------------------------------------
# direct sums


def _diag_class(p: int, u, v) -> np.ndarray:
    return np.concatenate([np.asarray(u, dtype=np.int64), np.asarray(v, dtype=np.int64)]) % p


def _sum_from_degree0(p: int, a: ModPMatrix, b: ModPMatrix) -> ModPMatrix:
    """Stack two maps out of the shared one-dimensional degree 0."""
    return ModPMatrix(p, np.vstack([a.data, b.data]))


def tower_direct_sum(T1: Tower, T2: Tower) -> tuple[Tower, ValidationReport]:
    """Blockwise sum of two towers, validated afterwards.

    Degree 0 stays one-dimensional, so maps out of it are stacked, and the
    distinguished classes are the diagonal ones ``(c1, c2)``.  The result is
    generally not exact in degree 1; the report records what failed.
    """
    if (T1.p, T1.n, T1.m) != (T2.p, T2.n, T2.m):
        raise TowerShapeError(f"parameter mismatch: (p,n,m) = {(T1.p, T1.n, T1.m)} vs {(T2.p, T2.n, T2.m)}")
    check_shapes(T1)
    check_shapes(T2)
    p = T1.p

    def bd(a, b):
        return block_diag(p, [a, b])

    def cups(c1, c2):
        return {k: (_sum_from_degree0(p, c1[k], c2[k]) if k[1] == 1 else bd(c1[k], c2[k])) for k in c1}

    has_an = T1.cup_an is not None and T2.cup_an is not None and T1.an_class is not None and T2.an_class is not None
    has_an = has_an and T1.t is not None and T2.t is not None
    cup_an = None
    an_class = None
    if has_an:
        cup_an = {
            d: (_sum_from_degree0(p, T1.cup_an[d], T2.cup_an[d]) if d == 1 else bd(T1.cup_an[d], T2.cup_an[d]))
            for d in T1.cup_an
        }
        an_class = _diag_class(p, T1.top_class, T2.top_class)
    T = Tower(
        p=p,
        n=T1.n,
        m=T1.m,
        dims={k: T1.dims[k] + T2.dims[k] for k in T1.dims},
        sigma={k: bd(T1.sigma[k], T2.sigma[k]) for k in T1.sigma},
        iota={k: bd(T1.iota[k], T2.iota[k]) for k in T1.iota},
        norm={k: bd(T1.norm[k], T2.norm[k]) for k in T1.norm},
        cup_a=cups(T1.cup_a, T2.cup_a),
        a_class={i: _diag_class(p, T1.a_class[i], T2.a_class[i]) for i in T1.a_class},
        xi_class={i: _diag_class(p, T1.xi_class[i], T2.xi_class[i]) for i in T1.xi_class},
        cup_xi=cups(T1.cup_xi, T2.cup_xi) if T1.cup_xi is not None and T2.cup_xi is not None else None,
        cup_an=cup_an,
        an_class=an_class,
        t=1 if has_an else None,
    )
    return T, validate_axioms(T, strict=False)


def zero_tower(p: int, n: int, m: int) -> Tower:
    """The tower with every positive-degree space zero."""
    z = lambda r, c: ModPMatrix.zeros(p, r, c)  # noqa: E731
    keys = [(i, d) for i in range(n + 1) for d in range(1, m + 1)]
    e = np.zeros(0, dtype=np.int64)
    return Tower(
        p=p,
        n=n,
        m=m,
        dims={k: 0 for k in keys},
        sigma={k: z(0, 0) for k in keys},
        iota={k: z(0, 0) for k in keys if k[0] < n},
        norm={k: z(0, 0) for k in keys if k[0] > 0},
        cup_a={k: z(0, 1 if k[1] == 1 else 0) for k in keys if k[0] < n},
        a_class={i: e.copy() for i in range(n)},
        xi_class={i: e.copy() for i in range(n + 1)},
        cup_xi={k: z(0, 1 if k[1] == 1 else 0) for k in keys},
        cup_an={d: z(0, 1 if d == 1 else 0) for d in range(1, m + 1)},
        an_class=e.copy(),
        t=1,
    )
