"""Constructive decompositions of ``k_d E_n``.

Every existence step (lifts through ``theta`` powers, norms and inclusions,
choices of complements) is a linear solve or a pivot-greedy complement, and
each structural claim about the result is re-checked afterwards.

Level/degree conventions: ``build_gamma(T, i, d)`` produces ``Gamma(d, i)``
inside ``k[i-1][d-1]``, a complement of the norm image from level ``i``
on which multiplication by ``{a_(i-1)}`` is injective.  ``construct_theorem2``
assembles ``k[n][d] = X_0 + ... + X_(n-1) + Y_0 + ... + Y_n`` from it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ClauseError, ExceptionalError, LiftError, NotEmbeddableError, TowerShapeError
from .fpla import ModPMatrix, Subspace, enumerate_space, solve
from .gmod import GModule, cyclic_span, decompose, exclusion_check, gap_dimensions, lengths, v_filtration
from .ktower import CheckResult, Tower, check_shapes, compute_exceptional

SCAN_LIMIT_EXP = 8
SAMPLE_SIZE = 500


def _res(name, passed, witness=None, detail="", level=None, degree=None) -> CheckResult:
    w = None if witness is None else np.asarray(witness).tolist()
    return CheckResult(name, level, degree, bool(passed), w, detail)


def _first_outside(vectors, target: Subspace):
    for v in vectors:
        if not target.contains(v):
            return v
    return None


def _space_eq(name, lhs: Subspace, rhs: Subspace, detail="", level=None, degree=None) -> CheckResult:
    w = _first_outside(lhs.basis, rhs)
    if w is None:
        w = _first_outside(rhs.basis, lhs)
    return _res(name, w is None, w, detail, level, degree)


def _space_in(name, lhs: Subspace, rhs: Subspace, detail="", level=None, degree=None) -> CheckResult:
    w = _first_outside(lhs.basis, rhs)
    return _res(name, w is None, w, detail, level, degree)


def _is_power_of(x: int, p: int) -> bool:
    while x > 1 and x % p == 0:
        x //= p
    return x == 1


def _module_at(T: Tower, level: int, d: int) -> GModule:
    # the action on k[level][d] factors through Z/p^level; skip re-validation
    return GModule(T.p, level, T.sigma_at(level, d))


def _theta(T: Tower, level: int, d: int) -> ModPMatrix:
    s = T.sigma_at(level, d)
    return s - ModPMatrix.identity(T.p, s.rows)


def _span(T: Tower, level: int, d: int, gens) -> Subspace:
    return cyclic_span(_module_at(T, level, d), gens)


def _stack(gens, dim):
    return np.vstack(gens) if len(gens) else np.zeros((0, dim), dtype=np.int64)


@dataclass
class _Context:
    gamma: dict = field(default_factory=dict)
    thm2: dict = field(default_factory=dict)
    check: bool = True


# ---------------------------------------------------------------------------
# Gamma


@dataclass
class GammaResult:
    """``Gamma(d, i)`` inside ``k[i-1][d-1]`` with its stratification ``Z_0, ..., Z_(i-1)``.

    ``Z[j]`` lists generators of cyclic summands of dimension ``p^j``.  In the
    recursive case the refinement data of the top stratum of ``k[i-1][d-1]``
    is kept: fixed bases ``I_K``, ``I_N``, ``I_hat`` and the generator lists
    ``K``, ``N``, ``Y_hat``, plus the inner decomposition they refine.
    """

    p: int
    level: int
    degree: int
    Z: list[list[np.ndarray]]
    gamma: Subspace
    checks: list[CheckResult] = field(default_factory=list)
    I_K: Optional[np.ndarray] = None
    I_N: Optional[np.ndarray] = None
    I_hat: Optional[np.ndarray] = None
    K: list[np.ndarray] = field(default_factory=list)
    N: list[np.ndarray] = field(default_factory=list)
    Y_hat: list[np.ndarray] = field(default_factory=list)
    inner: Optional["Theorem2Report"] = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def generators(self) -> list[tuple[np.ndarray, int]]:
        return [(g, j) for j, zs in enumerate(self.Z) for g in zs]

    def profile(self) -> dict[int, int]:
        """Multiplicities of ``Gamma`` as a module over ``Z/p^(i-1)``."""
        return {self.p**j: len(zs) for j, zs in enumerate(self.Z) if zs}


def build_gamma(T: Tower, i: int, d: int, check: bool = True) -> GammaResult:
    """Stratified complement of ``N(k[i][d-1])`` in ``k[i-1][d-1]``.

    With ``check`` a failed clause raises :class:`ClauseError`; otherwise the
    failures stay in ``result.checks``.
    """
    check_shapes(T)
    if not 1 <= i <= T.n or not 1 <= d <= T.m:
        raise TowerShapeError(f"need 1 <= level <= {T.n} and 1 <= degree <= {T.m}, got ({i}, {d})")
    return _gamma(_Context(check=check), T, i, d)


def _gamma(ctx: _Context, T: Tower, i: int, d: int) -> GammaResult:
    key = (i, d)
    if key in ctx.gamma:
        return ctx.gamma[key]
    p = T.p
    L, e = i - 1, d - 1
    dimL = T.dim(L, e)
    norm_img = Subspace.column_space(T.norm_at(i, e))

    if i == 1 or d == 1:
        # the action on k[i-1][d-1] is trivial here
        gens = list(norm_img.complement_vectors(Subspace.full(p, dimL)))
        Z = [gens] + [[] for _ in range(L)]
        res = GammaResult(p, L + 1, d, Z, Subspace.span(p, dimL, gens))
    else:
        inner = _theorem2(ctx, T.truncate(L), e, inner=True)
        M_L = T.iota_comp(0, L, e) @ T.norm_comp(L, 0, e)
        W = Subspace.column_space(M_L)
        ker_i = Subspace.kernel(T.iota_at(L, e))
        IK = (ker_i & W).basis.copy()
        lower = T.iota_comp(0, L, e) @ T.norm_comp(i, 0, e)
        S = Subspace.column_space(lower)
        IN = (ker_i & S).complement_vectors(S)
        IKN = Subspace.span(p, dimL, list(IK) + list(IN))
        Ihat = IKN.complement_vectors(W)

        K, Nn, Yh = [], [], []
        for x in IK:
            a = solve(M_L, x, within=ker_i)
            if a is None:
                raise LiftError(f"no lift: fixed class {x.tolist()} of the inclusion kernel has no norm preimage inside the kernel")
            K.append(a)
        for x in IN:
            b = solve(lower, x)
            if b is None:
                raise LiftError(f"no lift: {x.tolist()} is not a norm from level {i}")
            Nn.append(T.norm_at(i, e) @ b)
        for x in Ihat:
            a = solve(M_L, x)
            if a is None:
                raise LiftError(f"no lift: {x.tolist()} is not in the image of the top norm")
            Yh.append(a)
        Z = [list(inner.Y[j]) for j in range(L)] + [Yh]
        gens = [g for zs in Z for g in zs]
        res = GammaResult(p, L + 1, d, Z, _span(T, L, e, gens))
        res.I_K, res.I_N, res.I_hat = IK, IN, Ihat
        res.K, res.N, res.Y_hat = K, Nn, Yh
        res.inner = inner

        xs = [g for xk in inner.X for g in xk]
        res.checks.append(_space_eq("gamma.inclusion_kernel", ker_i, _span(T, L, e, xs + K), "ker(iota) != X + K", L, e))
        res.checks.append(
            _space_eq("gamma.norm_image", norm_img, _span(T, L, e, xs + K + Nn), "im(norm) != X + K + N", L, e)
        )
    res.checks[:0] = _gamma_clauses(ctx, T, res)
    ctx.gamma[key] = res
    if ctx.check:
        for c in res.checks:
            if not c.passed:
                raise ClauseError(c.name, c.detail or "failed", c.witness)
    return res


def _gamma_clauses(ctx: _Context, T: Tower, res: GammaResult) -> list[CheckResult]:
    p = T.p
    i, d = res.level, res.degree
    L, e = i - 1, d - 1
    dimL = T.dim(L, e)
    mod = _module_at(T, L, e)
    out = []

    # (1) strata come from the right levels, are free there, and have the right fixed parts
    ok, wit, why = True, None, ""
    for j, zs in enumerate(res.Z):
        if not zs:
            continue
        span = cyclic_span(mod, zs)
        img = Subspace.column_space(T.iota_comp(j, L, e))
        w = _first_outside(span.basis, img)
        if w is not None:
            ok, wit, why = False, w, f"Z_{j} not included from level {j}"
            break
        bad = [g for g, ell in zip(zs, lengths(mod, _stack(zs, dimL))) if ell != p**j]
        if bad:
            ok, wit, why = False, bad[0], f"Z_{j} generator does not have length {p**j}"
            break
        fix_target = Subspace.column_space(T.iota_comp(0, L, e) @ T.norm_comp(j, 0, e))
        w = _first_outside((span & mod.fixed()).basis, fix_target)
        if w is not None:
            ok, wit, why = False, w, f"fixed part of Z_{j} is not a norm from level {j}"
            break
    gens = [g for zs in res.Z for g in zs]
    if ok and gens and not exclusion_check(mod, [[g] for g in gens]):
        ok, why = False, "strata are not independent"
    out.append(_res("gamma.1", ok, wit, why, L, e))

    # (2) complement of the norm image
    norm_img = Subspace.column_space(T.norm_at(i, e))
    whole = res.gamma + norm_img
    direct = res.gamma.dim + norm_img.dim == dimL
    wit = None
    if whole.dim != dimL:
        wit = _first_outside(np.eye(dimL, dtype=np.int64), whole)
    elif not direct:
        wit = (res.gamma & norm_img).basis[0]
    out.append(_res("gamma.2", wit is None and direct, wit, "Gamma + im(norm) is not a direct complement", L, e))

    # (3) and (4): multiplication by a_(i-1) on Gamma
    cup = T.cup_a_at(L, d)
    img_all = Subspace.column_space(cup)
    img_g = res.gamma.image(cup)
    out.append(_space_eq("gamma.3", img_all, img_g, "{a} . Gamma misses part of {a} . k", L, d))
    inj = img_g.dim == res.gamma.dim
    stable = res.gamma.image(T.sigma_at(L, e)) == res.gamma
    equi = cup @ T.sigma_at(L, e) == T.sigma_at(L, d) @ cup
    wit = None
    if not inj:
        wit = (Subspace.kernel(cup) & res.gamma).basis[0]
    out.append(
        _res("gamma.4", inj and stable and equi, wit, "multiplication by {a} is not an equivariant injection on Gamma", L, d)
    )

    if i >= 2:
        out.append(_fixed_norms(ctx, T, res, mod))
    return out


def _fixed_norms(ctx: _Context, T: Tower, res: GammaResult, mod: GModule) -> CheckResult:
    """Fixed ``g`` in Gamma with ``N({a} g) = 0`` lie in ``theta^(p^L - 1) Gamma``."""
    p = T.p
    L, e, d = res.level - 1, res.degree - 1, res.degree
    fixed = res.gamma & mod.fixed()
    killer = T.norm_at(L, d) @ T.cup_a_at(L, d)
    hyp = fixed & Subspace.kernel(killer)
    target = res.gamma.image(mod.theta.power(p**L - 1))
    w = _first_outside(hyp.basis, target)
    return _res("gamma.fixed_norms", w is None, w, "fixed element of Gamma with vanishing norm is not a top norm", L, e)


def fixed_norms_exhaustive(T: Tower, res: GammaResult) -> tuple[int, int]:
    """Enumerate every fixed ``g`` of Gamma; return ``(hypothesis count, failures)``."""
    p = T.p
    L, e, d = res.level - 1, res.degree - 1, res.degree
    if L < 1:
        return 0, 0
    mod = _module_at(T, L, e)
    fixed = res.gamma & mod.fixed()
    elems = fixed.enumerate()
    killer = T.norm_at(L, d) @ T.cup_a_at(L, d)
    hit = ~(elems @ killer.data.T % p).any(axis=1)
    # the image of theta^(p^L - 1) on Gamma, enumerated independently
    img = enumerate_space(p, res.gamma.dim) @ res.gamma.basis % p @ mod.theta.power(p**L - 1).data.T % p
    img_set = {tuple(r) for r in img}
    fails = sum(1 for g, h in zip(elems, hit) if h and tuple(g) not in img_set)
    return int(hit.sum()), fails


# ---------------------------------------------------------------------------
# fine decomposition


@dataclass
class Theorem2Report:
    """``k[n][d] = X_0 + ... + X_(n-1) + Y_0 + ... + Y_n`` with per-clause results.

    ``X[i]`` and ``Y[i]`` list generators of cyclic summands of dimension ``p^i``.
    """

    n: int
    degree: int
    t: int
    X: list[list[np.ndarray]]
    Y: list[list[np.ndarray]]
    I: list[np.ndarray]
    multiplicities: dict[int, int]
    gamma: GammaResult
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> list[str]:
        return [c.line() for c in self.checks]


def _top_class_admissible(T: Tower) -> bool:
    """The top class is fixed, its norm to ``F`` dies on top, and ``t N(a_n) = a_(n-1)``."""
    p, n = T.p, T.n
    a = T.an_class % p
    if (_theta(T, n, 1) @ a).any():
        return False
    down = T.norm_comp(n, 0, 1) @ a
    if not down.any() or (T.iota_comp(0, n, 1) @ down).any():
        return False
    return np.array_equal(T.norm_at(n, 1) @ T.top_class, T.a_class[n - 1] % p)


def construct_theorem2(T: Tower, d: int, check: bool = True) -> Theorem2Report:
    """Decompose ``k[n][d]`` into the families ``X_i`` and ``Y_i``.

    Needs an embeddable tower carrying multiplication by its top class.  With
    ``check`` a failed clause raises :class:`ClauseError`.
    """
    check_shapes(T)
    if not 1 <= d <= T.m:
        raise TowerShapeError(f"degree {d} outside [1, {T.m}]")
    if T.cup_an is None or T.an_class is None or T.t is None:
        raise TowerShapeError("tower has no multiplication by the top class")
    try:
        rep = compute_exceptional(T)
    except ExceptionalError as exc:
        raise NotEmbeddableError(f"tower not embeddable: {exc}") from exc
    if not rep.embeddable:
        raise NotEmbeddableError(f"tower not embeddable: index {rep.index_str()}")
    return _theorem2(_Context(check=check), T, d, inner=False)


def _theorem2(ctx: _Context, T: Tower, d: int, inner: bool) -> Theorem2Report:
    key = (T.n, d)
    if key in ctx.thm2:
        return ctx.thm2[key]
    p, n = T.p, T.n
    D = T.dim(n, d)
    mod = _module_at(T, n, d)
    if inner and not _top_class_admissible(T):
        raise NotEmbeddableError(f"a_{n} is not an admissible fixed class of the truncated tower")

    G = _gamma(ctx, T, n, d)
    cup = T.cup_an[d]
    iota_top = T.iota_at(n - 1, d - 1)
    X = [[cup @ (iota_top @ g) for g in zs] for zs in G.Z]

    # Y: complements down the filtration of top norm images
    ranges = [Subspace.column_space(T.iota_comp(0, n, d) @ T.norm_comp(i, 0, d)) for i in range(n + 1)]
    I = [None] * (n + 1)
    Y: list[list[np.ndarray]] = [[] for _ in range(n + 1)]
    I[n] = ranges[n].basis.copy()
    for i in range(n - 1, -1, -1):
        I[i] = ranges[i + 1].complement_vectors(ranges[i])
    for i in range(n + 1):
        M = T.iota_comp(0, i, d) @ T.norm_comp(i, 0, d)
        up = T.iota_comp(i, n, d)
        for x in I[i]:
            # solve iota^n_0 N^i_0 alpha = x with alpha at level i
            a = solve(up @ M, x)
            if a is None:
                raise LiftError(f"no lift: {x.tolist()} is not a norm from level {i}")
            Y[i].append(up @ a)

    checks: list[CheckResult] = []
    xs = [g for xk in X for g in xk]
    ys = [g for yk in Y for g in yk]
    gens = xs + ys
    J = cyclic_span(mod, gens)
    JG = J & mod.fixed()

    # (a) J is direct and everything; filtration collapses
    direct = exclusion_check(mod, [[g] for g in gens]) if gens else True
    full = J.dim == D
    wit = None if full else _first_outside(np.eye(D, dtype=np.int64), J)
    ok = direct and full
    why = "" if ok else ("sum X + Y is not direct" if not direct else "X + Y does not exhaust the space")
    if ok:
        V = [None] + v_filtration(mod) + [Subspace.zero(p, D)]
        for i in range(n):
            target = Subspace.column_space(mod.theta.power(p ** (i + 1) - 1)) & JG
            for j in range(1, p ** (i + 1) - p**i + 1):
                w = _first_outside(V[p**i + j].basis, target)
                if w is not None:
                    ok, wit, why = False, w, f"V_{p**i + j} does not collapse to V_{p ** (i + 1)}"
                    break
            if not ok:
                break
    checks.append(_res("theorem2.a", ok, wit, why, n, d))

    # (b) summand dimensions are powers of p
    wit, why = None, ""
    for k, fam in ((k, X[k]) for k in range(n)):
        for g, ell in zip(fam, lengths(mod, _stack(fam, D))):
            if ell != p**k and wit is None:
                wit, why = g, f"X_{k} generator has length {ell}"
    for k in range(n + 1):
        for g, ell in zip(Y[k], lengths(mod, _stack(Y[k], D))):
            if ell != p**k and wit is None:
                wit, why = g, f"Y_{k} generator has length {ell}"
    dec = decompose(mod)
    bad = [c for c in dec.multiplicities if not _is_power_of(c, p)]
    if bad and wit is None:
        why = f"summand of dimension {bad[0]}"
    checks.append(_res("theorem2.b", wit is None and not bad, wit, why, n, d))

    # (c) X_i sits in {a_n^t} . iota^n_i(k[i][d-1])
    ok, wit, why = True, None, ""
    for k in range(n):
        if not X[k]:
            continue
        target = Subspace.column_space(cup @ T.iota_comp(k, n, d - 1))
        w = _first_outside(cyclic_span(mod, X[k]).basis, target)
        if w is not None:
            ok, wit, why = False, w, f"X_{k} is not a multiple of classes from level {k}"
            break
    checks.append(_res("theorem2.c", ok, wit, why, n, d))

    # (d) top norm images from level i are the fixed part of Y_i + ... + Y_n
    ok, wit, why = True, None, ""
    for i in range(n + 1):
        tail = [g for yk in Y[i:] for g in yk]
        fixed_tail = cyclic_span(mod, tail) & mod.fixed()
        c = _space_eq("tmp", ranges[i], fixed_tail)
        if not c.passed:
            ok, wit, why = False, c.witness, f"norm image from level {i} differs from the fixed part of Y_{i}+...+Y_{n}"
            break
    checks.append(_res("theorem2.d", ok, wit, why, n, d))

    # X is a copy of Gamma
    gl = lengths(_module_at(T, n - 1, d - 1), _stack([g for zs in G.Z for g in zs], T.dim(n - 1, d - 1)))
    xl = lengths(mod, _stack(xs, D))
    same = np.array_equal(gl, xl) and cyclic_span(mod, xs).dim == G.gamma.dim
    checks.append(_res("theorem2.x_iso_gamma", same, None, "" if same else "X and Gamma have different profiles", n, d))

    mult: dict[int, int] = {}
    for k in range(n + 1):
        c = (len(X[k]) if k < n else 0) + len(Y[k])
        if c:
            mult[p**k] = c
    agree = mult == dec.multiplicities
    checks.append(_res("theorem2.multiplicities", agree, None, "" if agree else f"{mult} vs {dec.multiplicities}", n, d))

    rep = Theorem2Report(n, d, int(T.t), X, Y, I, mult, G, checks)
    ctx.thm2[key] = rep
    if ctx.check:
        for c in checks:
            if not c.passed:
                raise ClauseError(c.name, c.detail or "failed", c.witness)
    return rep


def gamma_results(rep: Theorem2Report) -> list[GammaResult]:
    """Every Gamma built while producing ``rep``, outermost first."""
    out, stack = [], [rep.gamma]
    while stack:
        g = stack.pop()
        out.append(g)
        if g.inner is not None:
            stack.append(g.inner.gamma)
    return out


# ---------------------------------------------------------------------------
# lifts and fixed elements


def h_length(T: Tower, j: int, d: int, gamma) -> int:
    """Length of ``gamma`` in ``k[n][d]`` under the subgroup generated by ``sigma^(p^j)``."""
    tau = T.sigma_at(T.n, d).power(T.p**j)
    return int(lengths(GModule(T.p, T.n - j, tau), np.atleast_2d(gamma))[0])


def lift_fixed_element(T: Tower, i: int, d: int, gamma) -> np.ndarray:
    """Class at level ``i`` including to ``gamma`` with the same length.

    ``gamma`` must be fixed by ``sigma^(p^i)`` and have zero norm to level
    ``n-1``.  When the length is at most ``p^i - p^(i-1)`` the lift is also
    taken with zero norm to level ``i-1``.
    """
    check_shapes(T)
    p, n = T.p, T.n
    if not 0 <= i <= n:
        raise ValueError(f"level {i} outside [0, {n}]")
    gamma = np.asarray(gamma, dtype=np.int64) % p
    s = T.sigma_at(n, d)
    if gamma.shape != (s.rows,):
        raise ValueError(f"class of length {gamma.shape} in a space of dimension {s.rows}")
    if ((s.power(p**i) @ gamma - gamma) % p).any():
        raise ValueError(f"class is not fixed by sigma^({p}^{i})")
    if n >= 1 and (T.norm_at(n, d) @ gamma).any():
        raise ValueError("class has nonzero norm")
    if i == n or not gamma.any():
        return gamma.copy() if i == n else np.zeros(T.dim(i, d), dtype=np.int64)
    ell = int(lengths(_module_at(T, n, d), gamma[None, :])[0])
    within = Subspace.kernel(_theta(T, i, d).power(ell))
    if i >= 1 and ell <= p**i - p ** (i - 1):
        within = within & Subspace.kernel(T.norm_at(i, d))
    x = solve(T.iota_comp(i, n, d), gamma, within=within)
    if x is None:
        raise LiftError("no lift: axiom violation")
    if int(lengths(_module_at(T, i, d), x[None, :])[0]) != ell:
        raise LiftError("no lift: axiom violation (length changed)")
    return x


@dataclass
class ScanReport:
    degree: int
    level: int
    mode: str
    total: int = 0
    checked: int = 0
    vacuous: int = 0
    failures: list[list[int]] = field(default_factory=list)
    cor_checked: int = 0
    cor_failures: list[list[int]] = field(default_factory=list)
    embeddable: bool = False

    @property
    def passed(self) -> bool:
        return not self.failures and not self.cor_failures


def _sample(p: int, D: int, gammas, seed: int) -> tuple[np.ndarray, str]:
    if isinstance(gammas, str):
        if gammas != "exhaustive":
            raise ValueError(f"unknown scan mode {gammas!r}")
        if D <= SCAN_LIMIT_EXP:
            return enumerate_space(p, D), "exhaustive"
        rng = np.random.Generator(np.random.PCG64(seed))
        return rng.integers(0, p, size=(SAMPLE_SIZE, D), dtype=np.int64), "sampled"
    arr = np.atleast_2d(np.asarray(gammas, dtype=np.int64)) % p
    return arr, "given"


def relative_embeddable(T: Tower, j: int) -> bool:
    """Whether ``E_n / E_j`` embeds in a cyclic extension of degree ``p^(n-j+1)``."""
    try:
        return compute_exceptional(T.relative(j)).embeddable
    except ExceptionalError:
        return False


def check_fixed_elements_are_norms(T: Tower, d: int, j: int, gammas="exhaustive", seed: int = 0) -> ScanReport:
    """Scan classes of ``k[n][d]`` for the fixed-elements-are-norms property relative to ``E_j``.

    A class ``g`` with ``l = l_H(g)`` for ``H = <sigma^(p^j)>`` is tested when
    ``l > 2 p^(n-j-1)``, or ``l > p^(n-j-1)`` and either ``E_n/E_j`` is
    embeddable or ``N(g) = 0``; then ``(sigma^(p^j) - 1)^(l-1) g`` must lie in
    ``iota^n_j N^n_j (k[n][d])``.  For ``j = 0`` the minimal-level refinement
    is checked as well.
    """
    check_shapes(T)
    p, n = T.p, T.n
    if not 0 <= j < n:
        raise ValueError(f"j={j} outside [0, {n})")
    D = T.dim(n, d)
    vecs, mode = _sample(p, D, gammas, seed)
    emb = relative_embeddable(T, j)
    rep = ScanReport(d, j, mode, total=vecs.shape[0], embeddable=emb)
    if D == 0:
        rep.vacuous = rep.total
        return rep

    tau = T.sigma_at(n, d).power(p**j)
    step = (tau - ModPMatrix.identity(p, D)).data.T
    ell = np.zeros(vecs.shape[0], dtype=np.int64)
    last = vecs.copy()
    cur = vecs.copy()
    while True:
        nz = cur.any(axis=1)
        if not nz.any():
            break
        ell[nz] += 1
        last[nz] = cur[nz]
        cur = cur @ step % p
    normzero = ~(vecs @ T.norm_at(n, d).data.T % p).any(axis=1)
    b = p ** (n - j - 1)
    hyp = (ell > 2 * b) | ((ell > b) & (emb | normzero))
    target = Subspace.column_space(T.iota_comp(j, n, d) @ T.norm_comp(n, j, d))
    ok = target.members(last)
    rep.checked = int(hyp.sum())
    rep.vacuous = rep.total - rep.checked
    rep.failures = [v.tolist() for v in vecs[hyp & ~ok]]

    if j == 0:
        theta = _theta(T, n, d).data.T
        gl = np.zeros(vecs.shape[0], dtype=np.int64)
        glast = vecs.copy()
        cur = vecs.copy()
        while True:
            nz = cur.any(axis=1)
            if not nz.any():
                break
            gl[nz] += 1
            glast[nz] = cur[nz]
            cur = cur @ theta % p
        level = np.full(vecs.shape[0], n, dtype=np.int64)
        for i in range(n - 1, -1, -1):
            inside = Subspace.column_space(T.iota_comp(i, n, d)).members(vecs)
            level[inside] = i
        bound = np.array([p ** (i - 1) if i >= 1 else 0 for i in level], dtype=np.int64)
        chyp = normzero & (gl > bound) & vecs.any(axis=1)
        for i in range(n + 1):
            sel = chyp & (level == i)
            if not sel.any():
                continue
            tgt = Subspace.column_space(T.iota_comp(0, n, d) @ T.norm_comp(i, 0, d))
            good = tgt.members(glast[sel])
            rep.cor_failures += [v.tolist() for v in vecs[sel][~good]]
        rep.cor_checked = int(chyp.sum())
    return rep


# ---------------------------------------------------------------------------
# coarse decomposition


@dataclass
class Theorem1Report:
    n: int
    degree: int
    multiplicities: dict[int, int]
    gap: list[int]
    collapse_failures: list[int]
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.gap and not self.collapse_failures


def dimension_gap_check(M: GModule) -> list[int]:
    """Summand dimensions of ``M`` strictly between ``2 p^(n-1)`` and ``p^n``."""
    return gap_dimensions(M.p, M.n, decompose(M).multiplicities)


def verify_theorem1(T: Tower, d: int) -> Theorem1Report:
    """Summands of ``k[n][d]`` have dimension ``p^n`` or at most ``2 p^(n-1)``."""
    check_shapes(T)
    p, n = T.p, T.n
    mod = _module_at(T, n, d)
    dec = decompose(mod)
    gap = gap_dimensions(p, n, dec.multiplicities)
    V = v_filtration(mod)  # V[k-1] = V_k
    top = V[p**n - 1]
    bad = [i for i in range(2 * p ** (n - 1) + 1, p**n) if V[i] != top]
    checks = [
        _res("theorem1.gap", not gap, None, f"summands of dimension {gap}" if gap else "", n, d),
        _res("theorem1.collapse", not bad, None, f"V_(i+1) != V_(p^n) for i in {bad}" if bad else "", n, d),
    ]
    return Theorem1Report(n, d, dec.multiplicities, gap, bad, checks)
