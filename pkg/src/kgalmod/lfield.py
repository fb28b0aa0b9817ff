"""Towers of tame local fields ``F_q((t))`` with ``p | q - 1``.

Classes in ``k_1`` are ``(v, e)``: valuation and exponent of the unit part in
a fixed generator of the residue multiplicative group, both mod ``p``
(principal units are p-th powers when the residue characteristic is not
``p``).  ``k_2`` is one-dimensional, read off through the tame symbol, and
``k_d`` vanishes for ``d >= 3``.

Two towers are generated:

``totally_ramified``
    ``E_i = F(s_i)`` with ``s_i^(p^i) = t``; needs ``p^n | q - 1``.
    Basis of ``k_1 E_i`` is ``[s_i], [u]`` with ``u`` a generator of ``F_q^*``.
``unramified``
    ``E_i = F_(q^(p^i))((t))``.  Basis of ``k_1 E_i`` is ``[t], [u_i]`` with
    norm-compatible generators ``u_i`` of the residue fields.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fpla import ModPMatrix, check_modulus, is_prime
from .ktower import Tower

STYLES = ("totally_ramified", "unramified")


def vp(x: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if x == 0:
        raise ValueError("valuation of zero")
    k = 0
    while x % p == 0:
        x //= p
        k += 1
    return k


def prime_power_base(q: int) -> int | None:
    """The prime ``l`` with ``q = l^k``, or ``None``."""
    if q < 2:
        return None
    for l in range(2, int(q**0.5) + 2):
        if q % l == 0:
            while q % l == 0:
                q //= l
            return l if q == 1 else None
    return q if is_prime(q) else None


@dataclass(frozen=True)
class LocalFieldSpec:
    p: int
    q: int
    n: int
    m: int = 2
    style: str = "totally_ramified"

    def __post_init__(self):
        check_modulus(self.p)
        if not 2 <= self.q < 2**31 or prime_power_base(self.q) is None:
            raise ValueError(f"q={self.q} must be a prime power below 2^31")
        if prime_power_base(self.q) == self.p:
            raise ValueError("residue characteristic must differ from p")
        if (self.q - 1) % self.p:
            raise ValueError(f"p={self.p} must divide q-1={self.q - 1}")
        if self.n < 1:
            raise ValueError(f"height n must be at least 1, got {self.n}")
        if not 1 <= self.m <= 2:
            raise ValueError(f"unsupported top degree m={self.m}; generated towers stop at 2")
        if self.style not in STYLES:
            raise ValueError(f"style must be one of {STYLES}, got {self.style!r}")
        if self.style == "totally_ramified" and (self.q - 1) % self.p**self.n:
            raise ValueError(f"ramified tower needs p^n = {self.p**self.n} to divide q-1 = {self.q - 1}")

    def residue_size(self, level: int) -> int:
        """Size of the residue field of ``E_level``."""
        return self.q if self.style == "totally_ramified" else self.q ** (self.p**level)


@dataclass(frozen=True)
class K1Class:
    v: int
    u: int

    def vector(self) -> np.ndarray:
        return np.array([self.v, self.u], dtype=np.int64)


def k1_reduce(valuation: int, teich_exponent: int, spec: LocalFieldSpec, level: int) -> K1Class:
    if not 0 <= level <= spec.n:
        raise ValueError(f"level {level} outside [0, {spec.n}]")
    return K1Class(valuation % spec.p, teich_exponent % spec.p)


def tame_symbol(a: tuple[int, int], b: tuple[int, int], p: int, q: int) -> int:
    """Exponent mod ``p`` of the tame symbol of ``a = (v, e)`` and ``b``.

    ``(-1)^(v_a v_b) abar^(v_b) bbar^(-v_a)`` in ``F_q^*`` written as a power of
    the fixed generator, with ``-1 = g^((q-1)/2)``.
    """
    (va, ea), (vb, eb) = a, b
    e = (va * vb * ((q - 1) // 2) + ea * vb - eb * va) % (q - 1)
    return e % p


def primitive_root(q: int) -> int:
    """Smallest generator of ``(Z/q)^*`` for prime ``q``."""
    if not is_prime(q):
        raise ValueError(f"primitive roots are only computed for prime q, got {q}")
    if q == 2:
        return 1
    order = q - 1
    factors = [l for l in range(2, order + 1) if order % l == 0 and is_prime(l)]
    for g in range(2, q):
        if all(pow(g, order // l, q) != 1 for l in factors):
            return g
    raise AssertionError("unreachable")


def discrete_log(x: int, q: int, g: int | None = None) -> int:
    """Exponent ``e`` in ``[0, q-1)`` with ``g^e = x`` mod prime ``q`` (baby-step giant-step)."""
    g = primitive_root(q) if g is None else g
    x %= q
    if x == 0:
        raise ValueError("zero has no logarithm")
    m = int((q - 1) ** 0.5) + 1
    table = {}
    cur = 1
    for j in range(m):
        table.setdefault(cur, j)
        cur = cur * g % q
    step = pow(g, -m, q)
    y = x
    for i in range(m + 1):
        if y in table:
            return (i * m + table[y]) % (q - 1)
        y = y * step % q
    raise ValueError(f"{x} is not a power of {g} mod {q}")


def xi_exponent(spec: LocalFieldSpec, level: int) -> int:
    """Exponent of ``xi_p = u^((Q-1)/p)`` mod ``p``, ``Q`` the residue size at ``level``."""
    p = spec.p
    if spec.style == "totally_ramified":
        return ((spec.q - 1) // p) % p
    qq = pow(spec.q, p**level, p * p)
    return ((qq - 1) % (p * p)) // p


def generate_tower(spec: LocalFieldSpec) -> Tower:
    p, n, m = spec.p, spec.n, spec.m
    M = lambda rows: ModPMatrix(p, rows)  # noqa: E731
    ram = spec.style == "totally_ramified"
    unif, unit = (1, 0), (0, 1)  # exact (valuation, exponent) of the k_1 basis
    basis = [unif, unit]

    dims, sigma, iota, norm, cup_a, cup_xi = {}, {}, {}, {}, {}, {}
    a_class, xi_class = {}, {}
    cup_an = {}
    for i in range(n + 1):
        Q = spec.residue_size(i)
        # generator acts on s_i by the primitive p^i-th root of unity u^((q-1)/p^i)
        c = ((spec.q - 1) // p**i) % p if (ram and i > 0) else 0
        dims[(i, 1)] = 2
        sigma[(i, 1)] = M([[1, 0], [c, 1]])
        if m >= 2:
            dims[(i, 2)] = 1
            sigma[(i, 2)] = M([[1]])
        if i < n:
            iota[(i, 1)] = M([[0, 0], [0, 1]]) if ram else M([[1, 0], [0, 0]])
            if m >= 2:
                iota[(i, 2)] = M([[0]])
        if i > 0:
            norm[(i, 1)] = M([[1, 0], [0, 0]]) if ram else M([[0, 0], [0, 1]])
            if m >= 2:
                norm[(i, 2)] = M([[1]])

        a = unif if ram else unit
        x = (0, xi_exponent(spec, i))
        cls = np.array(a, dtype=np.int64)
        xcls = np.array(x, dtype=np.int64) % p
        cup1 = M(cls.reshape(2, 1))
        xcup1 = M(xcls.reshape(2, 1))
        cup2 = M([[tame_symbol(a, b, p, Q) for b in basis]])
        xcup2 = M([[tame_symbol(x, b, p, Q) for b in basis]])
        xi_class[i] = xcls
        cup_xi[(i, 1)] = xcup1
        if m >= 2:
            cup_xi[(i, 2)] = xcup2
        if i < n:
            a_class[i] = cls
            cup_a[(i, 1)] = cup1
            if m >= 2:
                cup_a[(i, 2)] = cup2
        else:
            cup_an[1] = cup1
            if m >= 2:
                cup_an[2] = cup2
            an_class = cls.copy()
    return Tower(
        p=p,
        n=n,
        m=m,
        dims=dims,
        sigma=sigma,
        iota=iota,
        norm=norm,
        cup_a=cup_a,
        a_class=a_class,
        xi_class=xi_class,
        cup_xi=cup_xi,
        cup_an=cup_an,
        an_class=an_class,
        t=1,
    )


# q values used by the test-suite and demos
Q_LIST = {3: (7, 13, 19, 37, 109), 5: (11, 31, 41, 101, 251)}


def standard_specs(m: int = 2) -> list[LocalFieldSpec]:
    """Every valid spec for p in {3, 5}, n in {1, 2}, both styles, over :data:`Q_LIST`."""
    out = []
    for p, qs in Q_LIST.items():
        for n in (1, 2):
            for style in STYLES:
                for q in qs:
                    if style == "totally_ramified" and (q - 1) % p**n:
                        continue
                    out.append(LocalFieldSpec(p, q, n, m, style))
    return out
