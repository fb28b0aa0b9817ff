"""Plain-text tower files.

::

    # comment
    tower p=3 n=1 m=2
    space level=0 degree=1 dim=2
    map sigma level=0 degree=1
    1 0
    0 1
    class a level=0 : 1 0
    scalar t=1

A ``map`` header is followed by exactly as many rows as the target space
has dimensions, each with one entry per source dimension.  ``cup_an`` maps
use ``level=n``.  Degree 0 is implicit and never written.
"""

from __future__ import annotations

import re

import numpy as np

from .errors import TowerFormatError, TowerShapeError
from .fpla import ModPMatrix
from .ktower import Tower, check_shapes

MAP_KINDS = ("sigma", "iota", "norm", "cup_a", "cup_xi", "cup_an")
CLASS_KINDS = ("a", "xi", "an")

_HEADER = re.compile(r"^tower p=(\d+) n=(\d+) m=(\d+)$")
_SPACE = re.compile(r"^space level=(\d+) degree=(\d+) dim=(\d+)$")
_MAP = re.compile(r"^map (\w+) level=(\d+) degree=(\d+)$")
_CLASS = re.compile(r"^class (\w+) level=(\d+) :(.*)$")
_SCALAR = re.compile(r"^scalar t=(\d+)$")


def _map_shape(dims: dict, n: int, kind: str, i: int, d: int) -> tuple[int, int]:
    dim = lambda lvl, deg: 1 if deg == 0 else dims.get((lvl, deg))  # noqa: E731
    if kind == "sigma":
        src, tgt = dim(i, d), dim(i, d)
    elif kind == "iota":
        src, tgt = dim(i, d), dim(i + 1, d)
    elif kind == "norm":
        src, tgt = dim(i, d), dim(i - 1, d)
    else:
        src, tgt = dim(i, d - 1), dim(i, d)
    if src is None or tgt is None:
        raise KeyError
    return tgt, src


def _ints(text: str, p: int, lineno: int, count: int) -> list[int]:
    parts = text.split(" ") if text else []
    if len(parts) != count:
        raise TowerFormatError(f"expected {count} integers, found {len(parts)}", lineno)
    out = []
    for tok in parts:
        if not re.fullmatch(r"\d+", tok):
            raise TowerFormatError(f"bad integer {tok!r}", lineno)
        v = int(tok)
        if v >= p:
            raise TowerFormatError(f"entry {v} not in [0, {p})", lineno)
        out.append(v)
    return out


def parse_tower(text: str) -> Tower:
    """Parse a tower file; every error cites the offending line."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    header = None
    dims: dict = {}
    maps: dict = {k: {} for k in MAP_KINDS}
    classes: dict = {k: {} for k in CLASS_KINDS}
    t = None
    k = 0
    while k < len(lines):
        lineno = k + 1
        raw = lines[k].rstrip("\r")
        k += 1
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if header is None:
            mt = _HEADER.match(line)
            if not mt:
                raise TowerFormatError("expected header 'tower p=<int> n=<int> m=<int>'", lineno)
            header = tuple(int(g) for g in mt.groups())
            p, n, m = header
            if p < 3 or p % 2 == 0:
                raise TowerFormatError(f"p={p} is not an odd prime", lineno)
            continue
        p, n, m = header
        if mt := _SPACE.match(line):
            i, d, dim = (int(g) for g in mt.groups())
            if not (0 <= i <= n and 1 <= d <= m):
                raise TowerFormatError(f"space level={i} degree={d} out of range", lineno)
            if (i, d) in dims:
                raise TowerFormatError(f"duplicate space level={i} degree={d}", lineno)
            dims[(i, d)] = dim
        elif mt := _MAP.match(line):
            kind, i, d = mt.group(1), int(mt.group(2)), int(mt.group(3))
            if kind not in MAP_KINDS:
                raise TowerFormatError(f"unknown map kind {kind!r}", lineno)
            if not (0 <= i <= n and 1 <= d <= m):
                raise TowerFormatError(f"map level={i} degree={d} out of range", lineno)
            if kind == "iota" and i >= n or kind == "norm" and i == 0 or kind == "cup_an" and i != n:
                raise TowerFormatError(f"map {kind} not defined at level {i}", lineno)
            if kind == "cup_a" and i >= n:
                raise TowerFormatError("cup_a is only defined below the top level", lineno)
            try:
                rows, cols = _map_shape(dims, n, kind, i, d)
            except KeyError:
                raise TowerFormatError(f"map {kind} level={i} degree={d} refers to an undeclared space", lineno) from None
            data = []
            for r in range(rows):
                if k >= len(lines):
                    raise TowerFormatError(f"map {kind} ended after {r} of {rows} rows", lineno + r + 1)
                data.append(_ints(lines[k].rstrip("\r").strip(), p, k + 1, cols))
                k += 1
            key = d if kind == "cup_an" else (i, d)
            if key in maps[kind]:
                raise TowerFormatError(f"duplicate map {kind} level={i} degree={d}", lineno)
            arr = np.array(data, dtype=np.int64).reshape(rows, cols)
            maps[kind][key] = ModPMatrix(p, arr)
        elif mt := _CLASS.match(line):
            kind, i, rest = mt.group(1), int(mt.group(2)), mt.group(3).strip()
            if kind not in CLASS_KINDS:
                raise TowerFormatError(f"unknown class kind {kind!r}", lineno)
            if (i, 1) not in dims:
                raise TowerFormatError(f"class at level {i} before its degree-1 space is declared", lineno)
            if kind == "an" and i != n or kind == "a" and i >= n:
                raise TowerFormatError(f"class {kind} not defined at level {i}", lineno)
            if i in classes[kind]:
                raise TowerFormatError(f"duplicate class {kind} level={i}", lineno)
            classes[kind][i] = np.array(_ints(rest, p, lineno, dims[(i, 1)]), dtype=np.int64)
        elif mt := _SCALAR.match(line):
            t = int(mt.group(1))
            if not 1 <= t < p:
                raise TowerFormatError(f"scalar t={t} not in [1, {p})", lineno)
        else:
            raise TowerFormatError(f"unrecognized line {line!r}", lineno)
    if header is None:
        raise TowerFormatError("missing header line", len(lines) or 1)
    p, n, m = header
    T = Tower(
        p=p,
        n=n,
        m=m,
        dims=dims,
        sigma=maps["sigma"],
        iota=maps["iota"],
        norm=maps["norm"],
        cup_a=maps["cup_a"],
        a_class=classes["a"],
        xi_class=classes["xi"],
        cup_xi=maps["cup_xi"] or None,
        cup_an=maps["cup_an"] or None,
        an_class=classes["an"].get(n),
        t=t,
    )
    try:
        check_shapes(T)
    except (TowerShapeError, ValueError) as exc:
        raise TowerFormatError(f"incomplete tower: {exc}") from exc
    return T


def _emit_map(out: list[str], kind: str, i: int, d: int, a: ModPMatrix) -> None:
    out.append(f"map {kind} level={i} degree={d}")
    for row in a.data:
        out.append(" ".join(str(int(x)) for x in row))


def serialize_tower(T: Tower) -> str:
    """Canonical text for ``T``; ``parse_tower`` inverts it."""
    check_shapes(T)
    p, n, m = T.p, T.n, T.m
    out = [f"tower p={p} n={n} m={m}"]
    for i in range(n + 1):
        for d in range(1, m + 1):
            out.append(f"space level={i} degree={d} dim={T.dims[(i, d)]}")
    for i in range(n + 1):
        for d in range(1, m + 1):
            _emit_map(out, "sigma", i, d, T.sigma[(i, d)])
            if i < n:
                _emit_map(out, "iota", i, d, T.iota[(i, d)])
            if i > 0:
                _emit_map(out, "norm", i, d, T.norm[(i, d)])
            if i < n:
                _emit_map(out, "cup_a", i, d, T.cup_a[(i, d)])
            if T.cup_xi is not None:
                _emit_map(out, "cup_xi", i, d, T.cup_xi[(i, d)])
    if T.cup_an is not None:
        for d in range(1, m + 1):
            _emit_map(out, "cup_an", n, d, T.cup_an[d])
    vec = lambda v: " ".join(str(int(x)) for x in np.asarray(v) % p)  # noqa: E731
    for i in range(n):
        out.append(f"class a level={i} : {vec(T.a_class[i])}".rstrip())
    for i in range(n + 1):
        out.append(f"class xi level={i} : {vec(T.xi_class[i])}".rstrip())
    if T.an_class is not None:
        out.append(f"class an level={n} : {vec(T.an_class)}".rstrip())
    if T.t is not None:
        out.append(f"scalar t={T.t}")
    return "\n".join(out) + "\n"


def towers_equal(A: Tower, B: Tower) -> bool:
    """Exact equality of all recorded data."""
    return serialize_tower(A) == serialize_tower(B)


def read_tower(path) -> Tower:
    with open(path, encoding="utf-8") as fh:
        return parse_tower(fh.read())


def write_tower(T: Tower, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_tower(T))
