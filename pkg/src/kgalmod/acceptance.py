"""End-to-end acceptance checks, shared by the test-suite and ``kgalmod selftest``."""

from __future__ import annotations

import contextlib
import io
import itertools
import os
import tempfile
import time
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .engine import (
    check_fixed_elements_are_norms,
    construct_theorem2,
    fixed_norms_exhaustive,
    gamma_results,
    lift_fixed_element,
    verify_theorem1,
)
from .fpla import Subspace, enumerate_space
from .gmod import (
    cyclic_span,
    decompose,
    exclusion_check,
    lengths,
    multiplicities_oracle,
    random_module,
    verify_operator_identities,
)
from .ktower import compute_exceptional, tower_direct_sum, validate_axioms
from .lfield import LocalFieldSpec, generate_tower, standard_specs
from .towerfile import parse_tower, serialize_tower


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        return f"criterion {self.number:2d} {'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail} ({self.seconds:.2f}s)"


def _timed(number, name, fn, *args):
    t0 = time.perf_counter()
    passed, detail = fn(*args)
    return CriterionResult(number, name, bool(passed), detail, time.perf_counter() - t0)


def _module_params(k: int) -> tuple[int, int]:
    return (3, 5)[k % 2], (1, 2)[(k // 2) % 2]


def oracle_equivalence(seed: int = 0, count: int = 200, max_dim: int = 60) -> tuple[bool, str]:
    t0 = time.perf_counter()
    mismatches = 0
    rng = np.random.Generator(np.random.PCG64(seed))
    for k in range(count):
        p, n = _module_params(k)
        dim = int(rng.integers(1, max_dim + 1))
        M, shape = random_module(p, n, dim, seed * 100003 + k)
        got = decompose(M).multiplicities
        if got != multiplicities_oracle(M) or got != dict(sorted(Counter(shape).items())):
            mismatches += 1
    elapsed = time.perf_counter() - t0
    return mismatches == 0 and elapsed < 10.0, f"{count} modules, {mismatches} mismatches, {elapsed:.2f}s (limit 10s)"


def operator_identities(seed: int = 0, count: int = 100) -> tuple[bool, str]:
    rng = np.random.Generator(np.random.PCG64(seed + 1))
    bad = checked = 0
    for k in range(count):
        p, n = _module_params(k)
        M, _ = random_module(p, n, int(rng.integers(1, 25)), seed * 7919 + k + 10**6)
        for i in range(n + 1):
            for j in range(i + 1):
                checked += 1
                bad += not verify_operator_identities(M, i, j)
    return bad == 0, f"{count} modules, {checked} (i, j) pairs, {bad} failures"


def exclusion_lemma(seed: int = 0, count: int = 100) -> tuple[bool, str]:
    rng = np.random.Generator(np.random.PCG64(seed + 2))
    disagree = indep = dep = 0
    for k in range(count):
        p, n = _module_params(k)
        M, _ = random_module(p, n, int(rng.integers(2, 30)), seed * 104729 + k + 2 * 10**6)
        gens = [g for g, _ in decompose(M).generators]
        fams = int(rng.integers(2, 5))
        if k % 2 == 0:
            # split summand generators among families, sometimes reusing one
            groups = [[] for _ in range(fams)]
            for g in gens:
                groups[int(rng.integers(0, fams))].append(g)
            if rng.random() < 0.5 and gens:
                groups[0].append(gens[int(rng.integers(0, len(gens)))])
            groups = [gr for gr in groups if gr] or [[gens[0]]]
        else:
            groups = [
                [rng.integers(0, p, size=M.dim) for _ in range(int(rng.integers(1, 3)))] for _ in range(fams)
            ]
        spans = [cyclic_span(M, gr) for gr in groups]
        total = Subspace.zero(p, M.dim)
        for s in spans:
            total = total + s
        by_dim = total.dim == sum(s.dim for s in spans)
        by_fixed = exclusion_check(M, groups, cross_check=False)
        disagree += by_dim != by_fixed
        indep += by_dim
        dep += not by_dim
    return disagree == 0, f"{count} families ({indep} independent, {dep} dependent), {disagree} discrepancies"


def _towers(m: int = 2):
    return [(s, generate_tower(s)) for s in standard_specs(m)]


def axiom_suite() -> tuple[bool, str]:
    bad = []
    towers = _towers()
    for s, T in towers:
        rep = validate_axioms(T, strict=True)
        if not rep.passed:
            bad.append((s, rep.failures()[0].line()))
    return not bad, f"{len(towers)} towers validated in strict mode, {len(bad)} failing" + (f"; first {bad[0]}" if bad else "")


def _groups(towers):
    out = {}
    for s, T in towers:
        out.setdefault((s.p, s.n), []).append(T)
    return out


def theorem1_suite() -> tuple[bool, str]:
    towers = _towers()
    bad = checked = 0
    for _, T in towers:
        for d in (1, 2):
            checked += 1
            bad += not verify_theorem1(T, d).passed
    sums = 0
    for group in _groups(towers).values():
        for r in (2, 3):
            for combo in itertools.combinations_with_replacement(range(len(group)), r):
                S = group[combo[0]]
                for c in combo[1:]:
                    S, _ = tower_direct_sum(S, group[c])
                for d in (1, 2):
                    sums += 1
                    bad += not verify_theorem1(S, d).passed
    e13 = verify_theorem1(generate_tower(LocalFieldSpec(3, 13, 1)), 1).multiplicities
    e19 = verify_theorem1(generate_tower(LocalFieldSpec(3, 19, 1)), 1).multiplicities
    expect = e13 == {2: 1} and e19 == {1: 2}
    return (
        bad == 0 and expect,
        f"{checked} tower cases, {sums} direct-sum cases, {bad} failures; q=13 -> {e13}, q=19 -> {e19}",
    )


def _embeddable_towers():
    return [(s, T) for s, T in _towers() if compute_exceptional(T).embeddable]


def theorem2_suite() -> tuple[bool, str]:
    bad, slow, runs = [], [], 0
    towers = _embeddable_towers()
    named = {(s.p, s.q, s.n) for s, _ in towers if s.style == "totally_ramified"}
    for s, T in towers:
        t0 = time.perf_counter()
        for d in (1, 2):
            runs += 1
            rep = construct_theorem2(T, d, check=False)
            if not rep.passed:
                bad.append((s.p, s.q, s.n, s.style, d))
        if time.perf_counter() - t0 >= 5.0:
            slow.append((s.p, s.q, s.n))
    required = {(3, 19, 1), (3, 109, 2)} <= named
    return (
        not bad and not slow and required,
        f"{runs} constructions over {len(towers)} towers, {len(bad)} failing, {len(slow)} over 5s; "
        f"ramified q=19 n=1 and q=109 n=2 embeddable: {required}",
    )


def gamma_suite() -> tuple[bool, str]:
    bad = total = hyp = 0
    for _, T in _embeddable_towers():
        for d in (1, 2):
            rep = construct_theorem2(T, d, check=False)
            for g in gamma_results(rep):
                total += 1
                bad += not g.passed
                h, f = fixed_norms_exhaustive(T, g)
                hyp += h
                bad += f
    return bad == 0, f"{total} Gamma results, {hyp} exhaustive fixed-norm cases, {bad} failures"


def fixed_elements_scan(seed: int = 0) -> tuple[bool, str]:
    towers = _towers()
    cases = [T for _, T in towers]
    for group in _groups(towers).values():
        for a, b in itertools.combinations_with_replacement(range(len(group)), 2):
            cases.append(tower_direct_sum(group[a], group[b])[0])
    checked = cor = vacuous = fails = runs = 0
    for T in cases:
        for d in (1, 2):
            for j in range(T.n):
                r = check_fixed_elements_are_norms(T, d, j, "exhaustive", seed)
                runs += 1
                checked += r.checked
                cor += r.cor_checked
                vacuous += r.vacuous
                fails += len(r.failures) + len(r.cor_failures)
    return fails == 0, (
        f"{runs} scans over {len(cases)} towers: {checked} non-vacuous, {vacuous} vacuous, "
        f"{cor} minimal-level cases, {fails} failures"
    )


def lifting_suite() -> tuple[bool, str]:
    total = fails = 0
    for _, T in _towers():
        n, p = T.n, T.p
        for d in (1, 2):
            s = T.sigma_at(n, d)
            N = T.norm_at(n, d)
            for g in enumerate_space(p, T.dim(n, d)):
                if (N @ g).any():
                    continue
                for i in range(n + 1):
                    if ((s.power(p**i) @ g - g) % p).any():
                        continue
                    total += 1
                    try:
                        x = lift_fixed_element(T, i, d, g)
                    except Exception:
                        fails += 1
                        continue
                    up = T.iota_comp(i, n, d) @ x
                    same_len = lengths(T.module(i, d), x[None, :])[0] == lengths(T.module(n, d), g[None, :])[0]
                    fails += bool((up - g).any()) or not same_len
    return fails == 0, f"{total} fixed norm-zero classes lifted, {fails} failures"


def _run_cli(args) -> tuple[int, str]:
    from .cli import main

    buf, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(buf), contextlib.redirect_stderr(err):
        code = main(list(args))
    return code, buf.getvalue()


def cli_determinism() -> tuple[bool, str]:
    problems = []
    with tempfile.TemporaryDirectory() as tmp:
        for p, q, n in ((3, 19, 1), (3, 109, 2), (3, 13, 1)):
            paths = [os.path.join(tmp, f"t{p}_{q}_{n}_{k}.twr") for k in range(2)]
            for path in paths:
                _run_cli(["lfgen", "--p", str(p), "--q", str(q), "--n", str(n), "--m", "2", "--out", path])
            blobs = [open(path, "rb").read() for path in paths]
            if blobs[0] != blobs[1]:
                problems.append(f"lfgen q={q} not byte-identical")
            T = parse_tower(blobs[0].decode())
            if serialize_tower(parse_tower(serialize_tower(T))).encode() != blobs[0]:
                problems.append(f"round trip q={q}")
            for cmd in (
                ["check", paths[0], "--strict"],
                ["decompose", paths[0], "--level", str(n), "--degree", "1"],
                ["decompose", paths[0], "--level", str(n), "--degree", "2", "--json"],
                ["theorem2", paths[0], "--degree", "1"],
            ):
                a = _run_cli(cmd)
                b = _run_cli([cmd[0], paths[1]] + cmd[2:])
                if a != b:
                    problems.append(f"{' '.join(cmd[:1])} q={q} differs")
    return not problems, "lfgen, check, decompose, theorem2 reproducible" if not problems else "; ".join(problems)


CRITERIA = [
    (1, "oracle equivalence", oracle_equivalence, True),
    (2, "operator identities", operator_identities, True),
    (3, "exclusion lemma", exclusion_lemma, True),
    (4, "axiom suite", axiom_suite, False),
    (5, "coarse decomposition", theorem1_suite, False),
    (6, "embeddable decomposition", theorem2_suite, False),
    (7, "gamma properties", gamma_suite, False),
    (8, "fixed elements are norms", fixed_elements_scan, True),
    (9, "lifting contract", lifting_suite, False),
    (10, "cli determinism", cli_determinism, False),
]


def run_criterion(number: int, seed: int = 0) -> CriterionResult:
    for num, name, fn, seeded in CRITERIA:
        if num == number:
            return _timed(num, name, fn, *((seed,) if seeded else ()))
    raise KeyError(number)


def run_all(seed: int = 0) -> list[CriterionResult]:
    return [run_criterion(num, seed) for num, *_ in CRITERIA]
