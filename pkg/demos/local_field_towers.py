"""Walk through the K-theory towers of tame local fields F_q((t)).

For each q the script prints the Galois action on k_1 of the top field, the
exceptional class, and the decomposition of k_1 and k_2.  Embeddable towers
also get the fine splitting into X and Y summands.

Run: python3 demos/local_field_towers.py
"""

from kgalmod.engine import construct_theorem2, verify_theorem1
from kgalmod.ktower import compute_exceptional, validate_axioms
from kgalmod.lfield import LocalFieldSpec, generate_tower, vp


def show(spec):
    T = generate_tower(spec)
    ok = validate_axioms(T, strict=True).passed
    ex = compute_exceptional(T)
    print(f"\np={spec.p} q={spec.q} n={spec.n}  v_p(q-1)={vp(spec.q - 1, spec.p)}  axioms ok: {ok}")
    print(f"  sigma on k_1 E_n: {T.sigma_at(spec.n, 1).tolist()}")
    print(f"  exceptional class {ex.a_class.tolist()}, index {ex.index_str()}, embeddable: {ex.embeddable}")
    for d in (1, 2):
        rep = verify_theorem1(T, d)
        print(f"  k_{d} E_n: {rep.multiplicities}  (gap free: {not rep.gap})")
    if not ex.embeddable:
        return
    for d in (1, 2):
        rep = construct_theorem2(T, d)
        xs = {i: len(x) for i, x in enumerate(rep.X) if x}
        ys = {i: len(y) for i, y in enumerate(rep.Y) if y}
        print(f"  degree {d}: X summands by level {xs}, Y summands by level {ys}, all clauses pass: {rep.passed}")


for q, n in [(13, 1), (19, 1), (19, 2), (109, 2)]:
    show(LocalFieldSpec(3, q, n))
