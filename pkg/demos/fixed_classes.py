"""Fixed classes, norms and lifts.

The first part lifts every norm-zero class of k_1 E_2 for q = 37, where the
Galois action is not trivial, back to the lowest level that fixes it.  The
second part builds a one-step tower whose top group is the regular module
A_3 and scans it for fixed elements that are norms.  In the local-field towers
every class is short enough that the scan hypothesis never holds.

Run: python3 demos/fixed_classes.py
"""

from kgalmod.engine import check_fixed_elements_are_norms, h_length, lift_fixed_element
from kgalmod.fpla import enumerate_space
from kgalmod.lfield import LocalFieldSpec, generate_tower
from kgalmod.towerfile import parse_tower

T = generate_tower(LocalFieldSpec(3, 37, 2))
p, n = T.p, T.n
print("sigma on k_1 E_2:", T.sigma_at(n, 1).tolist())
for g in enumerate_space(p, 2):
    if not g.any() or (T.norm_at(n, 1) @ g).any():
        continue
    i = min(i for i in range(n + 1) if not ((T.sigma_at(n, 1).power(p**i) @ g - g) % p).any())
    x = lift_fixed_element(T, i, 1, g)
    print(f"  {g.tolist()} fixed from level {i}, length {h_length(T, 0, 1, g)}, lift {x.tolist()}")

REGULAR = """\
tower p=3 n=1 m=1
space level=0 degree=1 dim=1
space level=1 degree=1 dim=3
map sigma level=0 degree=1
1
map iota level=0 degree=1
1
1
1
map cup_a level=0 degree=1
1
map sigma level=1 degree=1
0 0 1
1 0 0
0 1 0
map norm level=1 degree=1
1 1 1
class a level=0 : 1
class xi level=0 : 0
class xi level=1 : 0 0 0
"""
R = parse_tower(REGULAR)
for name, tower in (("q=37 tower", T), ("regular module", R)):
    r = check_fixed_elements_are_norms(tower, 1, 0)
    print(f"{name}: {r.total} classes, {r.checked} tested, {r.vacuous} vacuous, {len(r.failures)} failures")
