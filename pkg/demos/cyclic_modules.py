"""Decompose random modules over F_p[Z/p^n] and compare with the rank count.

Run: python3 demos/cyclic_modules.py
"""

from collections import Counter

from kgalmod.gmod import decompose, length, multiplicities_oracle, random_module, v_filtration

p, n = 3, 2
M, shape = random_module(p, n, dim=14, seed=7)
print(f"sigma is a random conjugate of Jordan blocks {sorted(shape, reverse=True)} (p={p}, n={n})")

# dimensions of the filtration V_k = im(theta^(k-1)) & ker(theta)
V = v_filtration(M)
print("dim V_k:", [v.dim for v in V])

dec = decompose(M)
print("summands:", " + ".join(f"{c} A_{d}" for d, c in dec.multiplicities.items()))
print("rank count agrees:", dec.multiplicities == multiplicities_oracle(M) == dict(Counter(shape)))

for g, d in dec.generators[:4]:
    print(f"  generator {g.tolist()} has length {length(M, g)}")
