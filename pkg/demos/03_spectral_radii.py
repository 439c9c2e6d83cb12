# %% [markdown]
# # Spectral radius, local radii and the two discs
#
# ``r(T') = 2`` for the lacunary chain, but the local radius of the kernel
# vector stays near ``2**(2/3)``. The point evaluation disc is therefore
# strictly larger than ``1/r(T')``.

# %%
from fractions import Fraction

from bpe_atlas import (build_example1, cauchy_dual, disc_radii, example1_certificate,
                       operator_norm_n, sequence_conditions, wandering_basis,
                       weight_product_log, example1_weight)

g, w = build_example1(2100)
dual = cauchy_dual(g, w)
basis = wandering_basis(g, w)

# %%
for n in (4, 8, 12):
    print(f"log2 lam'_1..lam'_(2^{n}) = {weight_product_log(g, dual, 1, 2 ** n):.1f}, "
          f"closed form {2 ** (n - 1) - 3}")

# %%
worst = max(example1_certificate(n).ratio for n in range(1, 4097))
print("largest exponent ratio up to 4096:", worst, "=", float(worst))
print("attained at n =", [n for n in range(1, 80) if example1_certificate(n).attains_bound])

# %%
print("||T'^512||^(1/512) =", 2 ** (operator_norm_n(g, dual, 512) / 512))
rep = disc_radii(g, w, basis, 2048)
print(f"r_T'(x) = {rep.r_local[0]:.5f}  inner disc {rep.r_inner:.4f}  disc {rep.r_disc:.4f}")

# %%
sc = sequence_conditions(example1_weight, 2048)
print("conditions:", sc.cond_i, sc.cond_ii, sc.cond_iii, f"lhs {sc.lhs:.4f} rhs {sc.rhs:.4f}")
