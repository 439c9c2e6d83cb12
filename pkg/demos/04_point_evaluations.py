# %% [markdown]
# # The sequence B_n(w)
#
# ``B_n(w)`` is the norm of the projected partial sums applied to the
# wandering basis. It is nondecreasing in ``n``; bounded growth at a point
# means the point is a bounded point evaluation.

# %%
import numpy as np

from bpe_atlas import (BpeEngine, b_n, build_classical, build_example1, cauchy_dual,
                       classify_point, wandering_basis)

g, w = build_classical(np.ones(300), 300)
d, b = cauchy_dual(g, w), wandering_basis(g, w)
for r in (0.3, 0.9, 1.1):
    B = b_n(g, w, d, b, r, 128)
    ref = np.sqrt(np.cumsum(r ** (2 * np.arange(129))))
    print(f"|w|={r}: B_128 = {B[-1]:.6g}, closed form {ref[-1]:.6g}, class {classify_point(B)[1]}")

# %%
# Batched evaluation on example1 works in log2 to avoid overflow.
g1, w1 = build_example1(300)
eng = BpeEngine(g1, w1, 256)
ws = np.array([0.3, 0.6, 0.9, 1.2])
L = eng.log2_b(ws)
for wv, row in zip(ws, L):
    print(f"w={wv}: log2 B_256 = {row[-1]:.3f}")

# %%
# Rotating w changes B_n on example1 since the loop at the root mixes levels.
print("B_2(0.3) =", np.exp2(eng.log2_b([0.3])[0][2]), " B_2(-0.3) =", np.exp2(eng.log2_b([-0.3])[0][2]))
