# %% [markdown]
# # Graphs, weights and the shift
#
# Three families ship with the package: the lacunary chain with a loop at the
# root (``example1``), the classical unweighted shift and the ``k``-branch tree
# whose first branch carries the lacunary weights (``example2``).

# %%
import numpy as np

from bpe_atlas import (HilbertVector, apply_adjoint, apply_shift, build_classical,
                       build_example1, build_example2, example1_weight)

g1, w1 = build_example1(40)
print("example1:", g1.n_vertices, "vertices, loops at", g1.loops.tolist())
print("first weights:", [example1_weight(k) for k in range(1, 17)])

# %%
# The weights equal 1/2 exactly on the blocks 2**m + 1 .. 3 * 2**(m-1).
ks = np.arange(1, 65)
half = ks[np.array([example1_weight(int(k)) for k in ks]) == 0.5]
print("indices with weight 1/2:", half.tolist())

# %%
g2, w2 = build_example2(3, example1_weight, 20)
print("example2 roots:", g2.roots.tolist(), "levels 0..2 sizes:",
      [int(np.count_nonzero(g2.level == L)) for L in range(3)])

# %%
# Shift and adjoint on a basis vector of the classical shift.
gc, wc = build_classical(np.ones(10), 10)
e0 = HilbertVector.basis(gc.n_vertices, 0)
Te0 = apply_shift(gc, wc, e0)
print("T e_0 support:", Te0.support().tolist())
print("T* T e_0 = e_0:", np.allclose(apply_adjoint(gc, wc, Te0).dense(), e0.dense()))
