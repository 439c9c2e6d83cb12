# %% [markdown]
# # Cauchy dual and the wandering subspace
#
# The dual weights are ``lam_u / d_parent(u)``. The kernel of ``T*`` is spanned
# by the roots together with the orthogonal complements of the weight vector on
# each fiber.

# %%
import numpy as np

from bpe_atlas import build_example1, build_example2, cauchy_dual, example1_weight, wandering_basis

g, w = build_example2(3, example1_weight, 30)
dual = cauchy_dual(g, w)
basis = wandering_basis(g, w)
print("dim ker T* =", basis.dim)

# %%
# Gram matrix of the basis is the identity.
X = basis.matrix()
print("max |X*X - I| =", np.abs(X.conj().T @ X - np.eye(basis.dim)).max())

# %%
# The dual weight bounds: the dual of example1 has norm 2 because of the 1/2 blocks.
g1, w1 = build_example1(64)
d1 = cauchy_dual(g1, w1)
print("example1 weight bounds", w1.weight_bounds(g1), "dual bounds", d1.weight_bounds(g1))
