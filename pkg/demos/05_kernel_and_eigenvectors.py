# %% [markdown]
# # Kernel matrix, evaluation vectors and the adjoint eigenbasis

# %%
import numpy as np

from bpe_atlas import (adjoint_eigenbasis, build_example2, cauchy_dual, evaluation_data,
                       example1_weight, gram_test, kernel_gram, wandering_basis)

g, w = build_example2(3, example1_weight, 200)
d, b = cauchy_dual(g, w), wandering_basis(g, w)

# %%
K = kernel_gram(g, d, b, 0.0, 0.0, 64)
print("kappa(0, 0) =\n", np.round(K.real, 12))

# %%
ed = evaluation_data(g, d, b, 0.4, 128)
print(f"||E_0.4*|| = {ed.evaluation_norm():.6f}, tail bound {ed.tail_bound:.2e}, certified {ed.certified}")

# %%
# Eigenvectors of T* at w and their pairing with the kernel basis.
eig = adjoint_eigenbasis(g, w, 0.4, depth=64)
print("accepted eigenvectors:", int(np.count_nonzero(eig.accepted)), "tail ratios", np.round(eig.tail_ratio, 4))
gt = gram_test(b, eig)
print("sigma_min =", gt.sigma_min, "certifies:", gt.certifies_bpe())
