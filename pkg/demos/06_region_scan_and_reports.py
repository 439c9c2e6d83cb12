# %% [markdown]
# # Region scan, heatmap and verification tables
#
# The same pipeline is reachable from the shell:
# ``bpe-atlas scan --out out`` and ``bpe-atlas verify-example1``.

# %%
import os
import tempfile

import numpy as np

from bpe_atlas import GridSpec, build_example1, emit_heatmap, scan_region, verify_example1
from bpe_atlas.reporting import read_pgm, write_scan_csv

g, w = build_example1(300)
grid = GridSpec("polar", tuple(np.round(np.arange(0, 1.0, 0.02), 2)), 32)
scan = scan_region(g, w, grid, 256)
cls = scan.classes()
for c in np.unique(cls):
    print(c, int(np.count_nonzero(cls == c)))

# %%
out = tempfile.mkdtemp()
write_scan_csv(scan, os.path.join(out, "scan.csv"))
emit_heatmap(scan, os.path.join(out, "scan.pgm"))
print(open(os.path.join(out, "scan.csv")).read().splitlines()[:3])
print("heatmap shape:", read_pgm(os.path.join(out, "scan.pgm")).shape)

# %%
print(verify_example1().format())
