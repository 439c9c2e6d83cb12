"""Acceptance criteria 1-11, each at its stated tolerance.

Every criterion prints one ``CRITERION k: PASS|FAIL ...`` line (collected in the
terminal summary; ``python tests/test_acceptance.py`` prints them directly).
Criteria 9 and 10 are expected to fail; the README explains why.
"""

import os
import sys
import time
from fractions import Fraction

import numpy as np

sys.path.insert(0, os.path.dirname(__file__))

import oracle as O
from bpe_atlas import (BOUNDED, UNBOUNDED, BpeEngine, GridSpec, adjoint_eigenbasis, b_n,
                       build_classical, build_example1, build_example2, cauchy_dual,
                       classify_point, disc_radii, evaluation_data, example1_certificate,
                       example1_weight, gram_test, kernel_gram, operator_norm_n,
                       scan_region, sequence_conditions, wandering_basis,
                       weight_product_log)
from bpe_atlas.reporting import example2_fits

RESULTS = []
_T0 = [None]


def _start():
    if _T0[0] is None:
        _T0[0] = time.perf_counter()


def report(k, ok, detail):
    line = f"CRITERION {k}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def _family(name, depth):
    if name == "example1":
        g, w = build_example1(depth)
    elif name == "classical":
        g, w = build_classical(np.ones(depth), depth)
    else:
        g, w = build_example2(3, example1_weight, depth)
    return g, w, cauchy_dual(g, w), wandering_basis(g, w)


def test_criterion_01_product_identity():
    _start()
    t = time.perf_counter()
    g, w, d, _ = _family("example1", 64)
    errs = [abs(weight_product_log(g, d, 1, 2 ** n) - (2 ** (n - 1) - 3)) for n in range(2, 13)]
    dt = time.perf_counter() - t
    report(1, max(errs) <= 1e-12 and dt < 1.0,
           f"max |log2 product - (2^(n-1)-3)| = {max(errs):.3g} for n=2..12, {dt:.3f}s")


def test_criterion_02_exponent_bound():
    _start()
    worst = Fraction(0)
    bad_eq = 0
    for n in range(1, 4097):
        c = example1_certificate(n)
        worst = max(worst, c.ratio)
        if (c.k_n == Fraction(2 ** c.m_n, 2)) != (c.ratio == Fraction(2, 3)):
            bad_eq += 1
    report(2, worst <= Fraction(2, 3) and bad_eq == 0,
           f"max ratio {worst} over n<=4096, equality mismatches {bad_eq}")


def test_criterion_03_dual_spectral_radius():
    _start()
    t = time.perf_counter()
    g, w, d, _ = _family("example1", 2100)
    r = 2.0 ** (operator_norm_n(g, d, 512) / 512)
    dt = time.perf_counter() - t
    report(3, abs(r - 2.0) <= 1e-9 and dt < 1.0, f"||T'^512||^(1/512) = {r!r}, {dt:.3f}s")


def test_criterion_04_local_radius_gap():
    _start()
    t = time.perf_counter()
    g, w, d, b = _family("example1", 2100)
    rep = disc_radii(g, w, b, 2048)
    dt = time.perf_counter() - t
    r_loc = rep.r_local[0]
    gap = rep.r_disc - rep.r_inner
    report(4, r_loc <= 2 ** (2 / 3) + 0.02 and gap >= 0.1 and dt < 5.0,
           f"r_T'(x) = {r_loc:.6f} (<= {2 ** (2 / 3) + 0.02:.4f}), r_disc - r_inner = {gap:.4f}, {dt:.2f}s")


def test_criterion_05_b_sanity():
    _start()
    rng = np.random.default_rng(5)
    worst0 = 0.0
    worst_mono = 0.0
    for name in ("example1", "classical", "example2"):
        g, w, d, b = _family(name, 210)
        eng = BpeEngine(g, w, 200, basis=b, dual=d)
        worst0 = max(worst0, float(np.max(np.abs(np.exp2(eng.log2_b([0.0])[0]) - 1))))
        ws = 1.2 * np.sqrt(rng.random(20)) * np.exp(2j * np.pi * rng.random(20))
        B = np.exp2(eng.log2_b(ws))
        drop = (B[:, :-1] - B[:, 1:]) / np.maximum(1.0, B[:, 1:])
        worst_mono = max(worst_mono, float(drop.max()))
    report(5, worst0 <= 1e-10 and worst_mono <= 1e-10,
           f"max |B_n(0) - 1| = {worst0:.3g}, max relative decrease = {worst_mono:.3g}")


def test_criterion_06_closed_form():
    _start()
    g, w, d, b = _family("classical", 300)
    worst = 0.0
    cls = {}
    for r in (0.3, 0.7, 0.9, 1.1):
        B = b_n(g, w, d, b, r, 128)
        ref = O.classical_b_exact(r, 128)
        worst = max(worst, float(np.max(np.abs(B - ref))))
        cls[r] = classify_point(B)[1]
    ed = evaluation_data(g, d, b, 0.7, 256)
    norm_err = abs(ed.evaluation_norm() - (1 - 0.49) ** -0.5)
    ok = worst <= 1e-10 and cls[0.9] == BOUNDED and cls[1.1] == UNBOUNDED and norm_err <= 1e-8
    report(6, ok, f"max abs error {worst:.3g}, class(0.9)={cls[0.9]}, class(1.1)={cls[1.1]}, "
                  f"|E_0.7| error {norm_err:.3g}")


def test_criterion_07_dense_oracle():
    _start()
    D = 12
    rng = np.random.default_rng(7)
    worst = [0.0, 0.0, 0.0]
    dense = {
        "example1": lambda: O.dense_example1(D),
        "classical": lambda: O.dense_classical(np.ones(D), D),
        "example2": lambda: O.dense_example2(3, [O.example1_weight_slow(m) for m in range(1, D + 1)], D),
    }
    for name, make in dense.items():
        g, w, d, b = _family(name, D)
        T, level = make()
        X = O.kernel_basis(T, level)
        U = X.conj().T @ b.matrix()
        for _ in range(10):
            wv, z = 0.95 * np.sqrt(rng.random(2)) * np.exp(2j * np.pi * rng.random(2))
            B = b_n(g, w, d, b, wv, 10)
            worst[0] = max(worst[0], float(np.max(np.abs(B - O.b_values(T, X, wv, 10)))))
            K = kernel_gram(g, d, b, z, wv, 10)
            Ko = U.conj().T @ O.kernel_truncated(T, X, z, wv, 10) @ U
            worst[1] = max(worst[1], float(np.max(np.abs(K - Ko))))
            s = gram_test(b, adjoint_eigenbasis(g, w, wv, depth=D), accepted_only=False).sigma_min
            so = O.sigma_min(X, O.adjoint_nullspace(T, level, wv, D))
            worst[2] = max(worst[2], abs(s - so))
    report(7, max(worst) <= 1e-10,
           f"max deviation B_n {worst[0]:.3g}, kappa {worst[1]:.3g}, sigma_min {worst[2]:.3g}")


def test_criterion_08_kernel_normalization():
    _start()
    errs = []
    for name in ("example1", "example2"):
        g, w, d, b = _family(name, 100)
        K = kernel_gram(g, d, b, 0.0, 0.0, 64)
        errs.append(float(np.max(np.abs(K - np.eye(b.dim)))))
    report(8, max(errs) <= 1e-10, f"|kappa(0,0) - I| = {errs[0]:.3g} (d=1), {errs[1]:.3g} (d=3)")


def test_criterion_09_rotation_invariance():
    _start()
    g, w, d, b = _family("example1", 200)
    eng = BpeEngine(g, w, 128, basis=b, dual=d)
    worst = 0.0
    where = None
    for r in (0.3, 0.55):
        base = np.exp2(eng.log2_b([r])[0])
        for th in (np.pi / 7, np.pi / 3, np.pi):
            rot = np.exp2(eng.log2_b([r * np.exp(1j * th)])[0])
            dev = float(np.max(np.abs(rot - base)))
            if dev > worst:
                worst, where = dev, (r, th, int(np.argmax(np.abs(rot - base))))
    report(9, worst <= 1e-8,
           f"max |B_n(w) - B_n(e^(i theta) w)| = {worst:.3g} at |w|={where[0]}, "
           f"theta={where[1]:.4f}, n={where[2]} (example1)")


def test_criterion_10_example2_growth_law():
    _start()
    t = time.perf_counter()
    g, w, d, b = _family("example2", 2100)
    fits = example2_fits(g, w, d, b, 8, 512)
    literal = [f[0] for f in fits]
    sc = sequence_conditions(example1_weight, 2048)
    dt = time.perf_counter() - t
    ok = (max(literal) <= 1e-8 and sc.cond_iii and abs(sc.lhs - 2 ** (2 / 3)) <= 0.03
          and abs(sc.rhs - 2) <= 0.02 and dt < 10)
    report(10, ok, "fit residuals (lam_1..lam_n) " + ", ".join(f"{r:.3g}" for r in literal)
           + f"; lhs {sc.lhs:.4f}, rhs {sc.rhs:.4f}, (iii) {sc.cond_iii}; {dt:.2f}s")


def test_criterion_10b_example2_growth_law_level_aligned():
    """Same fit with the product aligned to the level of each basis vector."""
    _start()
    g, w, d, b = _family("example2", 2100)
    aligned = [f[1] for f in example2_fits(g, w, d, b, 8, 512)]
    report("10b", max(aligned) <= 1e-8,
           "fit residuals (lam_1..lam_{n+level}) " + ", ".join(f"{r:.3g}" for r in aligned))


def test_criterion_11_region_scan():
    _start()
    g, w = build_example1(300)
    radii = tuple(round(0.01 * i, 2) for i in range(63))
    t = time.perf_counter()
    scan = scan_region(g, w, GridSpec("polar", radii, 64), 256)
    dt = time.perf_counter() - t
    cls = scan.classes()
    total = time.perf_counter() - _T0[0]
    n_bad = int(np.count_nonzero(cls != BOUNDED))
    report(11, n_bad == 0 and total < 120,
           f"{cls.size} points with |w| <= 0.62, non-BOUNDED {n_bad}, scan {dt:.2f}s, "
           f"acceptance run so far {total:.1f}s")


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_criterion"):
            try:
                fn()
            except AssertionError:
                pass
