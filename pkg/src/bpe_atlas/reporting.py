"""Output formats (CSV scan, JSON report, P5 heatmap) and the example tables."""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bpe import BOUNDED, INCONCLUSIVE, UNBOUNDED, RegionScan
from .errors import InvalidArgument

CSV_HEADER = "re,im,abs,B_N,slope,class"


def write_atomic(path, data) -> str:
    """Write ``data`` (str or bytes) to a temp file in the target directory, then rename."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    if isinstance(data, str):
        data = data.encode("utf-8")
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _g17(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def scan_csv(scan: RegionScan) -> str:
    lines = [CSV_HEADER]
    for s in scan.samples:
        w = s.w
        lines.append(",".join([_g17(w.real), _g17(w.imag), _g17(abs(w)), _g17(s.B_N),
                               _g17(s.slope), s.classification]))
    return "\n".join(lines) + "\n"


def write_scan_csv(scan: RegionScan, path) -> str:
    return write_atomic(path, scan_csv(scan))


def heatmap_pixels(scan: RegionScan) -> np.ndarray:
    """uint8 image: BOUNDED in 0..63, INCONCLUSIVE in 64..254, UNBOUNDED 255.

    Within a band the shade is ``log2 B_N`` clamped to ``[0, log2 cap]``.
    """
    rows, cols = scan.grid.shape
    if rows * cols == 0 or len(scan.samples) != rows * cols:
        raise InvalidArgument("scan does not match its grid")
    cap = scan.cap
    t = np.clip(scan.log2_BN() / math.log2(cap), 0.0, 1.0)
    cls = scan.classes()
    px = np.where(cls == BOUNDED, np.rint(63 * t),
                  np.where(cls == UNBOUNDED, 255, 64 + np.rint(190 * t)))
    img = px.reshape(rows, cols).astype(np.uint8)
    if scan.grid.kind == "cartesian":
        img = img[::-1]  # top row = largest imaginary part
    return img


def emit_heatmap(scan: RegionScan, path) -> str:
    img = heatmap_pixels(scan)
    h, w = img.shape
    return write_atomic(path, f"P5 {w} {h} 255\n".encode("ascii") + img.tobytes())


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    head, _, body = data.partition(b"\n")
    magic, w, h, mx = head.split()
    if magic != b"P5" or mx != b"255":
        raise InvalidArgument("not an 8-bit P5 file")
    return np.frombuffer(body, dtype=np.uint8).reshape(int(h), int(w))


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, Fraction):
        return float(v)
    if isinstance(v, complex):
        return [_jsonable(v.real), _jsonable(v.imag)]
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    return v


def report_json(operator: dict, radii: dict, horizons: dict, seed: int, rows=(), extra=None) -> str:
    """JSON document with keys operator, radii, horizons, seed, table (plus ``extra``)."""
    doc = {
        "operator": operator,
        "radii": {k: radii.get(k) for k in ("r_inner", "r_disc", "r_dual")} | {
            k: v for k, v in radii.items() if k not in ("r_inner", "r_disc", "r_dual")},
        "horizons": horizons,
        "seed": seed,
        "table": [r.to_dict() if hasattr(r, "to_dict") else r for r in rows],
    }
    if extra:
        doc.update(extra)
    return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"


# -- verification tables ---------------------------------------------------------


@dataclass
class Row:
    """One check. ``relation`` is ``abs`` (|c - t| <= tol), ``le`` (c <= t + tol)
    or ``ge`` (c >= t - tol)."""

    name: str
    target: float
    computed: float
    tolerance: float
    relation: str = "abs"
    passed: bool = field(init=False)

    def __post_init__(self):
        c, t, tol = float(self.computed), float(self.target), float(self.tolerance)
        if self.relation == "abs":
            ok = abs(c - t) <= tol
        elif self.relation == "le":
            ok = c <= t + tol
        elif self.relation == "ge":
            ok = c >= t - tol
        else:
            raise InvalidArgument(f"unknown relation {self.relation!r}")
        self.passed = bool(ok)

    def to_dict(self) -> dict:
        return {"name": self.name, "target": self.target, "computed": self.computed,
                "tolerance": self.tolerance, "relation": self.relation, "pass": self.passed}


@dataclass
class VerificationTable:
    title: str
    rows: list

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def row(self, name: str) -> Row:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)

    def format(self) -> str:
        rel = {"abs": "+-", "le": "<=", "ge": ">="}
        width = max(len(r.name) for r in self.rows)
        out = [self.title]
        for r in self.rows:
            out.append(f"  {'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  "
                       f"computed {float(r.computed):.12g}  {rel[r.relation]} "
                       f"target {float(r.target):.12g}  (tol {float(r.tolerance):g})")
        return "\n".join(out)


def _example1_rows(depth, N, seed):
    from .graph_model import build_example1
    from .operator_core import cauchy_dual, wandering_basis
    from .spectral import (disc_radii, example1_certificate, operator_norm_n, orbit_norms,
                           weight_product_log)

    graph, weights = build_example1(depth)
    dual = cauchy_dual(graph, weights)
    basis = wandering_basis(graph, weights)
    rows = []
    for n in range(2, 13):
        rows.append(Row(f"log2 product n={n}", 2 ** (n - 1) - 3,
                        weight_product_log(graph, dual, 1, 2 ** n), 1e-12))
    certs = [example1_certificate(n) for n in range(1, 4097)]
    worst = max(c.ratio for c in certs)
    rows.append(Row("exponent ratio max n<=4096", 2 / 3, float(worst), 0.0, "le"))
    miss = sum(1 for c in certs if (c.k_n == Fraction(1 << c.m_n, 2)) != c.attains_bound)
    rows.append(Row("ratio equals 2/3 exactly where k_n = 2^(m_n-1)", 0, miss, 0))
    orb = orbit_norms(graph, dual, basis.vectors[0], 64)
    ns = np.arange(3, 65)
    log2_bound = np.array([math.log2(n + 17) + 2 * float(example1_certificate(int(n)).log2_product) - 1
                           for n in ns])
    excess = float(np.max(2 * orb.log2_norms[ns] - log2_bound))
    rows.append(Row("log2(||T'^n x||^2 / (n+17)-bound) max 3<=n<=64", 0.0, excess, 0.0, "le"))
    rep = disc_radii(graph, weights, basis, N, seed=seed)
    rows.append(Row("local radius r_T'(x)", 2 ** (2 / 3), rep.r_local[0], 0.02, "le"))
    n_op = min(512, depth // 4)
    r_dual = float(np.exp2(operator_norm_n(graph, dual, n_op) / n_op))
    rows.append(Row("r(T')", 2.0, r_dual, 1e-9))
    rows.append(Row("r_inner = 1/r(T')", 0.5, rep.r_inner, 1e-9))
    rows.append(Row("r_disc - r_inner", 0.1, rep.r_disc - rep.r_inner, 0.0, "ge"))
    return rows, rep


def verify_example1(depth: int = 2100, N: int = 2048, seed: int = 0x5EED) -> VerificationTable:
    """Checks of the lacunary example, deterministic in ``(seed, depth, N)``."""
    rows, _ = _example1_rows(depth, N, seed)
    return VerificationTable(f"example1 depth={depth} N={N}", rows)


def growth_fit(norms_sq: np.ndarray, feature: np.ndarray):
    """Nonnegative-free least squares ``y = c * f + d`` with rows scaled by ``1/y``.

    Returns ``(c, d, max relative residual)``.
    """
    y = np.asarray(norms_sq, dtype=float)
    f = np.asarray(feature, dtype=float)
    A = np.column_stack([f / y, 1.0 / y])
    colscale = np.linalg.norm(A, axis=0)
    colscale[colscale == 0] = 1.0
    coef, *_ = np.linalg.lstsq(A / colscale, np.ones_like(y), rcond=None)
    coef = coef / colscale
    resid = np.abs(A @ coef - 1.0)
    return float(coef[0]), float(coef[1]), float(resid.max())


def example2_fits(graph, weights, dual, basis, lo=8, hi=512):
    """Per basis vector: relative residual of the two-parameter growth fit, with the
    feature ``(lam_1...lam_n)**-2`` and with the level-aligned feature
    ``(lam_1...lam_{n+level})**-2``."""
    from .spectral import orbit_norms

    logs = weights.branch_log2_weights(graph, 0, hi + 2)
    cum = np.concatenate([[0.0], np.cumsum(logs)])  # cum[n] = log2(lam_1...lam_n)
    ns = np.arange(lo, hi + 1)
    out = []
    for x in basis.vectors:
        orb = orbit_norms(graph, dual, x, hi)
        lv = graph.max_level(x.amplitudes != 0)
        ref = 2 * orb.log2_norms[ns]
        y = np.exp2(ref - ref.max())
        lit = np.exp2(-2 * cum[ns] - ref.max())
        ali = np.exp2(-2 * cum[ns + lv] - ref.max())
        out.append((growth_fit(y, lit)[2], growth_fit(y, ali)[2]))
    return out


def verify_example2(k: int = 3, depth: int = 2100, N: int = 2048, seed: int = 0x5EED,
                    fit_range=(8, 512)) -> VerificationTable:
    from .graph_model import build_example2, example1_weight
    from .operator_core import cauchy_dual, wandering_basis
    from .spectral import disc_radii, sequence_conditions

    if k < 2:
        raise InvalidArgument("k must be at least 2")
    graph, weights = build_example2(k, example1_weight, depth)
    dual = cauchy_dual(graph, weights)
    basis = wandering_basis(graph, weights)
    # dual weights: level 1 divided by ||T e_root||^2, deeper levels inverted
    lam = weights.lam
    root_sq = float(np.sum(lam[graph.children(0)] ** 2))
    expect = np.where(graph.level == 1, lam / root_sq, 1.0 / lam)
    mask = graph.level >= 1
    rows = [Row("dual weight formula max abs error", 0.0,
                float(np.max(np.abs(dual.lam[mask] - expect[mask]))), 1e-15)]
    rows.append(Row("dim ker T*", k, basis.dim, 0))
    fits = example2_fits(graph, weights, dual, basis, *fit_range)
    for i, (lit, ali) in enumerate(fits):
        rows.append(Row(f"growth fit x_{i} (lam_1..lam_n)", 0.0, lit, 1e-8, "le"))
    for i, (lit, ali) in enumerate(fits):
        rows.append(Row(f"growth fit x_{i} level-aligned", 0.0, ali, 1e-8, "le"))
    sc = sequence_conditions(example1_weight, N)
    rows.append(Row("condition (i) lam_n <= 1", 1, int(sc.cond_i), 0))
    rows.append(Row("condition (ii) lam_n > 0", 1, int(sc.cond_ii), 0))
    rows.append(Row("condition (iii) lhs", 2 ** (2 / 3), sc.lhs, 0.03))
    rows.append(Row("condition (iii) rhs", 2.0, sc.rhs, 0.02))
    rows.append(Row("condition (iii) lhs < rhs", 1, int(sc.cond_iii), 0))
    rep = disc_radii(graph, weights, basis, N, seed=seed)
    rows.append(Row("r_disc - r_inner", 0.1, rep.r_disc - rep.r_inner, 0.0, "ge"))
    return VerificationTable(f"example2 k={k} depth={depth} N={N}", rows)
