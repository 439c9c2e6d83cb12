"""``bpe-atlas`` command line: describe, radii, scan, kernel, verify-example1/2.

Exit codes: 0 success, 1 configuration error, 2 computation or I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import config as cfgmod
from .bpe import INCONCLUSIVE, GridSpec, Thresholds, kernel_gram, evaluation_data, scan_region
from .errors import BpeAtlasError, ConfigError, InvalidArgument
from .operator_core import cauchy_dual, wandering_basis
from .reporting import (emit_heatmap, report_json, verify_example1, verify_example2,
                        write_atomic, write_scan_csv)
from .spectral import disc_radii, operator_norm_n, spectral_radius_estimate

COMMANDS = ("describe", "radii", "scan", "kernel", "verify-example1", "verify-example2")


class _Fail(Exception):
    def __init__(self, code, msg):
        super().__init__(msg)
        self.code = code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bpe-atlas",
                                description="Bounded point evaluations of weighted shifts on graphs.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", metavar="PATH", help="JSON run configuration")
    p.add_argument("--out", metavar="DIR", help="output directory (overrides output.dir)")
    p.add_argument("--nmax", type=int, help="scan horizon N")
    p.add_argument("--depth", type=int, help="materialized depth")
    p.add_argument("--grid", choices=("polar", "cartesian"))
    p.add_argument("--threshold", type=float, help="slope threshold per step")
    p.add_argument("--seed", type=int)
    p.add_argument("--strict", action="store_true",
                   help="exit 2 on INCONCLUSIVE points, failing rows or divergent series")
    return p


def load_config(args) -> cfgmod.RunConfig:
    raw = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
        if not isinstance(raw, dict):
            raise ConfigError("top level: expected an object")
    for section in ("operator", "scan", "output"):
        raw.setdefault(section, {})
        if not isinstance(raw[section], dict):
            raise ConfigError(f"{section}: expected an object")
    if args.depth is not None:
        raw["operator"]["depth"] = args.depth
    if args.nmax is not None:
        raw["scan"]["N"] = args.nmax
    if args.grid is not None:
        raw["scan"]["grid"] = args.grid
    if args.threshold is not None:
        raw["scan"]["slope_threshold"] = args.threshold
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.out is not None:
        raw["output"]["dir"] = args.out
    return cfgmod.parse_config(json.dumps(raw))


def _operator(cfg):
    try:
        graph, weights = cfgmod.build_operator(cfg.operator)
    except InvalidArgument as exc:
        raise ConfigError(f"operator: {exc}") from None
    return graph, weights


def _grid(cfg, r_dual) -> GridSpec:
    sc = cfg.scan
    if sc.grid == "polar":
        if sc.radii is None:
            return GridSpec.default_polar(r_dual, sc.rays)
        return GridSpec("polar", tuple(sc.radii), sc.rays)
    half = 1.5 * r_dual
    xs = sc.xs if sc.xs is not None else tuple(np.linspace(-half, half, 64))
    ys = sc.ys if sc.ys is not None else tuple(np.linspace(-half, half, 64))
    return GridSpec("cartesian", xs=tuple(xs), ys=tuple(ys))


def _out(cfg, name) -> str:
    return os.path.join(cfg.output.dir, name)


def _radii(cfg, graph, weights, basis):
    rep = disc_radii(graph, weights, basis, cfg.radii.N, cfg.radii.sphere_samples, cfg.seed)
    return rep


def cmd_describe(cfg, args):
    graph, weights = _operator(cfg)
    basis = wandering_basis(graph, weights)
    dual = cauchy_dual(graph, weights)
    info = {
        "family": cfg.operator.family,
        "vertices": graph.n_vertices,
        "depth": graph.depth,
        "roots": graph.roots.tolist(),
        "loops": graph.loops.tolist(),
        "dim_ker_T_star": basis.dim,
        "weight_bounds": list(weights.weight_bounds(graph)),
        "d_bounds": list(weights.d_bounds(graph)),
        "dual_weight_bounds": list(dual.weight_bounds(graph)),
    }
    text = report_json(cfgmod.to_dict(cfg)["operator"], {}, {"depth": graph.depth}, cfg.seed,
                       extra={"describe": info})
    print(text, end="")
    if "json" in cfg.output.formats:
        write_atomic(_out(cfg, "describe.json"), text)
    return 0


def cmd_radii(cfg, args):
    graph, weights = _operator(cfg)
    basis = wandering_basis(graph, weights)
    rep = _radii(cfg, graph, weights, basis)
    d = rep.to_dict()
    text = report_json(cfgmod.to_dict(cfg)["operator"], d,
                       {"radii_N": cfg.radii.N, "depth": graph.depth}, cfg.seed)
    print(f"r(T') ~ {rep.r_dual_estimate:.12g}  r_inner {rep.r_inner:.12g}  r_disc {rep.r_disc:.12g}")
    if "json" in cfg.output.formats:
        write_atomic(_out(cfg, "radii.json"), text)
    return 0


def cmd_scan(cfg, args):
    graph, weights = _operator(cfg)
    basis = wandering_basis(graph, weights)
    rep = _radii(cfg, graph, weights, basis)
    grid = _grid(cfg, rep.r_dual_estimate)
    sc = cfg.scan
    thr = Thresholds(sc.tail_fraction, sc.slope_threshold, sc.cap)
    scan = scan_region(graph, weights, grid, sc.N, thr, radii=rep)
    fmts = cfg.output.formats
    if "csv" in fmts:
        write_scan_csv(scan, _out(cfg, "scan.csv"))
    if "pgm" in fmts:
        emit_heatmap(scan, _out(cfg, "scan.pgm"))
    cls = scan.classes()
    counts = {c: int(np.count_nonzero(cls == c)) for c in ("BOUNDED", "UNBOUNDED", INCONCLUSIVE)}
    if "json" in fmts:
        write_atomic(_out(cfg, "report.json"), report_json(
            cfgmod.to_dict(cfg)["operator"], rep.to_dict(),
            {"scan_N": sc.N, "radii_N": cfg.radii.N, "depth": graph.depth}, cfg.seed,
            extra={"scan": {"points": len(scan.samples), "counts": counts,
                            "dropped_columns": scan.dropped, "grid": grid.kind,
                            "shape": list(grid.shape)}}))
    print(f"{len(scan.samples)} points: " + ", ".join(f"{k} {v}" for k, v in counts.items()))
    if args.strict and counts[INCONCLUSIVE]:
        raise _Fail(2, f"{counts[INCONCLUSIVE]} INCONCLUSIVE points (strict mode)")
    return 0


def cmd_kernel(cfg, args):
    graph, weights = _operator(cfg)
    basis = wandering_basis(graph, weights)
    dual = cauchy_dual(graph, weights)
    z = complex(*cfg.kernel.z)
    w = complex(*cfg.kernel.w)
    N = cfg.kernel_N
    K = kernel_gram(graph, dual, basis, z, w, N, strict=args.strict)
    ez = evaluation_data(graph, dual, basis, z, N, strict=args.strict)
    ew = evaluation_data(graph, dual, basis, w, N, strict=args.strict)
    extra = {"kernel": {"z": z, "w": w, "N": N,
                        "kappa_re": K.real, "kappa_im": K.imag,
                        "tail_bound_z": ez.tail_bound, "tail_bound_w": ew.tail_bound,
                        "norm_E_z": ez.evaluation_norm(), "norm_E_w": ew.evaluation_norm()}}
    text = report_json(cfgmod.to_dict(cfg)["operator"], {}, {"kernel_N": N, "depth": graph.depth},
                       cfg.seed, extra=extra)
    print(np.array2string(K, precision=12))
    if "json" in cfg.output.formats:
        write_atomic(_out(cfg, "kernel.json"), text)
    return 0


def _verify(cfg, args, table, name):
    print(table.format())
    if "json" in cfg.output.formats:
        write_atomic(_out(cfg, f"{name}.json"), report_json(
            cfgmod.to_dict(cfg)["operator"], {}, {"depth": cfg.operator.depth, "radii_N": cfg.radii.N},
            cfg.seed, table.rows))
    if args.strict and not table.all_passed:
        raise _Fail(2, "verification rows failed (strict mode)")
    return 0


def cmd_verify_example1(cfg, args):
    t = verify_example1(cfg.operator.depth, cfg.radii.N, cfg.seed)
    return _verify(cfg, args, t, "verify-example1")


def cmd_verify_example2(cfg, args):
    t = verify_example2(cfg.operator.k, cfg.operator.depth, cfg.radii.N, cfg.seed)
    return _verify(cfg, args, t, "verify-example2")


_DISPATCH = {
    "describe": cmd_describe,
    "radii": cmd_radii,
    "scan": cmd_scan,
    "kernel": cmd_kernel,
    "verify-example1": cmd_verify_example1,
    "verify-example2": cmd_verify_example2,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        cfg = load_config(args)
        if args.command.startswith("verify") and cfg.operator.depth is None:
            raise ConfigError("verification needs a depth")
        return _DISPATCH[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except _Fail as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (BpeAtlasError, OSError, ValueError, FloatingPointError) as exc:
        print(f"compute error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
