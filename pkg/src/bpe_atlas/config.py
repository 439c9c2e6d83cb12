"""Run configuration: a JSON document with four sections plus a seed.

Unknown keys are rejected. ``serialize`` writes every resolved default, so
``parse_config(serialize(c)) == c``.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Optional

import numpy as np

from .errors import ConfigError

FAMILIES = ("example1", "example2", "classical", "custom-phi-graph")
RULES = ("example1-rule", "ones")
DEFAULT_SEED = 0x5EED


@dataclass(frozen=True)
class OperatorSpec:
    family: str = "example1"
    depth: Optional[int] = None
    k: int = 3
    base: object = "example1-rule"     # example2 branch weights: rule id or list
    weights: object = "ones"           # classical weights: rule id or list
    parent: Optional[tuple] = None     # custom-phi-graph
    lam: Optional[tuple] = None
    tail_bounds: Optional[tuple] = None


@dataclass(frozen=True)
class ScanSpec:
    grid: str = "polar"
    N: int = 256
    radii: Optional[tuple] = None      # None: 0 .. 1.5 r_dual, step 0.01
    rays: int = 64
    xs: Optional[tuple] = None         # None: 64 points on [-1.5 r_dual, 1.5 r_dual]
    ys: Optional[tuple] = None
    tail_fraction: float = 0.5
    slope_threshold: float = 1e-3
    cap: float = 1e12


@dataclass(frozen=True)
class RadiiSpec:
    N: Optional[int] = None            # None: min(2048, depth - 2)
    sphere_samples: int = 64


@dataclass(frozen=True)
class KernelSpec:
    z: tuple = (0.0, 0.0)
    w: tuple = (0.0, 0.0)
    N: Optional[int] = None            # None: scan.N


@dataclass(frozen=True)
class OutputSpec:
    dir: str = "out"
    formats: tuple = ("csv", "json", "pgm")


@dataclass(frozen=True)
class RunConfig:
    operator: OperatorSpec = field(default_factory=OperatorSpec)
    scan: ScanSpec = field(default_factory=ScanSpec)
    radii: RadiiSpec = field(default_factory=RadiiSpec)
    kernel: KernelSpec = field(default_factory=KernelSpec)
    output: OutputSpec = field(default_factory=OutputSpec)
    seed: int = DEFAULT_SEED

    @property
    def kernel_N(self) -> int:
        return self.kernel.N if self.kernel.N is not None else self.scan.N


_SECTIONS = {"operator": OperatorSpec, "scan": ScanSpec, "radii": RadiiSpec,
             "kernel": KernelSpec, "output": OutputSpec}


def _freeze(v):
    if isinstance(v, list):
        return tuple(_freeze(x) for x in v)
    return v


def _section(name, cls, data):
    if not isinstance(data, dict):
        raise ConfigError(f"{name}: expected an object")
    known = {f.name for f in fields(cls)}
    extra = sorted(set(data) - known)
    if extra:
        raise ConfigError(f"{name}: unknown key(s) {', '.join(extra)}")
    return cls(**{k: _freeze(v) for k, v in data.items()})


def _is_int(v):
    return isinstance(v, (int, np.integer)) and not isinstance(v, bool)


def _is_num(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _custom_depth(parent) -> int:
    level = []
    for v, p in enumerate(parent):
        if not _is_int(p) or p < -1 or p > v:
            raise ConfigError(f"operator.parent: entry {v} must be -1, itself or an earlier vertex")
        level.append(0 if p in (-1, v) else level[p] + 1)
    return max(level)


def _resolve(cfg: RunConfig) -> RunConfig:
    op, sc, ra, ke = cfg.operator, cfg.scan, cfg.radii, cfg.kernel
    if op.family not in FAMILIES:
        raise ConfigError(f"operator.family: must be one of {', '.join(FAMILIES)}")
    if not _is_int(sc.N) or sc.N < 32:
        raise ConfigError("scan.N: must be an integer >= 32")
    if op.family == "custom-phi-graph":
        if op.parent is None or op.lam is None or len(op.parent) != len(op.lam):
            raise ConfigError("operator: custom-phi-graph needs parent and lam of equal length")
        if op.depth is not None:
            raise ConfigError("operator.depth: not used for custom-phi-graph")
        gdepth = _custom_depth(op.parent)
        if gdepth < sc.N + 2:
            raise ConfigError(f"depth >= N + 2 violated: graph depth {gdepth}, scan.N {sc.N}")
    else:
        if op.depth is None:
            need = max(sc.N, ra.N or 0, ke.N or 0) + 2
            op = replace(op, depth=max(need, 2100 if ra.N is None else need))
        if not _is_int(op.depth):
            raise ConfigError("operator.depth: must be an integer")
        if op.depth < sc.N + 2:
            raise ConfigError(f"depth >= N + 2 violated: depth {op.depth}, scan.N {sc.N}")
    if op.family == "example2":
        if not _is_int(op.k) or op.k < 2:
            raise ConfigError("operator.k: must be an integer >= 2")
        if not (op.base in RULES or isinstance(op.base, tuple)):
            raise ConfigError(f"operator.base: rule id in {RULES} or a list of weights")
    if op.family == "classical" and not (op.weights in RULES or isinstance(op.weights, tuple)):
        raise ConfigError(f"operator.weights: rule id in {RULES} or a list of weights")
    if sc.grid not in ("polar", "cartesian"):
        raise ConfigError("scan.grid: polar or cartesian")
    if sc.grid == "polar":
        if not _is_int(sc.rays) or sc.rays < 1:
            raise ConfigError("grid nonempty violated: scan.rays must be >= 1")
        if sc.radii is not None and (len(sc.radii) == 0 or not all(_is_num(r) and r >= 0 for r in sc.radii)):
            raise ConfigError("grid nonempty violated: scan.radii must be a nonempty list of radii >= 0")
    else:
        if (sc.xs is not None and len(sc.xs) == 0) or (sc.ys is not None and len(sc.ys) == 0):
            raise ConfigError("grid nonempty violated: cartesian xs and ys must be nonempty")
    for name in ("tail_fraction", "slope_threshold", "cap"):
        v = getattr(sc, name)
        if not _is_num(v) or not v > 0:
            raise ConfigError(f"scan.{name}: thresholds must be positive")
    if sc.tail_fraction > 1:
        raise ConfigError("scan.tail_fraction: must be <= 1")
    depth = op.depth if op.depth is not None else _custom_depth(op.parent)
    if ra.N is None:
        ra = replace(ra, N=min(2048, depth - 2))
    if ra.N > depth - 2:
        raise ConfigError(f"depth >= N + 2 violated: depth {depth}, radii.N {ra.N}")
    if ke.N is not None and ke.N > depth - 2:
        raise ConfigError(f"depth >= N + 2 violated: depth {depth}, kernel.N {ke.N}")
    if not _is_int(ra.N if ra.N is not None else 64) or (ra.N is not None and ra.N < 16):
        raise ConfigError("radii.N: must be an integer >= 16")
    if not _is_int(ra.sphere_samples) or ra.sphere_samples < 0:
        raise ConfigError("radii.sphere_samples: must be a nonnegative integer")
    for name in ("z", "w"):
        v = getattr(ke, name)
        if not (isinstance(v, tuple) and len(v) == 2 and all(_is_num(t) for t in v)):
            raise ConfigError(f"kernel.{name}: expected [re, im]")
    if not _is_int(cfg.seed):
        raise ConfigError("seed: must be an integer")
    return replace(cfg, operator=op, radii=ra)


def parse_config(text: str) -> RunConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ConfigError("top level: expected an object")
    extra = sorted(set(data) - set(_SECTIONS) - {"seed"})
    if extra:
        raise ConfigError(f"top level: unknown key(s) {', '.join(extra)}")
    parts = {name: _section(name, cls, data.get(name, {})) for name, cls in _SECTIONS.items()}
    cfg = RunConfig(**parts, seed=data.get("seed", DEFAULT_SEED))
    return _resolve(cfg)


def _plain(v):
    if isinstance(v, tuple):
        return [_plain(x) for x in v]
    return v


def to_dict(cfg: RunConfig) -> dict:
    out = {name: {k: _plain(v) for k, v in asdict(getattr(cfg, name)).items()} for name in _SECTIONS}
    out["seed"] = cfg.seed
    return out


def serialize(cfg: RunConfig) -> str:
    return json.dumps(to_dict(cfg), indent=2, sort_keys=True)


def _ones(k):
    return np.ones(np.shape(k)) if np.ndim(k) else 1.0


_ones.vectorized = _ones


def build_operator(spec: OperatorSpec):
    """``(graph, weights)`` for an operator section."""
    from . import graph_model as gm

    def rule(r):
        if isinstance(r, tuple):
            return np.asarray(r, dtype=float)
        return gm.example1_weight if r == "example1-rule" else _ones

    def bounds(r):
        if spec.tail_bounds is None and r == "ones":
            return (1.0, 1.0)
        return spec.tail_bounds

    if spec.family == "example1":
        return gm.build_example1(spec.depth)
    if spec.family == "classical":
        return gm.build_classical(rule(spec.weights), spec.depth, bounds(spec.weights))
    if spec.family == "example2":
        return gm.build_example2(spec.k, rule(spec.base), spec.depth, bounds(spec.base))
    return gm.build_phi_graph(spec.parent, spec.lam, spec.tail_bounds)
