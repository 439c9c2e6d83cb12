"""Directed graphs given by a parent map, and positive weights on their edges.

A weighted shift acts on ``l2(V)`` by ``T e_v = sum(lam[u] e_u for u in children(v))``.
Every vertex has at most one parent; a vertex may be its own parent (a loop).
Graphs are materialized up to a finite ``depth`` and every branch continues
beyond it as a simple chain (``eventually-linear-chain``), optionally with a
weight rule that can be evaluated at any level.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import HorizonExceeded, InvalidArgument

TAIL_RULES = ("eventually-linear-chain", "declared-bound")

WeightsLike = Union[Sequence[float], np.ndarray, Callable[[int], float]]


@dataclass(frozen=True)
class ChainRule:
    """Weight of the edge entering level ``l`` along one branch.

    ``extent`` is the last level at which the rule is known (``None`` means
    every level).
    """

    func: Callable[[int], float]
    extent: Optional[int] = None

    def __call__(self, level: int) -> float:
        if self.extent is not None and level > self.extent:
            raise HorizonExceeded(f"weight rule only known up to level {self.extent}")
        return float(self.func(level))

    def values(self, lo: int, hi: int) -> np.ndarray:
        """Weights for levels ``lo..hi`` inclusive."""
        if hi < lo:
            return np.empty(0)
        if self.extent is not None and hi > self.extent:
            raise HorizonExceeded(f"weight rule only known up to level {self.extent}")
        vec = getattr(self.func, "vectorized", None)
        if vec is not None:
            return np.asarray(vec(np.arange(lo, hi + 1)), dtype=float)
        return np.array([self.func(l) for l in range(lo, hi + 1)], dtype=float)

    def reciprocal(self) -> "ChainRule":
        f = self.func

        def inv(level):
            return 1.0 / f(level)

        vec = getattr(f, "vectorized", None)
        if vec is not None:
            inv.vectorized = lambda ls: 1.0 / np.asarray(vec(ls), dtype=float)
        return ChainRule(inv, self.extent)


@dataclass(frozen=True, eq=False)
class ShiftGraph:
    """Materialized directed graph with parent map ``parent`` (-1 marks a root).

    Vertices are numbered breadth-first by level, then by branch order.
    ``branches[b]`` lists the vertices of the b-th chain at levels
    ``branch_start[b]..depth``; the chain continues past ``depth``.
    """

    parent: np.ndarray
    level: np.ndarray
    depth: int
    tail_rule: str = "eventually-linear-chain"
    labels: tuple = ()
    branches: tuple = ()
    branch_start: tuple = ()
    child_ptr: np.ndarray = field(init=False, repr=False)
    child_idx: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        parent = np.asarray(self.parent, dtype=np.int64)
        level = np.asarray(self.level, dtype=np.int64)
        parent.flags.writeable = False
        level.flags.writeable = False
        object.__setattr__(self, "parent", parent)
        object.__setattr__(self, "level", level)
        if self.tail_rule not in TAIL_RULES:
            raise InvalidArgument(f"unknown tail rule {self.tail_rule!r}")
        has = parent >= 0
        kids = np.nonzero(has)[0]
        order = np.argsort(parent[kids], kind="stable")
        child_idx = kids[order]
        counts = np.bincount(parent[kids], minlength=len(parent))
        child_ptr = np.concatenate([[0], np.cumsum(counts)])
        object.__setattr__(self, "child_idx", child_idx)
        object.__setattr__(self, "child_ptr", child_ptr)

    @property
    def n_vertices(self) -> int:
        return len(self.parent)

    @property
    def vertices(self) -> np.ndarray:
        return np.arange(self.n_vertices)

    @property
    def roots(self) -> np.ndarray:
        return np.nonzero(self.parent < 0)[0]

    @property
    def loops(self) -> np.ndarray:
        return np.nonzero(self.parent == np.arange(self.n_vertices))[0]

    def children(self, v: int) -> np.ndarray:
        return self.child_idx[self.child_ptr[v]:self.child_ptr[v + 1]]

    def fiber_sizes(self) -> np.ndarray:
        return np.diff(self.child_ptr)

    def label(self, v: int):
        return self.labels[v] if self.labels else v

    def max_level(self, mask: np.ndarray) -> int:
        """Highest level among vertices selected by ``mask`` (-1 if none)."""
        lv = self.level[mask]
        return int(lv.max()) if lv.size else -1


@dataclass(frozen=True, eq=False)
class WeightAssignment:
    """Positive weights ``lam[u]`` on the edge ``parent(u) -> u``.

    ``fiber_norm_sq[v]`` caches ``d_v = sum(lam[u]**2 for u in children(v))``,
    which is the diagonal of ``T*T``. For last-level vertices it comes from
    the tail rule, or is NaN when the tail only has declared bounds.
    """

    lam: np.ndarray
    fiber_norm_sq: np.ndarray
    tails: tuple = ()
    tail_bounds: tuple = (np.nan, np.nan)

    def __post_init__(self):
        for name in ("lam", "fiber_norm_sq"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    def weight_bounds(self, graph: ShiftGraph) -> tuple[float, float]:
        """(inf, sup) of the weights, materialized part and tail together."""
        lam = self.lam[graph.parent >= 0]
        lo, hi = float(lam.min()), float(lam.max())
        tlo, thi = self.tail_bounds
        if np.isfinite(tlo):
            lo = min(lo, tlo)
        if np.isfinite(thi):
            hi = max(hi, thi)
        return lo, hi

    def d_bounds(self, graph: ShiftGraph) -> tuple[float, float]:
        """(inf, sup) of ``d_v``; the tail contributes ``[inf^2, sup^2]``."""
        d = self.fiber_norm_sq[graph.level < graph.depth]
        lo, hi = float(d.min()), float(d.max())
        tlo, thi = self.tail_bounds
        if np.isfinite(tlo):
            lo = min(lo, tlo ** 2)
        if np.isfinite(thi):
            hi = max(hi, thi ** 2)
        return lo, hi

    def branch_log2_weights(self, graph: ShiftGraph, b: int, upto: int) -> np.ndarray:
        """log2 weights along branch ``b`` for levels ``branch_start[b]..upto``.

        Levels past the horizon come from the branch's tail rule.
        """
        path = graph.branches[b]
        start = graph.branch_start[b]
        inside = self.lam[path[: max(0, min(upto, graph.depth) - start + 1)]]
        if upto <= graph.depth:
            return np.log2(inside)
        rule = self.tails[b] if self.tails else None
        if rule is None:
            raise HorizonExceeded("no weight rule beyond the materialized depth")
        beyond = rule.values(graph.depth + 1, upto)
        return np.log2(np.concatenate([inside, beyond]))


def _fiber_norm_sq(graph: ShiftGraph, lam: np.ndarray, tails) -> np.ndarray:
    has = graph.parent >= 0
    d = np.bincount(graph.parent[has], weights=lam[has] ** 2, minlength=graph.n_vertices)
    d = d.astype(float)
    last = graph.level == graph.depth
    d[last] = np.nan
    for b, path in enumerate(graph.branches):
        rule = tails[b] if tails else None
        if rule is None:
            continue
        try:
            d[path[-1]] = rule(graph.depth + 1) ** 2
        except HorizonExceeded:
            pass
    return d


def make_weights(graph: ShiftGraph, lam, tails=(), tail_bounds=None) -> WeightAssignment:
    """Validate ``lam`` against ``graph`` and build the weight assignment."""
    lam = np.asarray(lam, dtype=float).copy()
    if lam.shape != (graph.n_vertices,):
        raise InvalidArgument("one weight slot per vertex is required")
    has = graph.parent >= 0
    if not np.all(np.isfinite(lam[has])) or np.any(lam[has] <= 0):
        raise InvalidArgument("weights must be positive and finite")
    lam[~has] = np.nan
    tails = tuple(tails)
    if tails and len(tails) != len(graph.branches):
        raise InvalidArgument("one tail rule per branch is required")
    if tail_bounds is None:
        tail_bounds = (np.nan, np.nan)
    return WeightAssignment(lam, _fiber_norm_sq(graph, lam, tails), tails, tuple(tail_bounds))


# -- weight rules -------------------------------------------------------------


def example1_weight(k):
    """Weights of the lacunary example: 1/2 on the bands 2^m+1..3*2^(m-1), m >= 2."""
    k = np.asarray(k, dtype=np.int64)
    out = np.ones(k.shape, dtype=float)
    big = k >= 5
    km1 = np.where(big, k - 1, 1)
    # m = floor(log2(k - 1)); exact for int64
    m = np.frexp(km1.astype(float))[1] - 1
    m = np.where(big, m, 0)
    half = big & (k <= 3 * (np.int64(1) << np.maximum(m - 1, 0)))
    out[half] = 0.5
    return out if out.ndim else float(out)


example1_weight.vectorized = example1_weight


def _rule_from(weights: WeightsLike, name: str) -> ChainRule:
    """``weights[0]`` is the weight entering level 1 (``lambda_1``)."""
    if callable(weights):
        f = weights
        if getattr(f, "vectorized", None) is None:
            def g(level, _f=f):
                return float(_f(level))
        else:
            g = f
        return ChainRule(g, None)
    seq = np.asarray(weights, dtype=float)
    if seq.ndim != 1 or seq.size == 0:
        raise InvalidArgument(f"{name} must be a nonempty sequence")
    if np.any(~np.isfinite(seq)) or np.any(seq <= 0):
        raise InvalidArgument(f"{name} must be positive")

    def look(level, _s=seq):
        return float(_s[level - 1])

    look.vectorized = lambda ls, _s=seq: _s[np.asarray(ls) - 1]
    return ChainRule(look, int(seq.size))


def _check_depth(depth, minimum=1):
    if not isinstance(depth, (int, np.integer)) or depth < minimum:
        raise InvalidArgument(f"depth must be an integer >= {minimum}")
    return int(depth)


def _bounds_of(rule: ChainRule, depth: int, declared):
    if declared is not None:
        return tuple(float(x) for x in declared)
    if rule.func is example1_weight:
        return (0.5, 1.0)
    if rule.extent is not None:
        vals = rule.values(1, rule.extent)
        return (float(vals.min()), float(vals.max()))
    return (np.nan, np.nan)


# -- families -----------------------------------------------------------------


def build_example1(depth: int):
    """Chain ``0 -> 1 -> 2 -> ...`` with a loop at 0 and the lacunary weights.

    ``lam[0]`` sits on the loop edge; ``lam[k]`` on the edge ``k-1 -> k``.
    """
    depth = _check_depth(depth, 2)
    n = depth + 1
    parent = np.arange(-1, n - 1)
    parent[0] = 0
    level = np.arange(n)
    graph = ShiftGraph(parent, level, depth, labels=tuple(range(n)),
                       branches=(np.arange(1, n),), branch_start=(1,))
    lam = example1_weight(np.arange(n))
    rule = ChainRule(example1_weight)
    return graph, make_weights(graph, lam, (rule,), (0.5, 1.0))


def build_classical(weights: WeightsLike, depth: int, tail_bounds=None):
    """Rooted unilateral chain ``0 -> 1 -> ... -> depth``; ``weights[0]`` enters vertex 1."""
    depth = _check_depth(depth)
    if not callable(weights) and len(weights) == 0:
        raise InvalidArgument("weights must be nonempty")
    rule = _rule_from(weights, "weights")
    n = depth + 1
    parent = np.arange(-1, n - 1)
    level = np.arange(n)
    lam = np.full(n, np.nan)
    lam[1:] = rule.values(1, depth)
    graph = ShiftGraph(parent, level, depth, labels=tuple(range(n)),
                       branches=(np.arange(1, n),), branch_start=(1,))
    bounds = _bounds_of(rule, depth, tail_bounds)
    return graph, make_weights(graph, lam, (rule,), bounds)


def build_example2(k: int, base_weights: WeightsLike, depth: int, tail_bounds=None):
    """Rooted tree with ``k`` infinite branches; branch 1 carries ``base_weights``.

    Vertex ``(m, n)`` is at level ``m`` on branch ``n``; branches 2..k have weight 1.
    """
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise InvalidArgument("k must be a positive integer")
    depth = _check_depth(depth)
    rule = _rule_from(base_weights, "base_weights")
    base = rule.values(1, depth)
    if np.any(base > 1):
        raise InvalidArgument("base weights must not exceed 1")
    k = int(k)
    n = 1 + k * depth
    parent = np.empty(n, dtype=np.int64)
    level = np.empty(n, dtype=np.int64)
    lam = np.full(n, np.nan)
    labels = [(0, 0)]
    parent[0], level[0] = -1, 0
    idx = 1
    for m in range(1, depth + 1):
        for b in range(1, k + 1):
            parent[idx] = 0 if m == 1 else idx - k
            level[idx] = m
            lam[idx] = base[m - 1] if b == 1 else 1.0
            labels.append((m, b))
            idx += 1
    branches = tuple(np.arange(1 + b, n, k) for b in range(k))
    one = ChainRule(lambda level: 1.0)
    one.func.vectorized = lambda ls: np.ones(np.shape(ls))
    tails = (rule,) + (one,) * (k - 1)
    lo, hi = _bounds_of(rule, depth, tail_bounds)
    bounds = (min(lo, 1.0), max(hi, 1.0)) if np.isfinite(lo) else (np.nan, np.nan)
    graph = ShiftGraph(parent, level, depth, labels=tuple(labels),
                       branches=branches, branch_start=(1,) * k)
    return graph, make_weights(graph, lam, tails, bounds)


def build_phi_graph(parent: Sequence[int], lam: Sequence[float], tail_bounds=None):
    """Generic graph from an explicit parent list (-1 = root, ``p == v`` = loop).

    Vertices must already be in breadth-first order. Tails are declared by
    bounds only; every last-level vertex is treated as continuing in a chain.
    """
    parent = np.asarray(parent, dtype=np.int64)
    n = len(parent)
    if n == 0:
        raise InvalidArgument("empty graph")
    level = np.full(n, -1, dtype=np.int64)
    for v in range(n):
        p = parent[v]
        if p < -1 or p >= n:
            raise InvalidArgument(f"parent of {v} out of range")
        if p == -1 or p == v:
            level[v] = 0
        elif p < v:
            level[v] = level[p] + 1
        else:
            raise InvalidArgument("vertices must be listed parents-first")
    if np.any(np.diff(level) < 0):
        raise InvalidArgument("vertices must be ordered by level")
    depth = int(level.max())
    last = np.nonzero(level == depth)[0]
    graph = ShiftGraph(parent, level, depth, tail_rule="declared-bound",
                       labels=tuple(range(n)),
                       branches=tuple(np.array([v]) for v in last),
                       branch_start=(depth,) * len(last))
    lam = np.asarray(lam, dtype=float)
    if tail_bounds is None:
        vals = lam[parent >= 0]
        tail_bounds = (float(vals.min()), float(vals.max()))
    return graph, make_weights(graph, lam, (), tail_bounds)


def materialize_support(graph: ShiftGraph, level_bound: int) -> np.ndarray:
    """All vertices with level <= ``level_bound`` in index order."""
    if level_bound < 0:
        raise InvalidArgument("level_bound must be nonnegative")
    if level_bound > graph.depth:
        raise HorizonExceeded(
            f"level {level_bound} requested but graph is materialized to depth {graph.depth}")
    return np.nonzero(graph.level <= level_bound)[0]
