"""Growth data for shifts and their Cauchy duals, all in log2 arithmetic.

Norms such as ``||T'^n x||`` in the lacunary example grow like ``2**(2n/3)``
and weight products like ``2**(2**(n-1))``; every quantity here is carried
as a base-2 logarithm or as a mantissa array plus a per-step exponent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import HorizonExceeded, InvalidArgument, NoLoopAtRoot
from .graph_model import ShiftGraph, WeightAssignment
from .operator_core import (
    HilbertVector,
    WanderingBasis,
    cauchy_dual,
    shift_amplitudes,
)

DEFAULT_SEED = 0x5EED


@dataclass
class OrbitRecord:
    x: HilbertVector
    N: int
    log2_norms: np.ndarray

    def norms_sq(self) -> np.ndarray:
        """``||T^n x||**2``; may overflow to inf."""
        return np.exp2(2.0 * self.log2_norms)


def _require_depth(graph: ShiftGraph, need: int, what: str):
    if graph.depth < need:
        raise HorizonExceeded(f"{what} needs depth >= {need}, graph has {graph.depth}")


def _renormalize(A: np.ndarray):
    """Scale ``A`` by a power of two so its peak modulus is in [1, 2)."""
    peak = np.max(np.abs(A))
    if peak == 0:
        return A, 0
    e = int(np.frexp(peak)[1] - 1)
    return A * np.exp2(-e), e


def orbit_matrix(graph: ShiftGraph, weights: WeightAssignment, X: np.ndarray, N: int):
    """Iterate the shift on the columns of ``X``.

    Yields ``(n, mantissa, log2_scale)`` for ``n = 0..N`` with
    ``T^n X = mantissa * 2**log2_scale``.
    """
    A, s = _renormalize(np.asarray(X, dtype=complex))
    yield 0, A, s
    for n in range(1, N + 1):
        A, e = _renormalize(shift_amplitudes(graph, weights.lam, A))
        s += e
        yield n, A, s


def orbit_norms(graph: ShiftGraph, weights: WeightAssignment, x: HilbertVector,
                N: int) -> OrbitRecord:
    """``log2 ||T^n x||`` for ``n = 0..N``; pass dual weights to iterate ``T'``."""
    if N < 1:
        raise InvalidArgument("N must be positive")
    top = graph.max_level(x.amplitudes != 0)
    _require_depth(graph, N + top + 1, "orbit_norms")
    out = np.empty(N + 1)
    for n, A, s in orbit_matrix(graph, weights, x.amplitudes, N):
        nrm = np.linalg.norm(A)
        out[n] = -np.inf if nrm == 0 else s + x.log2_scale + np.log2(nrm)
    return OrbitRecord(x, N, out)


def orbit_gram(graph: ShiftGraph, weights: WeightAssignment, basis: WanderingBasis, N: int):
    """Gram matrices of ``{T^n x_i}`` for ``n = 0..N``.

    Returns ``(log2_scale, G)`` with ``<T^n x_j, T^n x_i> = G[n, i, j] * 4**log2_scale[n]``.
    The norm of ``T^n (sum c_i x_i)`` follows for any coefficient vector.
    """
    _require_depth(graph, N + basis.max_level(graph) + 1, "orbit_gram")
    d = basis.dim
    scale = np.empty(N + 1)
    G = np.empty((N + 1, d, d), dtype=complex)
    for n, A, s in orbit_matrix(graph, weights, basis.matrix(), N):
        scale[n] = s
        G[n] = A.T @ A.conj()
    return scale, G


# -- weight products ----------------------------------------------------------


def _branch_log2(graph, weights, branch, a, b):
    """log2 weights for chain indices ``a..b`` along ``branch``.

    Index 0 is allowed when the branch hangs off a loop vertex and refers to
    the loop weight.
    """
    start = graph.branch_start[branch]
    parts = []
    if a < start:
        if a != 0 or start != 1:
            raise InvalidArgument(f"index {a} is not on branch {branch}")
        v0 = graph.parent[graph.branches[branch][0]]
        if graph.parent[v0] != v0:
            raise InvalidArgument("index 0 is only defined for a loop vertex")
        parts.append(np.log2(weights.lam[[v0]]))
        a = 1
    vals = weights.branch_log2_weights(graph, branch, b)
    parts.append(vals[a - start:b - start + 1])
    return np.concatenate(parts)


def weight_product_log(graph: ShiftGraph, weights: WeightAssignment, a: int, b: int,
                       branch: int = 0) -> float:
    """``sum(log2 lam_k for k in a..b)`` along a chain; 0 for an empty range."""
    if a > b:
        return 0.0
    if a < 0:
        raise InvalidArgument("indices must be nonnegative")
    return float(np.sum(_branch_log2(graph, weights, branch, a, b)))


@dataclass(frozen=True)
class Example1Certificate:
    n: int
    m_n: int
    k_n: int
    alpha_kn: int
    ratio: Fraction
    log2_product: Fraction

    @property
    def attains_bound(self) -> bool:
        return self.ratio == Fraction(2, 3)


def example1_certificate(n: int) -> Example1Certificate:
    """Split ``n = 2**m + k`` with ``0 <= k < 2**m`` and evaluate the exponent ratio.

    ``log2_product`` is the closed form for ``log2(lam'_1 ... lam'_n)``; it is
    exact for ``n >= 3``.
    """
    if n < 1:
        raise InvalidArgument("n must be positive")
    m = n.bit_length() - 1
    k = n - (1 << m)
    half = Fraction(1 << m, 2)
    alpha = k if k <= half else int(half)
    ratio = (half + alpha) / (n)
    return Example1Certificate(n, m, k, alpha, ratio, half + alpha - 3)


# -- radii ----------------------------------------------------------------------


def _window(N: int, window_fraction: float) -> np.ndarray:
    if not 0 < window_fraction < 1:
        raise InvalidArgument("window_fraction must be in (0, 1)")
    lo = max(1, math.ceil((1 - window_fraction) * N))
    return np.arange(lo, N + 1)


def local_spectral_radius(orbit: OrbitRecord, window_fraction: float = 0.5) -> float:
    """Tail-max proxy for ``limsup ||T^n x||**(1/n)`` over the last part of the horizon."""
    if orbit.N < 16:
        raise InvalidArgument("orbit horizon must be at least 16")
    ns = _window(orbit.N, window_fraction)
    return float(np.exp2(np.max(orbit.log2_norms[ns] / ns)))


def _log2_orbit_norm_sq_dp(graph: ShiftGraph, weights: WeightAssignment, n: int) -> np.ndarray:
    """``log2 ||T^n e_v||**2`` for every vertex (``-inf`` where the horizon cuts it)."""
    lw = 2.0 * np.log2(np.where(graph.parent >= 0, weights.lam, 1.0))
    L = np.zeros(graph.n_vertices)
    ptr, idx = graph.child_ptr, graph.child_idx
    nonempty = np.nonzero(np.diff(ptr) > 0)[0]
    starts = ptr[nonempty]
    for _ in range(n):
        c = lw[idx] + L[idx]
        new = np.full(graph.n_vertices, -np.inf)
        if idx.size:
            new[nonempty] = np.logaddexp2.reduceat(c, starts)
        L = new
    return L


def _max_tail_window(graph: ShiftGraph, weights: WeightAssignment, n: int,
                     first_start: int, scan_limit: int) -> float:
    """Largest ``sum log2 lam`` over windows of ``n`` consecutive chain edges.

    Windows begin at chain vertices of level ``>= first_start`` and end by
    ``scan_limit``. Branches without a weight rule are cut at the horizon.
    """
    best = -np.inf
    for b in range(len(graph.branches)):
        start = graph.branch_start[b]
        rule = weights.tails[b] if weights.tails else None
        upto = scan_limit
        if rule is None:
            upto = graph.depth
        elif rule.extent is not None:
            upto = min(upto, rule.extent)
        if upto < max(first_start, start) + n:
            continue
        lw = weights.branch_log2_weights(graph, b, upto)
        csum = np.concatenate([[0.0], np.cumsum(lw)])
        # window covering levels s+1..s+n has sum csum[s+n-start+1] - csum[s-start+1]
        s0 = max(first_start, start)
        s = np.arange(s0, upto - n + 1)
        if s.size == 0:
            continue
        sums = csum[s + n - start + 1] - csum[s - start + 1]
        best = max(best, float(sums.max()))
    return best


def operator_norm_n(graph: ShiftGraph, weights: WeightAssignment, n: int,
                    level_bound: Optional[int] = None, scan_limit: Optional[int] = None) -> float:
    """``log2 ||T^n||`` from the materialized vertices and the chain tails.

    ``T^{*n} T^n`` is diagonal for these shifts, so the norm is the largest
    ``||T^n e_v||``. Vertices up to ``level_bound`` are handled exactly; beyond
    that every branch is a chain, scanned through its weight rule up to
    ``scan_limit``.
    """
    if n < 1:
        raise InvalidArgument("n must be positive")
    if level_bound is None:
        level_bound = graph.depth - n
    if level_bound < 0 or level_bound + n > graph.depth:
        raise HorizonExceeded(f"level_bound + n must be <= depth ({graph.depth})")
    L = _log2_orbit_norm_sq_dp(graph, weights, n)
    inside = float(np.max(L[graph.level <= level_bound])) / 2.0
    if scan_limit is None:
        scan_limit = max(graph.depth, 4 * n) + n
    tail = _max_tail_window(graph, weights, n, level_bound + 1, scan_limit)
    return max(inside, tail)


def operator_norm_upper(graph: ShiftGraph, weights: WeightAssignment) -> float:
    """Certified ``log2 ||T||``: ``sqrt(sup d_v)`` with the tail bound included."""
    _, hi = weights.d_bounds(graph)
    return 0.5 * float(np.log2(hi))


@dataclass
class SpectralReport:
    r_dual_estimate: float
    r_local: dict
    r_inner: float
    r_disc: float
    sphere_samples: int
    horizon: int
    r_dual_upper: float = np.nan
    r_sphere_min: float = np.nan
    seed: int = DEFAULT_SEED

    def to_dict(self) -> dict:
        return {
            "r_dual": self.r_dual_estimate,
            "r_dual_upper": self.r_dual_upper,
            "r_inner": self.r_inner,
            "r_disc": self.r_disc,
            "r_local": {str(k): v for k, v in self.r_local.items()},
            "sphere_samples": self.sphere_samples,
            "horizon": self.horizon,
            "seed": self.seed,
        }


def _local_from_gram(scale, G, coeffs, ns):
    """Tail-max local radius of ``sum c_i x_i`` for each row of ``coeffs``."""
    q = np.einsum("si,nij,sj->sn", coeffs, G[ns], coeffs.conj()).real
    log2n = 0.5 * np.log2(np.maximum(q, 0)) + scale[ns]
    return np.exp2(np.max(log2n / ns, axis=1))


def spectral_radius_estimate(graph: ShiftGraph, dual: WeightAssignment, N: int) -> float:
    """``||T'^N||**(1/N)`` from the largest length-``N`` window product."""
    level_bound = max(0, graph.depth - N)
    return float(np.exp2(operator_norm_n(graph, dual, N, level_bound) / N))


def disc_radii(graph: ShiftGraph, weights: WeightAssignment, basis: WanderingBasis, N: int,
               sphere_samples: int = 64, seed: int = DEFAULT_SEED,
               window_fraction: float = 0.5) -> SpectralReport:
    """Inner disc ``1/r(T')`` and the larger disc ``inf_x 1/r_{T'}(x)`` over ``ker T*``.

    The infimum over the unit sphere is taken over the basis vectors and
    ``sphere_samples`` seeded random unit vectors.
    """
    if basis.dim == 0:
        raise InvalidArgument("empty wandering basis")
    dual = cauchy_dual(graph, weights)
    r_dual = spectral_radius_estimate(graph, dual, N)
    r_upper = float(np.exp2(operator_norm_upper(graph, dual)))
    scale, G = orbit_gram(graph, dual, basis, N)
    ns = _window(N, window_fraction)
    d = basis.dim
    r_basis = _local_from_gram(scale, G, np.eye(d, dtype=complex), ns)
    rng = np.random.default_rng(seed)
    if sphere_samples > 0:
        c = rng.standard_normal((sphere_samples, d)) + 1j * rng.standard_normal((sphere_samples, d))
        c /= np.linalg.norm(c, axis=1, keepdims=True)
        r_sph = _local_from_gram(scale, G, c, ns)
    else:
        r_sph = np.empty(0)
    worst = max(float(r_basis.max()), float(r_sph.max()) if r_sph.size else 0.0)
    return SpectralReport(
        r_dual_estimate=r_dual,
        r_local={i: float(r) for i, r in enumerate(r_basis)},
        r_inner=1.0 / r_dual,
        r_disc=1.0 / worst,
        sphere_samples=sphere_samples,
        horizon=N,
        r_dual_upper=r_upper,
        r_sphere_min=(1.0 / float(r_sph.max())) if r_sph.size else np.nan,
        seed=seed,
    )


# -- the two sequence tests -----------------------------------------------------


@dataclass
class SeriesReport:
    M: int
    log2_terms: np.ndarray
    log2_partial_sums: np.ndarray

    @property
    def partial_sums(self) -> np.ndarray:
        return np.exp2(self.log2_partial_sums)

    @property
    def last_log2_term(self) -> float:
        return float(self.log2_terms[-1])

    def diverges_at_horizon(self, threshold: float = 1e6) -> bool:
        """Heuristic only: partial sums past ``threshold`` with non-decaying terms."""
        t = self.log2_terms
        return bool(self.log2_partial_sums[-1] > np.log2(threshold) and t[-1] >= t[len(t) // 2])


def _loop_chain(graph: ShiftGraph, root: int, length: int) -> np.ndarray:
    """Vertices on the chain hanging off the loop vertex, levels 1..length."""
    if length > graph.depth:
        raise HorizonExceeded(f"chain of length {length} needs depth >= {length}")
    out = []
    v = root
    for _ in range(length):
        kids = [u for u in graph.children(v) if u != v]
        if len(kids) != 1:
            raise InvalidArgument("the loop vertex must carry a single chain")
        v = kids[0]
        out.append(v)
    return np.array(out)


def analyticity_series(graph: ShiftGraph, dual: WeightAssignment, M: int) -> SeriesReport:
    """Partial sums of ``sum_m (lam'_1 ... lam'_{m+1}) / lam'_0**(m+1)`` for ``m = 0..M``."""
    loops = graph.loops
    if loops.size == 0 or graph.level[loops[0]] != 0:
        raise NoLoopAtRoot("the series needs a loop at the root")
    if M < 0:
        raise InvalidArgument("M must be nonnegative")
    l0 = float(np.log2(dual.lam[loops[0]]))
    if graph.branch_start and graph.branch_start[0] == 1:
        logs = _branch_log2(graph, dual, 0, 1, M + 1)
    else:
        logs = np.log2(dual.lam[_loop_chain(graph, loops[0], M + 1)])
    prods = np.cumsum(logs)
    terms = prods - np.arange(1, M + 2) * l0
    return SeriesReport(M, terms, np.logaddexp2.accumulate(terms))


@dataclass
class SequenceConditions:
    cond_i: bool
    cond_ii: bool
    lhs: float
    rhs: float
    cond_iii: bool
    margin: float


def _seq_values(lam, count):
    if callable(lam):
        vec = getattr(lam, "vectorized", None)
        ks = np.arange(1, count + 1)
        return np.asarray(vec(ks) if vec is not None else [lam(int(k)) for k in ks], dtype=float)
    return np.asarray(lam, dtype=float)[:count]


def sequence_conditions(lam: Union[Sequence[float], Callable[[int], float]], N: int,
                        margin: float = 0.05, window_fraction: float = 0.5) -> SequenceConditions:
    """Finite-horizon checks of the three conditions on a weight sequence.

    ``lam[0]`` is the first weight (``lambda_1``). ``lhs`` is the tail-max of
    ``(lambda_1...lambda_n)**(-1/n)`` over ``n`` in the last part of ``1..N``;
    ``rhs`` is the largest inverse window product of length ``N // 2`` among
    windows starting at ``m <= N``, to the power ``2 / N``.
    """
    if N < 64:
        raise InvalidArgument("N must be at least 64")
    n_win = N // 2
    vals = _seq_values(lam, N + n_win)
    if vals.size < N:
        raise HorizonExceeded(f"sequence has {vals.size} terms, {N} needed")
    head = vals[:N]
    cond_i = bool(np.all(head <= 1.0))
    cond_ii = bool(np.all(head > 0.0))
    nl = -np.log2(vals)
    csum = np.concatenate([[0.0], np.cumsum(nl)])
    ns = _window(N, window_fraction)
    lhs = float(np.exp2(np.max(csum[ns] / ns)))
    last_start = min(N, vals.size - n_win)
    m = np.arange(0, last_start + 1)
    rhs = float(np.exp2(np.max(csum[m + n_win] - csum[m]) / n_win))
    return SequenceConditions(cond_i, cond_ii, lhs, rhs, lhs < rhs - margin, margin)
