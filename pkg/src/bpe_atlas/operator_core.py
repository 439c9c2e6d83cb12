"""The shift, its adjoint, the Cauchy dual and the wandering subspace.

Vectors live on the vertices of a materialized graph. Each vector carries a
separate base-2 exponent so that orbits whose norms reach ``2**(2**n)`` stay
representable; amplitudes are kept with max modulus in ``[1, 2)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import HorizonExceeded, InfiniteDimensionalKernel, NotLeftInvertible
from .graph_model import ShiftGraph, WeightAssignment, make_weights

RANK_TOL = 1e-12


@dataclass(eq=False)
class HilbertVector:
    """``2**log2_scale * amplitudes``, indexed by vertex id."""

    amplitudes: np.ndarray
    log2_scale: float = 0.0

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        self.log2_scale = float(self.log2_scale)

    @classmethod
    def basis(cls, n: int, v: int) -> "HilbertVector":
        a = np.zeros(n, dtype=complex)
        a[v] = 1.0
        return cls(a)

    @classmethod
    def from_dense(cls, values) -> "HilbertVector":
        return cls(np.asarray(values, dtype=complex)).canonical()

    def __len__(self):
        return len(self.amplitudes)

    def is_zero(self) -> bool:
        return not np.any(self.amplitudes)

    def canonical(self) -> "HilbertVector":
        """Rescale so the largest amplitude modulus lies in [1, 2)."""
        if self.is_zero():
            return HilbertVector(np.zeros_like(self.amplitudes), 0.0)
        peak = np.max(np.abs(self.amplitudes))
        e = np.frexp(peak)[1] - 1
        return HilbertVector(self.amplitudes * np.exp2(-e), self.log2_scale + e)

    def support(self) -> np.ndarray:
        return np.nonzero(self.amplitudes)[0]

    def log2_norm(self) -> float:
        if self.is_zero():
            return -np.inf
        return self.log2_scale + float(np.log2(np.linalg.norm(self.amplitudes)))

    def norm(self) -> float:
        return float(np.exp2(self.log2_norm()))

    def dense(self) -> np.ndarray:
        """Plain amplitudes; overflows to inf for astronomically large vectors."""
        return self.amplitudes * np.exp2(self.log2_scale)

    def normalized(self) -> "HilbertVector":
        a = self.amplitudes / np.linalg.norm(self.amplitudes)
        return HilbertVector(a, 0.0)

    def scaled(self, c: complex) -> "HilbertVector":
        return HilbertVector(self.amplitudes * c, self.log2_scale).canonical()

    def inner(self, other: "HilbertVector") -> complex:
        """``<self, other>``, linear in the first argument."""
        s = np.vdot(other.amplitudes, self.amplitudes)
        return complex(s * np.exp2(self.log2_scale + other.log2_scale))


def _horizon_check(graph: ShiftGraph, x: HilbertVector, what: str):
    top = graph.max_level(x.amplitudes != 0)
    if top >= graph.depth:
        raise HorizonExceeded(
            f"{what}: support reaches level {top}, materialized depth is {graph.depth}")


def shift_amplitudes(graph: ShiftGraph, lam: np.ndarray, a: np.ndarray) -> np.ndarray:
    """``(T a)_u = lam[u] * a[parent[u]]`` on raw arrays, no horizon check.

    Works column-wise on 2-d input.
    """
    out = np.zeros_like(a)
    has = graph.parent >= 0
    p = graph.parent[has]
    if a.ndim == 1:
        out[has] = lam[has] * a[p]
    else:
        out[has] = lam[has][:, None] * a[p]
    return out


def adjoint_amplitudes(graph: ShiftGraph, lam: np.ndarray, a: np.ndarray) -> np.ndarray:
    """``(T* a)_v = sum over children u of lam[u] * a[u]`` on raw arrays."""
    has = graph.parent >= 0
    p = graph.parent[has]
    n = graph.n_vertices
    contrib = lam[has] * a[has] if a.ndim == 1 else lam[has][:, None] * a[has]
    if a.ndim == 1:
        return (np.bincount(p, contrib.real, n) + 1j * np.bincount(p, contrib.imag, n))
    out = np.zeros_like(a)
    np.add.at(out, p, contrib)
    return out


def apply_shift(graph: ShiftGraph, weights: WeightAssignment, x: HilbertVector) -> HilbertVector:
    _horizon_check(graph, x, "apply_shift")
    out = shift_amplitudes(graph, weights.lam, x.amplitudes)
    return HilbertVector(out, x.log2_scale).canonical()


def apply_adjoint(graph: ShiftGraph, weights: WeightAssignment, x: HilbertVector) -> HilbertVector:
    out = adjoint_amplitudes(graph, weights.lam, x.amplitudes)
    return HilbertVector(out, x.log2_scale).canonical()


class DualWeights(WeightAssignment):
    """Weights of the Cauchy dual ``T(T*T)^-1``; itself a shift on the same graph."""


def cauchy_dual(graph: ShiftGraph, weights: WeightAssignment) -> DualWeights:
    """``lam'[u] = lam[u] / d[parent[u]]``, since ``T*T`` is diagonal with entries ``d``."""
    lo, _ = weights.d_bounds(graph)
    if not lo > 0:
        raise NotLeftInvertible("inf of d_v is zero: T*T is not invertible")
    has = graph.parent >= 0
    lam_d = np.full(graph.n_vertices, np.nan)
    lam_d[has] = weights.lam[has] / weights.fiber_norm_sq[graph.parent[has]]
    tails = tuple(r.reciprocal() if r is not None else None for r in weights.tails)
    tlo, thi = weights.tail_bounds
    bounds = (1.0 / thi, 1.0 / tlo) if np.isfinite(tlo) else (np.nan, np.nan)
    base = make_weights(graph, lam_d, tails, bounds)
    return DualWeights(base.lam, base.fiber_norm_sq, base.tails, base.tail_bounds)


@dataclass(eq=False)
class WanderingBasis:
    """Orthonormal basis of ``ker T*``: roots first, then fiber complements."""

    vectors: list

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def matrix(self) -> np.ndarray:
        """Columns are the basis vectors (all have unit scale)."""
        return np.column_stack([x.dense() for x in self.vectors])

    def max_level(self, graph: ShiftGraph) -> int:
        return max(graph.max_level(x.amplitudes != 0) for x in self.vectors)


def _fix_sign(col: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(col) > 1e-15)
    return -col if nz.size and col[nz[0]].real < 0 else col


def fiber_complement(weights_on_fiber: np.ndarray) -> np.ndarray:
    """Orthonormal columns spanning the complement of the fiber weight vector.

    Householder reflection sending the unit weight vector to a coordinate
    axis; the other ``s - 1`` columns of the reflector are the basis.
    """
    u = np.asarray(weights_on_fiber, dtype=float)
    u = u / np.linalg.norm(u)
    s = u.size
    v = u.copy()
    v[0] += np.copysign(1.0, u[0])
    H = np.eye(s) - 2.0 * np.outer(v, v) / np.dot(v, v)
    return np.column_stack([_fix_sign(H[:, j]) for j in range(1, s)])


def wandering_basis(graph: ShiftGraph, weights: WeightAssignment) -> WanderingBasis:
    n = graph.n_vertices
    sizes = graph.fiber_sizes()
    branching = np.nonzero(sizes >= 2)[0]
    if branching.size and graph.level[branching].max() >= graph.depth - 1:
        raise InfiniteDimensionalKernel("branching persists up to the materialization horizon")
    vectors = [HilbertVector.basis(n, int(r)) for r in graph.roots]
    for v in branching:
        fib = graph.children(v)
        comp = fiber_complement(weights.lam[fib])
        for j in range(comp.shape[1]):
            a = np.zeros(n, dtype=complex)
            a[fib] = comp[:, j]
            vectors.append(HilbertVector(a))
    return WanderingBasis(vectors)


def orthonormalize(vectors, tol: float = RANK_TOL):
    """Modified Gram-Schmidt with one re-orthogonalization pass.

    A vector is dropped when its residual falls below ``tol`` times its own
    norm. Returns ``(onb, rank)``; ``onb`` vectors have unit scale.
    """
    basis = []
    for x in vectors:
        if x.is_zero():
            continue
        r = x.amplitudes / np.linalg.norm(x.amplitudes)
        for _ in range(2):
            for q in basis:
                r = r - np.vdot(q, r) * q
        nr = np.linalg.norm(r)
        if nr < tol:
            continue
        basis.append(r / nr)
    return [HilbertVector(q) for q in basis], len(basis)


def orthonormalize_columns(Q: np.ndarray, cand: np.ndarray, tol: float = RANK_TOL):
    """Block version on raw arrays: orthonormalize columns of ``cand`` against ``Q`` and
    each other. Returns ``(new_columns, n_dropped)``."""
    new = []
    dropped = 0
    norms = np.linalg.norm(cand, axis=0)
    keep = norms > 0
    dropped += int(np.count_nonzero(~keep))
    R = cand[:, keep] / norms[keep]
    # classical Gram-Schmidt twice against Q (matrix products), then MGS within the block
    if Q.shape[1]:
        Qh = Q.conj().T
        for _ in range(2):
            R = R - Q @ (Qh @ R)
    for j in range(R.shape[1]):
        r = R[:, j]
        for _ in range(2):
            for q in new:
                r = r - np.vdot(q, r) * q
        nr = np.linalg.norm(r)
        if nr < tol:
            dropped += 1
            continue
        new.append(r / nr)
    if not new:
        return np.zeros((cand.shape[0], 0), dtype=complex), dropped
    return np.column_stack(new), dropped


def singular_extremes(matrix) -> tuple[float, float]:
    s = np.linalg.svd(np.atleast_2d(np.asarray(matrix)), compute_uv=False)
    return float(s[0]), float(s[-1])
