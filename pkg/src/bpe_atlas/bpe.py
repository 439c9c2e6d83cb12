"""Bounded point evaluations: the finite-section norms ``B_n(w)`` and friends.

``B_n(w) = || P_{M_n} S_n(w) restricted to ker T* ||`` where
``M_n = span{T^k x : k <= n, x in ker T*}`` and ``S_n(w) = sum_{k<=n} conj(w)^k T'^k``.
``w`` is a bounded point evaluation exactly when ``sup_n B_n(w)`` is finite.

Two facts keep this cheap and stable:

* ``<T'^k x, y> = 0`` whenever ``y`` lies in ``M_{k-1}`` (``T* T' = I``), so if
  ``M_n`` is built block by block, the coordinates of ``S_n(w) x`` on block ``j``
  only involve ``k <= j`` and never change once ``n >= j``. Hence ``B_n`` is a
  running maximum over growing row sets and is nondecreasing by construction.
* ``M_n = M_{n-1} + T(newest block of M_{n-1})``, a block Arnoldi recurrence.
  Orthonormalizing ``T q`` for unit ``q`` is well conditioned, unlike the raw
  orbit vectors ``T^k x``, whose new directions can be ``2**-170`` of their norm.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from .errors import DivergentSeries, HorizonExceeded, InvalidArgument
from .graph_model import ShiftGraph, WeightAssignment
from .operator_core import (
    RANK_TOL,
    DualWeights,
    HilbertVector,
    WanderingBasis,
    cauchy_dual,
    orthonormalize,
    orthonormalize_columns,
    shift_amplitudes,
)
from .spectral import _renormalize, orbit_matrix, operator_norm_upper

BOUNDED, UNBOUNDED, INCONCLUSIVE = "BOUNDED", "UNBOUNDED", "INCONCLUSIVE"


def _need_depth(graph, basis, n, what):
    need = n + basis.max_level(graph) + 1
    if graph.depth < need:
        raise HorizonExceeded(f"{what} needs depth >= {need}, graph has {graph.depth}")


@dataclass(eq=False)
class ModuliBasis:
    """Orthonormal basis of ``M_n``; column ``r`` was added at step ``block[r]``."""

    n: int
    Q: np.ndarray
    block: np.ndarray
    dropped: int = 0

    @property
    def rank(self) -> int:
        return self.Q.shape[1]

    @property
    def onb(self) -> list:
        return [HilbertVector(self.Q[:, r]) for r in range(self.rank)]

    def rank_at(self, n: int) -> int:
        return int(np.count_nonzero(self.block <= n))

    def truncate(self, n: int) -> "ModuliBasis":
        r = self.rank_at(n)
        return ModuliBasis(n, self.Q[:, :r], self.block[:r], self.dropped)


def moduli_basis(graph: ShiftGraph, weights: WeightAssignment, basis: WanderingBasis, n: int,
                 previous: Optional[ModuliBasis] = None, tol: float = RANK_TOL) -> ModuliBasis:
    """ONB of ``M_n``, optionally extending an earlier ``ModuliBasis``."""
    if n < 0:
        raise InvalidArgument("n must be nonnegative")
    _need_depth(graph, basis, n, "moduli_basis")
    if previous is None:
        Q, dropped = orthonormalize_columns(np.zeros((graph.n_vertices, 0), complex),
                                            basis.matrix(), tol)
        block = np.zeros(Q.shape[1], dtype=np.int64)
        start = 0
    else:
        if previous.n > n:
            return previous.truncate(n)
        Q, block, dropped, start = previous.Q, previous.block, previous.dropped, previous.n
    for j in range(start + 1, n + 1):
        newest = Q[:, block == j - 1]
        if newest.shape[1] == 0:
            break
        cand = shift_amplitudes(graph, weights.lam, newest)
        cols, dr = orthonormalize_columns(Q, cand, tol)
        dropped += dr
        Q = np.hstack([Q, cols])
        block = np.concatenate([block, np.full(cols.shape[1], j, dtype=np.int64)])
    return ModuliBasis(n, Q, block, dropped)


def s_n_apply(graph: ShiftGraph, dual: WeightAssignment, w: complex, x: HilbertVector,
              n: int) -> HilbertVector:
    """``sum_{k<=n} conj(w)**k T'^k x`` with per-term exponents."""
    top = graph.max_level(x.amplitudes != 0)
    if graph.depth < n + top + 1:
        raise HorizonExceeded(f"s_n_apply needs depth >= {n + top + 1}")
    return _series(graph, dual, x.amplitudes[:, None], w, n)[0][0]


def _series(graph, dual, X, w, N):
    """Columns ``sum_{k<=N} conj(w)**k T'^k X[:, i]`` as HilbertVectors, plus
    the last term's log2 size per column."""
    w = complex(w)
    lw = math.log2(abs(w)) if w != 0 else -math.inf
    ph = np.conj(w) / abs(w) if w != 0 else 0.0
    acc = None
    F = -math.inf
    last = None
    for k, A, s in orbit_matrix(graph, dual, X, N):
        if k > 0 and w == 0:
            break
        e = s + k * lw if k else s
        term = A * (ph ** k if k else 1.0)
        if acc is None:
            acc, F = term, e
        elif e > F:
            acc = acc * np.exp2(F - e) + term
            F = e
        else:
            acc = acc + term * np.exp2(e - F)
        last = e + np.log2(np.linalg.norm(A, axis=0) + 0.0)
        acc, shift = _renormalize(acc)
        F += shift
    if w == 0:
        last = np.full(X.shape[1], -np.inf)
    vecs = [HilbertVector(acc[:, i], F) for i in range(X.shape[1])]
    return vecs, last


class BpeEngine:
    """Precomputed data for evaluating ``B_n(w)``, ``n = 0..N``, at many points.

    ``G[r, k, i] = <T'^k x_i, q_r> * 2**-s[k]`` for the moduli ONB ``q_r``;
    entries with ``k > block[r]`` are exactly zero.
    """

    def __init__(self, graph: ShiftGraph, weights: WeightAssignment, N: int,
                 basis: Optional[WanderingBasis] = None, dual: Optional[DualWeights] = None,
                 moduli: Optional[ModuliBasis] = None):
        from .operator_core import wandering_basis

        if N < 0:
            raise InvalidArgument("N must be nonnegative")
        self.graph, self.weights, self.N = graph, weights, N
        self.basis = basis if basis is not None else wandering_basis(graph, weights)
        self.dual = dual if dual is not None else cauchy_dual(graph, weights)
        _need_depth(graph, self.basis, N, "B_n")
        self.moduli = moduli if moduli is not None and moduli.n >= N else \
            moduli_basis(graph, weights, self.basis, N)
        if self.moduli.n > N:
            self.moduli = self.moduli.truncate(N)
        self._build()

    def _build(self):
        graph, Q, block, N = self.graph, self.moduli.Q, self.moduli.block, self.N
        d = self.basis.dim
        rank = Q.shape[1]
        # vertices are ordered by level: the support of T'^k x is a prefix
        top0 = self.basis.max_level(graph)
        prefix = np.searchsorted(graph.level, np.arange(N + 2) + top0, side="right")
        first_row = np.searchsorted(block, np.arange(N + 1), side="left")
        G = np.zeros((rank, N + 1, d), dtype=complex)
        s = np.empty(N + 1)
        Qh = Q.conj().T
        for k, A, sk in orbit_matrix(graph, self.dual, self.basis.matrix(), N):
            s[k] = sk
            p = prefix[k]
            r0 = first_row[k]
            G[r0:, k, :] = Qh[r0:, :p] @ A[:p]
        self.G, self.s = G, s
        counts = np.bincount(block, minlength=N + 1)
        starts = np.concatenate([[0], np.cumsum(counts)])
        # per block j: rows of block j, orbit index k <= j, flattened (k, row*d)
        self._blocks = []
        for j in range(N + 1):
            R = G[starts[j]:starts[j + 1], : j + 1, :]
            self._blocks.append(np.ascontiguousarray(R.transpose(1, 0, 2)).reshape(j + 1, -1))

    def _scaled(self, ws):
        """``B_n(w) = sqrt(lam) * 2**E`` with integer ``E``; returns ``(E, lam)``.

        Integer exponents keep every rescaling exact, so the only rounding is
        in the powers of ``|w|``, the orbit data and the final eigenvalue.
        """
        ws = np.atleast_1d(np.asarray(ws, dtype=complex))
        N, d = self.N, self.basis.dim
        P = ws.size
        absw = np.abs(ws)
        zero = absw == 0
        mant, ex = _abs_powers(np.where(zero, 1.0, absw), N)
        mant[zero, 1:] = 0.0
        u = np.where(zero, 1.0, np.conj(ws) / np.where(zero, 1.0, absw))
        phase = np.ones((P, N + 1), dtype=complex)
        if N:
            phase[:, 1:] = np.cumprod(np.repeat(u[:, None], N, axis=1), axis=1)
            phase /= np.abs(phase)  # stop the modulus drifting with k
        ex = ex + self.s.astype(np.int64)[None, :]
        # mant is in [0.5, 1), so 2**ex bounds each term from above
        E = np.maximum.accumulate(np.where(mant > 0, ex, np.iinfo(np.int64).min // 2), axis=1)
        Mhat = np.zeros((P, d, d), dtype=complex)
        out_M = np.empty((P, N + 1, d, d), dtype=complex)
        prevE = E[:, 0]
        for j in range(N + 1):
            Ej = E[:, j]
            Mhat *= np.ldexp(1.0, 2 * (prevE - Ej))[:, None, None]
            R = self._blocks[j]
            if R.shape[1]:
                coef = np.ldexp(mant[:, : j + 1], ex[:, : j + 1] - Ej[:, None]) * phase[:, : j + 1]
                C = (coef @ R).reshape(P, -1, d)
                Mhat += np.einsum("pri,prl->pil", C.conj(), C)
            out_M[:, j] = Mhat
            prevE = Ej
        if d == 1:
            lam = out_M[..., 0, 0].real
        else:
            lam = np.linalg.eigvalsh(out_M)[..., -1]
        return E, np.maximum(lam, 0.0)

    def log2_b(self, ws) -> np.ndarray:
        """``log2 B_n(w)`` for each ``w`` in ``ws`` and ``n = 0..N``; shape (P, N+1)."""
        E, lam = self._scaled(ws)
        with np.errstate(divide="ignore"):
            return E + 0.5 * np.log2(lam)

    def b_values(self, ws) -> np.ndarray:
        """``B_n(w)`` in plain floating point; inf past ``2**1024``."""
        E, lam = self._scaled(ws)
        with np.errstate(over="ignore"):
            return np.ldexp(np.sqrt(lam), E)


def _abs_powers(a, K, chunk=256):
    """``a**k = mant * 2**ex`` for ``k = 0..K`` and each ``a > 0``; mant in [0.5, 1).

    Powers of the mantissa are taken in chunks short enough not to underflow,
    which keeps the error at a few ulps instead of growing with ``k log2 a``.
    """
    a = np.asarray(a, dtype=float)
    m, p = np.frexp(a)
    k = np.arange(K + 1)
    q, r = np.divmod(k, chunk)
    lo = m[:, None] ** r[None, :]
    hm, he = np.frexp(m ** chunk)
    HM = np.ones((a.size, q[-1] + 1))
    HE = np.zeros((a.size, q[-1] + 1), dtype=np.int64)
    for i in range(1, q[-1] + 1):
        tm, te = np.frexp(HM[:, i - 1] * hm)
        HM[:, i], HE[:, i] = tm, HE[:, i - 1] + he + te
    fm, fe = np.frexp(lo * HM[:, q])
    return fm, fe + HE[:, q] + k[None, :] * p[:, None].astype(np.int64)


def b_n(graph: ShiftGraph, weights: WeightAssignment, dual: Optional[DualWeights],
        basis: Optional[WanderingBasis], w: complex, N: int) -> np.ndarray:
    """``[B_0(w), ..., B_N(w)]``; entries overflow to inf only past ``2**1024``."""
    eng = BpeEngine(graph, weights, N, basis=basis, dual=dual)
    return eng.b_values([w])[0]


# -- classification -------------------------------------------------------------


@dataclass
class BpeSample:
    w: complex
    log2_B: np.ndarray
    slope: float
    classification: str

    @property
    def B(self) -> np.ndarray:
        return np.exp2(self.log2_B)

    @property
    def B_N(self) -> float:
        return float(np.exp2(self.log2_B[-1]))


def classify_log2(log2_B, tail_fraction: float = 0.5, slope_threshold: float = 1e-3,
                  cap: float = 1e12):
    """Least-squares slope of ``log2 B_n`` over the tail window, and the verdict."""
    log2_B = np.asarray(log2_B, dtype=float)
    N = log2_B.size - 1
    if N < 32:
        raise InvalidArgument("need at least 33 values of B_n")
    if not 0 < tail_fraction <= 1:
        raise InvalidArgument("tail_fraction must be in (0, 1]")
    lo = min(N - 1, int(math.floor((1 - tail_fraction) * N)))
    n = np.arange(lo, N + 1)
    slope = float(np.polyfit(n, log2_B[lo:], 1)[0])
    if slope > slope_threshold:
        cls = UNBOUNDED
    elif slope < slope_threshold / 4 and log2_B[-1] < math.log2(cap):
        cls = BOUNDED
    else:
        cls = INCONCLUSIVE
    return slope, cls


def classify_point(B, tail_fraction: float = 0.5, slope_threshold: float = 1e-3,
                   cap: float = 1e12):
    """Same as :func:`classify_log2` on plain ``B_n`` values."""
    with np.errstate(divide="ignore"):
        return classify_log2(np.log2(np.asarray(B, dtype=float)), tail_fraction,
                             slope_threshold, cap)


@dataclass(frozen=True)
class GridSpec:
    """Polar (``radii`` x ``rays``) or Cartesian (``xs`` x ``ys``) sample points."""

    kind: str = "polar"
    radii: tuple = ()
    rays: int = 64
    xs: tuple = ()
    ys: tuple = ()

    def __post_init__(self):
        if self.kind not in ("polar", "cartesian"):
            raise InvalidArgument(f"unknown grid kind {self.kind!r}")

    @classmethod
    def default_polar(cls, r_dual: float, rays: int = 64, step: float = 0.01):
        n = int(math.floor(1.5 * r_dual / step + 1e-9))
        return cls("polar", tuple(round(i * step, 12) for i in range(n + 1)), rays)

    @property
    def shape(self) -> tuple:
        """(rows, cols) of the heatmap: rays x radii, or ys x xs."""
        if self.kind == "polar":
            return (self.rays, len(self.radii))
        return (len(self.ys), len(self.xs))

    def points(self) -> np.ndarray:
        rows, cols = self.shape
        if rows * cols == 0:
            raise InvalidArgument("empty grid")
        if self.kind == "polar":
            theta = 2 * np.pi * np.arange(self.rays) / self.rays
            r = np.asarray(self.radii, dtype=float)
            return (r[None, :] * np.exp(1j * theta)[:, None]).ravel()
        x = np.asarray(self.xs, dtype=float)
        y = np.asarray(self.ys, dtype=float)
        return (x[None, :] + 1j * y[:, None]).ravel()


@dataclass(frozen=True)
class Thresholds:
    tail_fraction: float = 0.5
    slope_threshold: float = 1e-3
    cap: float = 1e12

    def __post_init__(self):
        if not (self.tail_fraction > 0 and self.slope_threshold > 0 and self.cap > 0):
            raise InvalidArgument("thresholds must be positive")


@dataclass
class RegionScan:
    grid: GridSpec
    samples: list
    N: int
    radii: object = None
    dropped: int = 0
    cap: float = 1e12

    def classes(self) -> np.ndarray:
        return np.array([s.classification for s in self.samples])

    def log2_BN(self) -> np.ndarray:
        return np.array([s.log2_B[-1] for s in self.samples])


def _threads() -> int:
    env = os.environ.get("BPE_ATLAS_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def scan_region(graph: ShiftGraph, weights: WeightAssignment, grid: GridSpec, N: int,
                thresholds: Thresholds = Thresholds(), engine: Optional[BpeEngine] = None,
                radii=None, batch: Optional[int] = None) -> RegionScan:
    """One :class:`BpeSample` per grid point, sharing a single moduli basis."""
    pts = grid.points()
    eng = engine if engine is not None and engine.N == N else BpeEngine(graph, weights, N)
    if batch is None:
        batch = max(1, min(256, 4_000_000 // ((N + 1) * max(1, eng.G.shape[0] // (N + 1) + 1))))
    chunks = [pts[i:i + batch] for i in range(0, pts.size, batch)]
    workers = min(_threads(), len(chunks))
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            logs = list(ex.map(eng.log2_b, chunks))
    else:
        logs = [eng.log2_b(c) for c in chunks]
    samples = []
    for chunk, L in zip(chunks, logs):
        for w, row in zip(chunk, L):
            slope, cls = classify_log2(row, thresholds.tail_fraction,
                                       thresholds.slope_threshold, thresholds.cap)
            samples.append(BpeSample(complex(w), row, slope, cls))
    return RegionScan(grid, samples, N, radii, eng.moduli.dropped, thresholds.cap)


# -- evaluation maps and the kernel --------------------------------------------


@dataclass
class EvaluationData:
    w: complex
    coeff_vectors: list
    gram: np.ndarray
    tail_bound: float
    certified: bool = True

    def evaluation_norm(self) -> float:
        """``||E_w^*||`` on ``ker T*`` from the truncated series."""
        return float(math.sqrt(max(np.linalg.eigvalsh(self.gram)[-1], 0.0)))


def _tail_bound(graph, dual, basis, w, N, last_log2, strict):
    """Bound on ``||sum_{n>N} conj(w)^n T'^n x_i||`` by geometric domination."""
    aw = abs(w)
    if aw == 0:
        return 0.0, True
    rho = 2.0 ** operator_norm_upper(graph, dual)
    q = aw * rho
    if q < 1:
        return float(np.exp2(float(np.max(last_log2))) * q / (1 - q)), True
    # heuristic: ||T'^m x|| <= r_loc**m with r_loc the tail-max local radius estimate
    from .spectral import orbit_gram
    scale, G = orbit_gram(graph, dual, basis, N)
    ns = np.arange(max(1, N // 2), N + 1)
    diag = np.log2(np.maximum(np.einsum("nii->ni", G[ns]).real, 1e-300)) / 2 + scale[ns, None]
    rloc = float(np.exp2(np.max(diag / ns[:, None])))
    q = aw * rloc
    if not q < 1:
        if strict:
            raise DivergentSeries(f"|w| = {aw} is outside the series convergence estimate")
        warnings.warn(f"series for w={w} may diverge; tail bound set to inf", RuntimeWarning)
        return math.inf, False
    return float(np.exp2((N + 1) * math.log2(q)) / (1 - q)), False


def evaluation_data(graph: ShiftGraph, dual: DualWeights, basis: WanderingBasis, w: complex,
                    N: int, strict: bool = False) -> EvaluationData:
    """Truncated ``E_w^* x_i = sum_{n<=N} conj(w)^n T'^n x_i`` and its Gram matrix."""
    _need_depth(graph, basis, N, "evaluation_data")
    vecs, last = _series(graph, dual, basis.matrix(), w, N)
    tail, cert = _tail_bound(graph, dual, basis, w, N, last, strict)
    A = np.column_stack([v.amplitudes for v in vecs])
    F = vecs[0].log2_scale
    gram = (A.conj().T @ A) * np.exp2(2 * F)
    return EvaluationData(complex(w), vecs, gram, tail, cert)


def kernel_gram(graph: ShiftGraph, dual: DualWeights, basis: WanderingBasis, z: complex,
                w: complex, N: int, strict: bool = False) -> np.ndarray:
    """``kappa(z, w)[i, j] = <E_w^* x_j, E_z^* x_i>`` truncated at ``N``."""
    _need_depth(graph, basis, N, "kernel_gram")
    vz, lz = _series(graph, dual, basis.matrix(), z, N)
    vw, lw_ = _series(graph, dual, basis.matrix(), w, N)
    if strict:
        _tail_bound(graph, dual, basis, z, N, lz, True)
        _tail_bound(graph, dual, basis, w, N, lw_, True)
    Az = np.column_stack([v.amplitudes for v in vz])
    Aw = np.column_stack([v.amplitudes for v in vw])
    return (Az.conj().T @ Aw) * np.exp2(vz[0].log2_scale + vw[0].log2_scale)


# -- eigenvectors of the adjoint -------------------------------------------------


@dataclass
class AdjointEigenbasis:
    """Approximate basis of ``ker(T* - conj(w))`` from a free-boundary truncation.

    ``tail_mass`` is the share of each unit vector on the last two levels;
    ``tail_ratio`` compares that mass with the mass on the first two levels and
    decides acceptance (vectors with non-decaying coefficients are rejected).
    """

    w: complex
    vectors: list
    tail_mass: np.ndarray
    tail_ratio: np.ndarray
    depth: int
    threshold: float = 0.1
    residual: np.ndarray = field(default_factory=lambda: np.empty(0))

    @property
    def accepted(self) -> np.ndarray:
        return self.tail_ratio <= self.threshold

    def accepted_vectors(self) -> list:
        return [v for v, ok in zip(self.vectors, self.accepted) if ok]


def truncated_adjoint(graph: ShiftGraph, weights: WeightAssignment, w: complex, depth: int):
    """Dense ``T* - conj(w)`` with rows for levels ``< depth`` and columns for levels ``<= depth``."""
    ncol = int(np.searchsorted(graph.level, depth, side="right"))
    nrow = int(np.searchsorted(graph.level, depth - 1, side="right"))
    A = np.zeros((nrow, ncol), dtype=complex)
    u = np.arange(ncol)
    p = graph.parent[:ncol]
    has = p >= 0
    np.add.at(A, (p[has], u[has]), weights.lam[:ncol][has])
    A[np.arange(nrow), np.arange(nrow)] -= np.conj(w)
    return A


def adjoint_eigenbasis(graph: ShiftGraph, weights: WeightAssignment, w: complex,
                       depth: Optional[int] = None, null_tol: float = 1e-10,
                       threshold: float = 0.1) -> AdjointEigenbasis:
    if depth is None:
        depth = min(graph.depth, 96)
    if depth < 8:
        raise InvalidArgument("depth must be at least 8")
    if depth > graph.depth:
        raise HorizonExceeded(f"depth {depth} exceeds materialized depth {graph.depth}")
    A = truncated_adjoint(graph, weights, w, depth)
    Nsp = scipy.linalg.null_space(A, rcond=null_tol)
    ncol = A.shape[1]
    lv = graph.level[:ncol]
    tail = (lv >= depth - 1).astype(float)
    head = (lv <= 1).astype(float)
    if Nsp.shape[1] == 0:
        return AdjointEigenbasis(complex(w), [], np.empty(0), np.empty(0), depth, threshold)
    Tm = Nsp.conj().T @ (tail[:, None] * Nsp)
    Hm = Nsp.conj().T @ (head[:, None] * Nsp)
    try:
        vals, U = scipy.linalg.eigh(Tm, Hm)
    except (np.linalg.LinAlgError, ValueError):
        vals, U = np.linalg.eigh(Tm)
    V = Nsp @ U
    V /= np.linalg.norm(V, axis=0, keepdims=True)
    mass = np.abs(V) ** 2
    tmass = (tail @ mass)
    hmass = (head @ mass)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(hmass > 0, tmass / hmass, np.inf)
    resid = np.linalg.norm(A @ V, axis=0)
    vecs = []
    for j in range(V.shape[1]):
        a = np.zeros(graph.n_vertices, dtype=complex)
        a[:ncol] = V[:, j]
        vecs.append(HilbertVector(a))
    return AdjointEigenbasis(complex(w), vecs, tmass, ratio, depth, threshold, resid)


@dataclass
class GramTest:
    """Outcome of the dual-family test on ``ker T*`` versus ``ker(T* - conj(w))``."""

    sigma_min: float
    eigen_dim: int
    kernel_dim: int
    dual_family: list

    @property
    def dimension_mismatch(self) -> bool:
        return self.eigen_dim != self.kernel_dim

    def certifies_bpe(self, tol: float = 1e-8) -> bool:
        return not self.dimension_mismatch and self.sigma_min > tol

    def __float__(self):
        return self.sigma_min


def gram_test(basis: WanderingBasis, eigen: AdjointEigenbasis, accepted_only: bool = True,
              tol: float = 1e-8) -> GramTest:
    """Smallest singular value of ``[<x_i, e_j>]`` for an ONB ``e_j`` of the eigenspace.

    When it is positive and the dimensions agree, a family ``y_j`` in the
    eigenspace with ``<x_i, y_j> = delta_ij`` is returned as well.
    """
    vecs = eigen.accepted_vectors() if accepted_only else eigen.vectors
    d = basis.dim
    onb, m = orthonormalize(vecs)
    if m == 0:
        return GramTest(0.0, 0, d, [])
    X = basis.matrix()
    E = np.column_stack([q.amplitudes for q in onb])
    Mx = X.T @ E.conj()  # [<x_i, e_j>]
    s = np.linalg.svd(Mx, compute_uv=False)
    sigma_min = float(s[-1]) if m >= d else 0.0
    family = []
    if m == d and sigma_min > tol:
        Acoef = np.conj(np.linalg.inv(Mx))
        Y = E @ Acoef
        family = [HilbertVector(Y[:, j]) for j in range(d)]
    return GramTest(sigma_min, m, d, family)
