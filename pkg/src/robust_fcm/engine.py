"""Alternating IRLS updates shared by every clustering variant.

One loop covers Euclidean and kernel-induced distances, the two spatial
penalties and all seven robust weights. Matrices are laid out C x N
(clusters by samples) throughout.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy import sparse

from . import kernels, spatial
from .core import (
    ClusterState,
    Dataset,
    DimensionMismatch,
    KernelKind,
    ModelConfig,
    NumericalUnderflow,
    PenaltyVariant,
    RunResult,
    validate_config,
)
from .weights import rho, weight

log = logging.getLogger(__name__)

ZERO_DISTANCE = 1e-12
DEGENERATE_DENOMINATOR = 1e-12
UNDERFLOW = 1e-300


@dataclass(frozen=True)
class DistanceTable:
    d2: np.ndarray  # C x N squared distances, clamped at 0
    zero: np.ndarray  # C x N bool, distance treated as exactly 0

    @property
    def zero_sets(self) -> list[np.ndarray]:
        return [np.flatnonzero(col) for col in self.zero.T]


class Objective(NamedTuple):
    total: float
    q: float  # weighted distortion without the penalty
    penalty: float
    rho_form: float  # sum of rho(R_kn), diagnostics only


def compute_distances(data, centroids, kernel: KernelKind) -> DistanceTable:
    X = data.samples if isinstance(data, Dataset) else np.asarray(data, dtype=float)
    V = np.atleast_2d(np.asarray(centroids, dtype=float))
    if V.shape[1] != X.shape[1]:
        raise DimensionMismatch(f"centroids have {V.shape[1]} columns, data has {X.shape[1]}")
    d2 = kernels.kernel_distance_matrix(kernel, V, X)
    return DistanceTable(d2=d2, zero=d2 <= ZERO_DISTANCE)


def neighbor_adjacency(data: Dataset, penalty: PenaltyVariant) -> Optional[sparse.csr_matrix]:
    if not penalty.active:
        return None
    return spatial.adjacency(penalty.topology, data.n_samples, data.grid)


def penalty_matrix(penalty: PenaltyVariant, gamma: float, U, m: float, adj) -> np.ndarray:
    """Penalty added to each squared distance inside the membership bracket.

    S-I: ``gamma * sum_{j in N_n} sum_{l != k} u_jl^m``.
    S-II: ``gamma / N_R * sum_{j in N_n} (1 - u_kj)^m``.
    Zero everywhere when the penalty is off.
    """
    U = np.asarray(U, dtype=float)
    if not penalty.active:
        return np.zeros_like(U)
    if penalty.name == "SI":
        # neighbor sums of u^m per cluster, then drop the own-cluster part
        nb = np.asarray(adj @ (U**m).T).T
        return gamma * (nb.sum(axis=0, keepdims=True) - nb)
    nb = np.asarray(adj @ ((1.0 - U) ** m).T).T
    return gamma / spatial.normalizer(penalty.topology) * nb


def penalty_term(penalty: PenaltyVariant, gamma: float, U, m: float, k: int, n: int, shape=None) -> float:
    """Scalar penalty for cluster ``k`` at sample ``n`` (same value as :func:`penalty_matrix`)."""
    if not penalty.active:
        return 0.0
    U = np.asarray(U, dtype=float)
    nbrs = spatial.neighbors(penalty.topology, n, shape=shape, n_samples=U.shape[1])
    if penalty.name == "SI":
        total = sum(U[l, j] ** m for j in nbrs for l in range(U.shape[0]) if l != k)
        return gamma * total
    total = sum((1.0 - U[k, j]) ** m for j in nbrs)
    return gamma / spatial.normalizer(penalty.topology) * total


def update_centroids(U, W, data, m: float, kernel: KernelKind, previous=None):
    """New centroids and the number of degenerate (left unchanged) rows.

    Kernel forms evaluate ``K(x_n, v_k)`` at ``previous`` (one fixed-point
    substitution). Without ``previous`` the Euclidean weighted mean is
    used as the expansion point.
    """
    X = data.samples if isinstance(data, Dataset) else np.asarray(data, dtype=float)
    a = np.asarray(W) * np.asarray(U) ** m
    num, den = a @ X, a.sum(axis=1)
    if previous is None:
        # no earlier iterate: degenerate rows fall back to the data mean
        fallback = np.broadcast_to(X.mean(axis=0), num.shape)
        V0, _ = _safe_divide(num, den, fallback)
    else:
        V0 = np.asarray(previous, dtype=float)
    if kernel.is_euclidean:
        return _finalize(num, den, V0)
    if kernel.name == "RBF":
        g = kernels.kernel_matrix(kernel, V0, X)
        return _finalize((a * g) @ X, (a * g).sum(axis=1), V0)
    if kernel.name == "Poly":
        p = int(kernel.degree)
        # K^((p-1)/p) written as base^(p-1), the exact stationary condition
        gx = (kernel.beta * (V0 @ X.T) + kernel.theta) ** (p - 1)
        gv = (kernel.beta * np.einsum("ij,ij->i", V0, V0) + kernel.theta) ** (p - 1)
        return _finalize((a * gx) @ X, a.sum(axis=1) * gv, V0)
    if kernel.name == "Tanh":
        gx = 1.0 - kernels.kernel_matrix(kernel, V0, X) ** 2
        gv = 1.0 - kernels.kernel_diag(kernel, V0) ** 2
        return _finalize((a * gx) @ X, a.sum(axis=1) * gv, V0)
    raise ValueError(kernel.name)  # pragma: no cover


def _safe_divide(num, den, fallback):
    bad = np.abs(den) < DEGENERATE_DENOMINATOR
    safe = np.where(bad, 1.0, den)
    V = num / safe[:, None]
    if fallback is not None:
        V[bad] = np.asarray(fallback, dtype=float)[bad]
    return V, bad


def _finalize(num, den, fallback):
    V, bad = _safe_divide(num, den, fallback)
    nbad = int(bad.sum())
    if nbad:
        log.warning("degenerate centroid denominator for clusters %s; kept previous value", np.flatnonzero(bad).tolist())
    return V, nbad


def update_memberships(distances: DistanceTable, W, penalty=None, m: float = 2.0) -> np.ndarray:
    """Closed-form membership update.

    ``u_kn`` is proportional to ``[w_kn (d2_kn + penalty_kn)]^(-1/(m-1))``;
    when some distances vanish the sample's mass is split uniformly over
    those clusters and every other entry is exactly 0.
    """
    d2 = distances.d2
    pen = 0.0 if penalty is None else penalty
    B = np.asarray(W) * (d2 + pen)
    zero = distances.zero
    has_zero = zero.any(axis=0)
    regular = ~has_zero
    if np.any(np.all(B[:, regular] < UNDERFLOW, axis=0)):
        raise NumericalUnderflow("all membership brackets underflowed for some sample")
    B = np.maximum(B, UNDERFLOW)
    with np.errstate(over="ignore"):
        # an overflowing ratio maps to a membership of exactly 0
        ratio = (B / B.min(axis=0, keepdims=True)) ** (-1.0 / (m - 1.0))
    U = ratio / ratio.sum(axis=0, keepdims=True)
    if has_zero.any():
        z = zero[:, has_zero].astype(float)
        U[:, has_zero] = z / z.sum(axis=0, keepdims=True)
    return U


def update_irls_weights(U, distances, m: float, kind) -> np.ndarray:
    d2 = distances.d2 if isinstance(distances, DistanceTable) else np.asarray(distances)
    R = np.asarray(U) ** (m / 2.0) * np.sqrt(d2)
    return np.asarray(weight(kind, R), dtype=float)


def objective(U, V, W, data, config: ModelConfig, distances: Optional[DistanceTable] = None, adj=None) -> Objective:
    """Penalized objective of the current state, with its parts."""
    X = data.samples if isinstance(data, Dataset) else np.asarray(data, dtype=float)
    if distances is None:
        distances = compute_distances(X, V, config.kernel)
    U = np.asarray(U, dtype=float)
    a = np.asarray(W) * U**config.m
    q = float(np.sum(a * distances.d2))
    pen = 0.0
    if config.penalty.active and config.gamma != 0:
        if adj is None:
            adj = neighbor_adjacency(data, config.penalty)
        P = penalty_matrix(config.penalty, config.gamma, U, config.m, adj)
        scale = 0.5 if config.penalty.name == "SI" else 1.0
        pen = float(scale * np.sum(a * P))
    R = U ** (config.m / 2.0) * np.sqrt(distances.d2)
    rho_form = float(np.sum(rho(config.weight, R)))
    return Objective(q + pen, q, pen, rho_form)


def random_memberships(n_clusters: int, n_samples: int, rng) -> np.ndarray:
    U = rng.uniform(size=(n_clusters, n_samples))
    return U / U.sum(axis=0, keepdims=True)


def run(data: Dataset, config: ModelConfig, init_centroids=None, init_memberships=None, keep_trace: bool = False) -> RunResult:
    """Iterate centroid, distance, membership and weight updates to convergence.

    Stops when the elementwise max change in memberships drops below
    ``config.epsilon`` or after ``config.max_iter`` iterations. With
    ``init_centroids`` the first iteration starts from a membership update.
    """
    validate_config(config, data)
    X = data.samples
    C, N = config.n_clusters, data.n_samples
    m = config.m
    rng = np.random.default_rng(config.seed)
    adj = neighbor_adjacency(data, config.penalty)
    trace = [] if keep_trace else None
    objective_trace = []
    degenerate = 0

    if init_memberships is not None:
        U = np.array(init_memberships, dtype=float)
        if U.shape != (C, N):
            raise DimensionMismatch(f"initial memberships must be {C} x {N}")
    else:
        U = random_memberships(C, N, rng)
    W = rng.uniform(size=(C, N)) if config.random_initial_weights else np.ones((C, N))

    V = None
    it = 0
    converged = False
    if init_centroids is not None:
        V = np.array(init_centroids, dtype=float).reshape(C, -1)
        D = compute_distances(X, V, config.kernel)
        U = update_memberships(D, W, None, m)
        W = update_irls_weights(U, D, m, config.weight)
        it = 1
        objective_trace.append(objective(U, V, W, data, config, D, adj).total)
        if keep_trace:
            trace.append(U.copy())

    for it in range(it + 1, config.max_iter + 1):
        V, nbad = update_centroids(U, W, X, m, config.kernel, V)
        degenerate += nbad
        D = compute_distances(X, V, config.kernel)
        pen = penalty_matrix(config.penalty, config.gamma, U, m, adj) if config.penalty.active else None
        U_new = update_memberships(D, W, pen, m)
        W = update_irls_weights(U_new, D, m, config.weight)
        delta = float(np.max(np.abs(U_new - U)))
        U = U_new
        objective_trace.append(objective(U, V, W, data, config, D, adj).total)
        if keep_trace:
            trace.append(U.copy())
        if delta < config.epsilon:
            converged = True
            break

    state = ClusterState(memberships=U, centroids=V, irls_weights=W, iteration=it, objective_trace=objective_trace)
    return RunResult(
        final_state=state,
        converged=converged,
        iterations_used=it,
        hard_labels=np.argmax(U, axis=0),
        config_echo=config,
        seed_echo=config.seed,
        membership_trace=trace,
        degenerate_centroid_events=degenerate,
    )


def run_restarts(data: Dataset, config: ModelConfig, restarts: int, score=None, **kwargs) -> tuple[RunResult, list[RunResult]]:
    """Run with seeds ``config.seed, config.seed + 1, ...`` and pick the best.

    ``score(result)`` is maximized when given; otherwise the lowest final
    objective wins.
    """
    results = [run(data, config.with_(seed=config.seed + r), **kwargs) for r in range(restarts)]
    if score is None:
        best = min(results, key=lambda r: r.final_state.objective_trace[-1])
    else:
        best = max(results, key=score)
    return best, results
