"""Kernel functions and kernel-induced squared distances.

The feature map is never formed explicitly; the distance between images of
``x`` and ``z`` is ``k(x, x) + k(z, z) - 2 k(x, z)``.
"""

from __future__ import annotations

import numpy as np

from .core import DimensionMismatch, KernelKind


class ClampCounter:
    """Counts kernel distances that came out negative before clamping."""

    def __init__(self):
        self.negative = 0
        self.evaluated = 0

    def reset(self):
        self.negative = 0
        self.evaluated = 0


clamp_counter = ClampCounter()


def _check(x, z):
    if x.shape[-1] != z.shape[-1]:
        raise DimensionMismatch(f"dimension {x.shape[-1]} vs {z.shape[-1]}")


def kernel_eval(kind: KernelKind, x, z) -> float:
    """Evaluate ``k(x, z)`` for two d-vectors."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    z = np.atleast_1d(np.asarray(z, dtype=float))
    _check(x, z)
    return float(kernel_matrix(kind, x[None, :], z[None, :])[0, 0])


def kernel_matrix(kind: KernelKind, X, Z) -> np.ndarray:
    """Gram block ``K[i, j] = k(X[i], Z[j])`` for ``X`` (n x d), ``Z`` (c x d)."""
    X = np.asarray(X, dtype=float)
    Z = np.asarray(Z, dtype=float)
    _check(X, Z)
    if kind.name == "RBF":
        return np.exp(-kind.beta * sq_euclidean(X, Z))
    dot = X @ Z.T
    if kind.name == "Linear":
        return dot
    if kind.name == "Poly":
        return (kind.beta * dot + kind.theta) ** int(kind.degree)
    if kind.name == "Tanh":
        return np.tanh(kind.beta * dot + kind.theta)
    raise ValueError(kind.name)  # pragma: no cover


def kernel_diag(kind: KernelKind, X) -> np.ndarray:
    """``k(x_i, x_i)`` for every row of ``X``."""
    X = np.asarray(X, dtype=float)
    if kind.name == "RBF":
        return np.ones(X.shape[0])
    sq = np.einsum("ij,ij->i", X, X)
    if kind.name == "Linear":
        return sq
    if kind.name == "Poly":
        return (kind.beta * sq + kind.theta) ** int(kind.degree)
    return np.tanh(kind.beta * sq + kind.theta)


def sq_euclidean(X, Z) -> np.ndarray:
    """Pairwise squared Euclidean distances, computed from differences (no cancellation)."""
    X = np.asarray(X, dtype=float)
    Z = np.asarray(Z, dtype=float)
    diff = X[:, None, :] - Z[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def kernel_distance_matrix(kind: KernelKind, X, Z, counter: ClampCounter | None = clamp_counter) -> np.ndarray:
    """Kernel-induced squared distances ``D[i, j]`` between ``X[i]`` and ``Z[j]``, clamped at 0.

    Linear is routed through the direct difference form so that it matches
    the Euclidean path to rounding.
    """
    X = np.asarray(X, dtype=float)
    Z = np.asarray(Z, dtype=float)
    _check(X, Z)
    if kind.name == "Linear":
        raw = sq_euclidean(X, Z)
    elif kind.name == "RBF":
        raw = 2.0 - 2.0 * kernel_matrix(kind, X, Z)
    else:
        raw = kernel_diag(kind, X)[:, None] + kernel_diag(kind, Z)[None, :] - 2.0 * kernel_matrix(kind, X, Z)
    if counter is not None:
        counter.evaluated += raw.size
        counter.negative += int(np.count_nonzero(raw < 0))
    return np.maximum(raw, 0.0)


def kernel_distance_sq(kind: KernelKind, x, z) -> float:
    """Kernel-induced squared distance between two d-vectors."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    z = np.atleast_1d(np.asarray(z, dtype=float))
    _check(x, z)
    return float(kernel_distance_matrix(kind, x[None, :], z[None, :])[0, 0])
