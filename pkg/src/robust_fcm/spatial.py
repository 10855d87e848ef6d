"""Neighborhoods for the spatial penalty terms."""

from __future__ import annotations

from functools import lru_cache
from typing import Optional

import numpy as np
from scipy import sparse

_NORMALIZERS = {"Sequence": 2, "Grid4": 4, "Grid8": 8}
_OFFSETS = {
    "Grid4": ((-1, 0), (1, 0), (0, -1), (0, 1)),
    "Grid8": ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)),
}


class IndexOutOfRange(IndexError):
    pass


class ShapeMissing(ValueError):
    pass


def normalizer(topology: str) -> int:
    """Fixed neighbor count N_R used by the S-II penalty (not reduced at borders)."""
    return _NORMALIZERS[topology]


def neighbors(topology: str, n: int, shape: Optional[tuple[int, int]] = None, n_samples: Optional[int] = None) -> list[int]:
    """Indices adjacent to sample ``n``, excluding ``n`` itself.

    For ``Sequence``, pass ``n_samples``. Grid topologies need ``shape`` =
    ``(h, w)`` and use row-major pixel indices. Neighbors falling outside
    the data are dropped.
    """
    if topology == "Sequence":
        if n_samples is None:
            if shape is None:
                raise ShapeMissing("Sequence topology needs n_samples")
            n_samples = shape[0] * shape[1]
        if not 0 <= n < n_samples:
            raise IndexOutOfRange(f"index {n} outside [0, {n_samples})")
        return [j for j in (n - 1, n + 1) if 0 <= j < n_samples]
    if topology not in _OFFSETS:
        raise ValueError(f"unknown topology {topology!r}")
    if shape is None:
        raise ShapeMissing(f"{topology} topology needs an image shape")
    h, w = shape
    if not 0 <= n < h * w:
        raise IndexOutOfRange(f"index {n} outside [0, {h * w})")
    r, c = divmod(n, w)
    out = []
    for dr, dc in _OFFSETS[topology]:
        rr, cc = r + dr, c + dc
        if 0 <= rr < h and 0 <= cc < w:
            out.append(rr * w + cc)
    return out


@lru_cache(maxsize=32)
def adjacency(topology: str, n_samples: int, shape: Optional[tuple[int, int]] = None) -> sparse.csr_matrix:
    """Symmetric 0/1 adjacency matrix (CSR) for all samples, cached per topology and size."""
    if topology == "Sequence":
        idx = np.arange(n_samples - 1)
        rows = np.concatenate([idx, idx + 1])
        cols = np.concatenate([idx + 1, idx])
    else:
        if shape is None:
            raise ShapeMissing(f"{topology} topology needs an image shape")
        h, w = shape
        if h * w != n_samples:
            raise ValueError("shape does not match sample count")
        grid = np.arange(n_samples).reshape(h, w)
        rows, cols = [], []
        for dr, dc in _OFFSETS[topology]:
            src = grid[max(0, -dr) : h - max(0, dr), max(0, -dc) : w - max(0, dc)]
            dst = grid[max(0, dr) : h + min(0, dr), max(0, dc) : w + min(0, dc)]
            rows.append(src.ravel())
            cols.append(dst.ravel())
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
    data = np.ones(rows.size)
    A = sparse.csr_matrix((data, (rows, cols)), shape=(n_samples, n_samples))
    A.sort_indices()
    return A
