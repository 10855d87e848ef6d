"""Experiment helpers: preprocessing, noise, filters, scoring, initialization."""

from __future__ import annotations

import itertools
import math

import numpy as np

from .core import Dataset

MAX_ALIGN_CLUSTERS = 8


class TooManyClustersForAlignment(ValueError):
    pass


def preprocess(data: Dataset, mode: str, scale_to: float = 4.0) -> Dataset:
    """Per-feature normalization.

    ``mode`` is one of ``N01`` (z-score, population stddev), ``NoP``
    (identity), ``U01`` (min-max to [0, 1]) or ``Scale`` (min-max to
    ``[0, scale_to]``). Constant features map to 0.
    """
    mode = mode.upper()
    X = data.samples
    if mode == "NOP":
        return data
    if mode == "N01":
        mu = X.mean(axis=0)
        sd = X.std(axis=0)
        out = np.where(sd > 0, (X - mu) / np.where(sd > 0, sd, 1.0), 0.0)
    elif mode in ("U01", "SCALE"):
        lo = X.min(axis=0)
        span = X.max(axis=0) - lo
        out = np.where(span > 0, (X - lo) / np.where(span > 0, span, 1.0), 0.0)
        if mode == "SCALE":
            out = out * scale_to
    else:
        raise ValueError(f"unknown preprocessing mode {mode!r}")
    return data.with_samples(out)


def data_diameter(data, chunk: int = 512) -> float:
    """Largest pairwise Euclidean distance between samples (exact)."""
    X = data.samples if isinstance(data, Dataset) else np.atleast_2d(np.asarray(data, dtype=float))
    best = 0.0
    for start in range(0, X.shape[0], chunk):
        block = X[start : start + chunk]
        diff = block[:, None, :] - X[None, :, :]
        best = max(best, float(np.einsum("ijk,ijk->ij", diff, diff).max()))
    return math.sqrt(best)


def hard_labels(U) -> np.ndarray:
    """Argmax over clusters; ties go to the lowest index."""
    return np.argmax(np.asarray(U), axis=0)


def assign_and_align(U, truth):
    """Best cluster-to-class matching by exhaustive search.

    ``U`` may be a C x N membership matrix or a vector of hard labels.
    Returns ``(aligned_labels, accuracy_percent)``.
    """
    U = np.asarray(U)
    if U.ndim == 2:
        pred = hard_labels(U)
        n_clusters = U.shape[0]
    else:
        pred = U.astype(np.int64)
        n_clusters = int(pred.max()) + 1
    truth = np.asarray(truth, dtype=np.int64)
    if truth.shape != pred.shape:
        raise ValueError("truth must cover every sample")
    size = max(n_clusters, int(truth.max()) + 1)
    if size > MAX_ALIGN_CLUSTERS:
        raise TooManyClustersForAlignment(f"exhaustive alignment supports at most {MAX_ALIGN_CLUSTERS} labels")
    conf = np.zeros((size, size), dtype=np.int64)
    np.add.at(conf, (pred, truth), 1)
    perms = np.array(list(itertools.permutations(range(size))))
    scores = conf[np.arange(size), perms].sum(axis=1)
    best = perms[int(np.argmax(scores))]
    aligned = best[pred]
    return aligned, 100.0 * float(scores.max()) / pred.size


def segmentation_accuracy(pred, truth) -> float:
    """Percent of samples whose label equals the ground truth (no alignment)."""
    pred = np.asarray(pred)
    return 100.0 * float(np.mean(pred == np.asarray(truth)))


def _require_grid(image: Dataset):
    if image.grid is None:
        raise ValueError("operation needs an image dataset with a grid")


def add_gaussian_noise(image: Dataset, percent: float, seed: int, scale: float | None = None) -> Dataset:
    """Zero-mean Gaussian noise whose variance is ``percent``% of ``scale``**2.

    ``scale`` defaults to the peak intensity of the image, i.e. the noise
    variance is a fraction of the squared signal range. Output is clamped
    to [0, 255].
    """
    _require_grid(image)
    if percent == 0:
        return image
    x = image.samples
    if scale is None:
        scale = float(x.max())
    sd = math.sqrt(percent / 100.0) * scale
    rng = np.random.default_rng(seed)
    noisy = np.clip(x + rng.normal(0.0, sd, size=x.shape), 0.0, 255.0)
    return image.with_samples(noisy)


def add_salt_pepper(image: Dataset, percent: float, seed: int, return_indices: bool = False):
    """Set ``round(percent/100 * N)`` random pixels to 0 or 255 (fair coin each)."""
    _require_grid(image)
    x = image.samples.copy()
    n = x.shape[0]
    count = int(round(percent / 100.0 * n))
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(n, size=count, replace=False))
    x[idx, 0] = np.where(rng.random(count) < 0.5, 0.0, 255.0)
    out = image.with_samples(x)
    return (out, idx) if return_indices else out


def _windows(img: np.ndarray) -> np.ndarray:
    """9 x h x w stack of 3x3 neighborhoods, NaN outside the image."""
    h, w = img.shape
    padded = np.full((h + 2, w + 2), np.nan)
    padded[1:-1, 1:-1] = img
    return np.stack([padded[r : r + h, c : c + w] for r in range(3) for c in range(3)])


def mean_filter_3x3(image: Dataset) -> Dataset:
    _require_grid(image)
    out = np.nanmean(_windows(image.image()), axis=0)
    return image.with_samples(out.ravel())


def median_filter_3x3(image: Dataset) -> Dataset:
    """3x3 median; truncated border windows take the lower middle value."""
    _require_grid(image)
    stack = np.sort(_windows(image.image()), axis=0)  # NaNs sort last
    valid = np.sum(~np.isnan(stack), axis=0)
    pick = (valid - 1) // 2
    out = np.take_along_axis(stack, pick[None], axis=0)[0]
    return image.with_samples(out.ravel())


def kde_peak_centroids(image: Dataset, n_clusters: int, bandwidth: float | None = None, n_grid: int = 256) -> np.ndarray:
    """Initial scalar centroids at the highest peaks of a Gaussian KDE of intensities.

    The density is evaluated on ``n_grid`` points spanning the data range
    padded by three bandwidths. The ``n_clusters`` highest local maxima are
    returned in ascending order; missing ones are filled with points evenly
    spaced over [min, max]. Bandwidth defaults to Silverman's rule.
    """
    x = np.asarray(image.samples[:, 0], dtype=float)
    lo, hi = float(x.min()), float(x.max())
    if hi == lo:
        return np.full(n_clusters, lo)
    if bandwidth is None:
        bandwidth = 1.06 * float(x.std()) * x.size ** (-0.2)
    values, counts = np.unique(x, return_counts=True)
    grid = np.linspace(lo - 3 * bandwidth, hi + 3 * bandwidth, n_grid)
    dens = np.exp(-0.5 * ((grid[:, None] - values[None, :]) / bandwidth) ** 2) @ counts
    inner = (dens[1:-1] > dens[:-2]) & (dens[1:-1] >= dens[2:])
    peaks = np.flatnonzero(inner) + 1
    peaks = peaks[np.argsort(-dens[peaks], kind="stable")][:n_clusters]
    centers = list(np.clip(grid[peaks], lo, hi))
    missing = n_clusters - len(centers)
    if missing > 0:
        centers.extend(np.linspace(lo, hi, missing))
    return np.sort(np.asarray(centers[:n_clusters], dtype=float))
