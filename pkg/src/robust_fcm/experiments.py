"""Reproducible experiment pipelines built on the engine.

Parameter strings follow a compact syntax so grids can be written the way
they are usually reported: ``huber:2s`` is a Huber weight with beta = 2
sigma, ``rbf:1s2`` an RBF kernel with beta = sigma**2, where sigma is the
data diameter after preprocessing. Plain numbers are taken literally.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from importlib import resources
from typing import Optional

import numpy as np

from . import dataio, engine, evaluation
from .core import Dataset, KernelKind, ModelConfig, PenaltyVariant, RunResult, WeightKind

WEIGHT_ALIASES = {
    "l2": "L2",
    "l1l2": "L1L2",
    "l1-l2": "L1L2",
    "huber": "Huber",
    "gm": "GermanMcClure",
    "germanmcclure": "GermanMcClure",
    "welsch": "Welsch",
    "cauchy": "Cauchy",
    "fair": "Fair",
}
KERNEL_ALIASES = {"linear": "Linear", "poly": "Poly", "rbf": "RBF", "tanh": "Tanh"}
PENALTY_ALIASES = {"none": "None", "si": "SI", "sii": "SII"}
TOPOLOGY_ALIASES = {"seq": "Sequence", "nn1": "Grid4", "nn2": "Grid8"}
TOPOLOGY_NAMES = {v: k for k, v in TOPOLOGY_ALIASES.items()}


def parse_scaled(token: str, sigma: float) -> float:
    """``'2'`` -> 2.0, ``'2s'`` -> 2 sigma, ``'2s2'`` -> 2 sigma**2."""
    token = token.strip().lower()
    if token.endswith("s2"):
        return float(token[:-2] or 1) * sigma**2
    if token.endswith("s"):
        return float(token[:-1] or 1) * sigma
    return float(token)


def parse_weight(spec: str, sigma: float = 1.0) -> WeightKind:
    name, _, arg = spec.partition(":")
    try:
        kind = WEIGHT_ALIASES[name.strip().lower()]
    except KeyError:
        raise ValueError(f"unknown weight {name!r}") from None
    beta = parse_scaled(arg, sigma) if arg else 1.0 * sigma
    return WeightKind(kind, beta)


def parse_kernel(spec: str, sigma: float = 1.0) -> KernelKind:
    """``linear``, ``poly:beta,theta,degree``, ``rbf:beta``, ``tanh:beta,theta``."""
    name, _, arg = spec.partition(":")
    try:
        kind = KERNEL_ALIASES[name.strip().lower()]
    except KeyError:
        raise ValueError(f"unknown kernel {name!r}") from None
    parts = [p for p in arg.split(",") if p.strip()] if arg else []
    if kind == "Linear":
        return KernelKind("Linear")
    beta = parse_scaled(parts[0], sigma) if parts else 1.0
    theta = float(parts[1]) if len(parts) > 1 else (0.1 if kind == "Tanh" else 1.0)
    degree = int(parts[2]) if len(parts) > 2 else 2
    return KernelKind(kind, beta=beta, theta=theta, degree=degree)


def parse_penalty(name: str, topology: str) -> PenaltyVariant:
    return PenaltyVariant(PENALTY_ALIASES[name.lower()], TOPOLOGY_ALIASES[topology.lower()])


def model_name(config: ModelConfig) -> str:
    base = "MFCM" if config.kernel.is_euclidean else "KMFCM"
    if config.penalty.active:
        base = "p" + base + ("-SI" if config.penalty.name == "SI" else "-SII")
    return base


def load_iris() -> Dataset:
    """Bundled 150 x 4 Iris table with class labels."""
    with resources.as_file(resources.files("robust_fcm") / "data" / "iris.csv") as path:
        return dataio.load_csv(path, label_column=-1)


# ---------------------------------------------------------------- images


def noisy_image(image: Dataset, noise: str = "none", seed: int = 0) -> Dataset:
    """Apply ``none``, ``gauss:P`` or ``sp:P`` noise."""
    kind, _, amount = noise.partition(":")
    kind = kind.lower()
    if kind == "none":
        return image
    if kind == "gauss":
        return evaluation.add_gaussian_noise(image, float(amount), seed)
    if kind == "sp":
        return evaluation.add_salt_pepper(image, float(amount), seed)
    raise ValueError(f"unknown noise {noise!r}")


def filtered_image(image: Dataset, filt: str = "none") -> Dataset:
    filt = filt.lower()
    if filt == "none":
        return image
    if filt == "mean":
        return evaluation.mean_filter_3x3(image)
    if filt == "median":
        return evaluation.median_filter_3x3(image)
    raise ValueError(f"unknown filter {filt!r}")


@dataclass
class SegmentOutcome:
    result: RunResult
    accuracy: Optional[float]
    aligned_labels: np.ndarray
    image: Dataset  # the clustered (noisy, filtered, preprocessed) image
    accuracies: list


def segment(
    image: Dataset,
    config: ModelConfig,
    noise: str = "none",
    noise_seed: int = 0,
    filt: str = "none",
    pre: str = "N01",
    init: str = "kde",
    restarts: int = 1,
    truth=None,
) -> SegmentOutcome:
    """Noise, filter, normalize, then cluster pixel intensities.

    With labels (``truth`` or ``image.labels``) the restart with the best
    segmentation accuracy is kept, otherwise the lowest objective.
    """
    truth = image.labels if truth is None else np.asarray(truth)
    work = evaluation.preprocess(filtered_image(noisy_image(image, noise, noise_seed), filt), pre)
    kwargs = {}
    if init == "kde":
        kwargs["init_centroids"] = evaluation.kde_peak_centroids(work, config.n_clusters)[:, None]
    elif init != "random":
        raise ValueError(f"unknown init {init!r}")
    results = [engine.run(work, config.with_(seed=config.seed + r), **kwargs) for r in range(restarts)]
    if truth is None:
        best = min(results, key=lambda r: r.final_state.objective_trace[-1])
        return SegmentOutcome(best, None, best.hard_labels, work, [])
    scored = [evaluation.assign_and_align(r.hard_labels, truth) for r in results]
    accs = [a for _, a in scored]
    i = int(np.argmax(accs))
    return SegmentOutcome(results[i], accs[i], scored[i][0], work, accs)


# ------------------------------------------------------------ feature data


@dataclass
class ClusterOutcome:
    best_by_accuracy: Optional[RunResult]
    best_accuracy: Optional[float]
    best_by_objective: RunResult
    accuracies: list


def cluster(data: Dataset, config: ModelConfig, restarts: int = 20) -> ClusterOutcome:
    """Restarts with consecutive seeds; track best accuracy and best objective."""
    results = [engine.run(data, config.with_(seed=config.seed + r)) for r in range(restarts)]
    best_obj = min(results, key=lambda r: r.final_state.objective_trace[-1])
    if data.labels is None:
        return ClusterOutcome(None, None, best_obj, [])
    accs = [evaluation.assign_and_align(r.hard_labels, data.labels)[1] for r in results]
    i = int(np.argmax(accs))
    return ClusterOutcome(results[i], accs[i], best_obj, accs)


# --------------------------------------------------------------- benchmark

SUMMARY_HEADER = ("model", "weight", "kernel", "penalty", "topology", "m", "gamma", "pre", "best_metric", "seconds")


@dataclass(frozen=True)
class GridCell:
    weight: str = "l2"
    kernel: str = "linear"
    penalty: str = "none"
    topology: str = "seq"
    m: float = 2.0
    gamma: float = 0.0
    pre: str = "N01"


def synth_image_grid(gamma: float = 3.8, m: float = 2.0) -> list[GridCell]:
    """MFCM plus both penalties on both image neighborhoods, for all seven weights."""
    weights = ("l2", "l1l2", "huber", "gm", "welsch", "cauchy", "fair")
    cells = [GridCell(weight=w, topology="seq", m=m) for w in weights]
    for pen in ("si", "sii"):
        for topo in ("nn1", "nn2"):
            cells.extend(GridCell(weight=w, penalty=pen, topology=topo, m=m, gamma=gamma) for w in weights)
    return cells


def uci_mini_grid(gamma: float = 0.1, m: float = 2.0) -> list[GridCell]:
    weights = ("l2", "l1l2", "huber", "gm", "welsch", "cauchy", "fair")
    kernels = ("linear", "poly:1s2,1,2", "rbf:1s2", "tanh:1s2,0.1")
    cells = []
    for k in kernels:
        for pen in ("none", "si", "sii"):
            cells.extend(GridCell(weight=w, kernel=k, penalty=pen, m=m, gamma=0.0 if pen == "none" else gamma) for w in weights)
    return cells


def run_cell(cell: GridCell, data: Dataset, *, image: bool, n_clusters: int, restarts: int, seed: int, noise: str = "none", noise_seed: int = 0, filt: str = "none"):
    """Evaluate one grid cell; returns ``(summary_row, best_metric)``."""
    t0 = time.perf_counter()
    if image:
        probe = evaluation.preprocess(filtered_image(noisy_image(data, noise, noise_seed), filt), cell.pre)
    else:
        probe = evaluation.preprocess(data, cell.pre)
    sigma = evaluation.data_diameter(probe)
    topology = cell.topology if image or cell.penalty == "none" else "seq"
    config = ModelConfig(
        n_clusters=n_clusters,
        m=cell.m,
        gamma=cell.gamma,
        weight=parse_weight(cell.weight if ":" in cell.weight else cell.weight + ":1s", sigma),
        kernel=parse_kernel(cell.kernel, sigma),
        penalty=parse_penalty(cell.penalty, topology),
        seed=seed,
    )
    if image:
        out = segment(data, config, noise=noise, noise_seed=noise_seed, filt=filt, pre=cell.pre, restarts=restarts)
        metric = out.accuracy
    else:
        metric = cluster(probe, config, restarts).best_accuracy
    seconds = time.perf_counter() - t0
    row = (
        model_name(config),
        cell.weight,
        cell.kernel,
        cell.penalty,
        cell.topology if config.penalty.active else "",
        f"{cell.m:g}",
        f"{cell.gamma:g}",
        cell.pre,
        "" if metric is None else f"{metric:.2f}",
        f"{seconds:.3f}",
    )
    return row, metric
