"""Shared data types and configuration for the clustering variants."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

WEIGHT_KINDS = ("L2", "L1L2", "Huber", "GermanMcClure", "Welsch", "Cauchy", "Fair")
# kinds whose formula does not involve the scale parameter
UNSCALED_WEIGHTS = ("L2", "L1L2", "GermanMcClure")
KERNEL_KINDS = ("Linear", "Poly", "RBF", "Tanh")
PENALTY_KINDS = ("None", "SI", "SII")
TOPOLOGIES = ("Sequence", "Grid4", "Grid8")


class ConfigError(ValueError):
    """Base class for rejected model configurations."""


class InvalidFuzziness(ConfigError):
    pass


class TopologyMismatch(ConfigError):
    pass


class TooManyClusters(ConfigError):
    pass


class NonPositiveParam(ConfigError):
    pass


class DimensionMismatch(ValueError):
    pass


class NumericalUnderflow(ArithmeticError):
    """All bracketed membership terms for a sample vanished."""


@dataclass(frozen=True)
class Dataset:
    """N samples by d features, with optional labels and raster shape.

    ``grid`` is ``(height, width)``; when set, samples are pixels in
    row-major order.
    """

    samples: np.ndarray
    labels: Optional[np.ndarray] = None
    grid: Optional[tuple[int, int]] = None

    def __post_init__(self):
        x = np.asarray(self.samples, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
            raise ValueError(f"samples must be a non-empty N x d matrix, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            raise ValueError("samples contain non-finite values")
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)
        if self.labels is not None:
            y = np.asarray(self.labels)
            if y.shape != (x.shape[0],):
                raise ValueError("labels must have one entry per sample")
            if not np.issubdtype(y.dtype, np.integer) or y.min() < 0:
                raise ValueError("labels must be nonnegative integers")
            y = y.astype(np.int64)
            y.setflags(write=False)
            object.__setattr__(self, "labels", y)
        if self.grid is not None:
            h, w = (int(g) for g in self.grid)
            if h < 1 or w < 1 or h * w != x.shape[0]:
                raise ValueError(f"grid {self.grid} incompatible with {x.shape[0]} samples")
            object.__setattr__(self, "grid", (h, w))

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    @property
    def n_features(self) -> int:
        return self.samples.shape[1]

    @property
    def n_classes(self) -> Optional[int]:
        # labels are 0..C_true-1, so the count is max + 1
        return None if self.labels is None else int(self.labels.max()) + 1

    def image(self) -> np.ndarray:
        """First feature reshaped to the raster grid."""
        if self.grid is None:
            raise ValueError("dataset has no grid")
        return self.samples[:, 0].reshape(self.grid)

    def with_samples(self, samples) -> "Dataset":
        return replace(self, samples=np.asarray(samples, dtype=float))


@dataclass(frozen=True)
class WeightKind:
    """A robust weight function and its scale ``beta``."""

    name: str = "L2"
    beta: float = 1.0

    def __post_init__(self):
        if self.name not in WEIGHT_KINDS:
            raise ValueError(f"unknown weight kind {self.name!r}; expected one of {WEIGHT_KINDS}")
        if self.name not in UNSCALED_WEIGHTS and not self.beta > 0:
            raise NonPositiveParam(f"{self.name} weight needs beta > 0, got {self.beta}")


@dataclass(frozen=True)
class KernelKind:
    """Kernel choice. Parameters unused by ``name`` are ignored."""

    name: str = "Linear"
    beta: float = 1.0
    theta: float = 1.0
    degree: int = 2

    def __post_init__(self):
        if self.name not in KERNEL_KINDS:
            raise ValueError(f"unknown kernel {self.name!r}; expected one of {KERNEL_KINDS}")
        if self.name != "Linear" and not self.beta > 0:
            raise NonPositiveParam(f"{self.name} kernel needs beta > 0")
        if self.name in ("Poly", "Tanh") and not self.theta > 0:
            raise NonPositiveParam(f"{self.name} kernel needs theta > 0")
        if self.name == "Poly" and (int(self.degree) != self.degree or self.degree < 1):
            raise NonPositiveParam("Poly kernel degree must be a positive integer")

    @property
    def is_euclidean(self) -> bool:
        return self.name == "Linear"


@dataclass(frozen=True)
class PenaltyVariant:
    name: str = "None"
    topology: str = "Sequence"

    def __post_init__(self):
        if self.name not in PENALTY_KINDS:
            raise ValueError(f"unknown penalty {self.name!r}; expected one of {PENALTY_KINDS}")
        if self.topology not in TOPOLOGIES:
            raise ValueError(f"unknown topology {self.topology!r}; expected one of {TOPOLOGIES}")

    @property
    def active(self) -> bool:
        return self.name != "None"


@dataclass(frozen=True)
class ModelConfig:
    n_clusters: int = 2
    m: float = 2.0
    gamma: float = 0.0
    weight: WeightKind = field(default_factory=WeightKind)
    kernel: KernelKind = field(default_factory=KernelKind)
    penalty: PenaltyVariant = field(default_factory=PenaltyVariant)
    epsilon: float = 1e-5
    max_iter: int = 20
    seed: int = 0
    # draw W^(0) uniformly in [0, 1] instead of all ones
    random_initial_weights: bool = False

    def with_(self, **changes) -> "ModelConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "n_clusters": self.n_clusters,
            "m": self.m,
            "gamma": self.gamma,
            "weight": {"name": self.weight.name, "beta": self.weight.beta},
            "kernel": {
                "name": self.kernel.name,
                "beta": self.kernel.beta,
                "theta": self.kernel.theta,
                "degree": self.kernel.degree,
            },
            "penalty": {"name": self.penalty.name, "topology": self.penalty.topology},
            "epsilon": self.epsilon,
            "max_iter": self.max_iter,
            "seed": self.seed,
            "random_initial_weights": self.random_initial_weights,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        return cls(
            n_clusters=int(d["n_clusters"]),
            m=float(d["m"]),
            gamma=float(d["gamma"]),
            weight=WeightKind(**d["weight"]),
            kernel=KernelKind(**d["kernel"]),
            penalty=PenaltyVariant(**d["penalty"]),
            epsilon=float(d["epsilon"]),
            max_iter=int(d["max_iter"]),
            seed=int(d["seed"]),
            random_initial_weights=bool(d.get("random_initial_weights", False)),
        )


def validate_config(config: ModelConfig, data: Dataset) -> None:
    """Raise a :class:`ConfigError` subclass if ``config`` cannot run on ``data``."""
    if not config.m > 1:
        raise InvalidFuzziness(f"fuzziness m must be > 1, got {config.m}")
    if config.n_clusters < 2:
        raise NonPositiveParam(f"need at least 2 clusters, got {config.n_clusters}")
    if config.n_clusters > data.n_samples:
        raise TooManyClusters(f"{config.n_clusters} clusters for {data.n_samples} samples")
    if not config.gamma >= 0:
        raise NonPositiveParam(f"gamma must be >= 0, got {config.gamma}")
    if not config.epsilon > 0:
        raise NonPositiveParam(f"epsilon must be > 0, got {config.epsilon}")
    if config.max_iter < 1:
        raise NonPositiveParam(f"max_iter must be >= 1, got {config.max_iter}")
    if config.seed < 0:
        raise NonPositiveParam("seed must be unsigned")
    if config.penalty.active:
        grid_topology = config.penalty.topology in ("Grid4", "Grid8")
        if grid_topology and data.grid is None:
            raise TopologyMismatch(f"{config.penalty.topology} penalty needs an image grid")
        if not grid_topology and data.grid is not None:
            raise TopologyMismatch("Sequence topology is for non-image data")


def check_memberships(u: np.ndarray, atol: float = 1e-9) -> None:
    """Assert the column-stochastic invariant of a C x N membership matrix."""
    if np.any(u < 0) or np.any(u > 1 + atol):
        raise AssertionError("memberships outside [0, 1]")
    err = np.max(np.abs(u.sum(axis=0) - 1.0))
    if err > atol:
        raise AssertionError(f"membership columns sum off by {err:.3g}")


@dataclass
class ClusterState:
    memberships: np.ndarray  # C x N
    centroids: np.ndarray  # C x d
    irls_weights: np.ndarray  # C x N
    iteration: int = 0
    objective_trace: list = field(default_factory=list)


@dataclass
class RunResult:
    final_state: ClusterState
    converged: bool
    iterations_used: int
    hard_labels: np.ndarray
    config_echo: ModelConfig
    seed_echo: int
    membership_trace: Optional[list] = None
    degenerate_centroid_events: int = 0
