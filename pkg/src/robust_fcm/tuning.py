"""Penalty-factor selection by validation distortion."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import engine
from .core import ClusterState, Dataset, ModelConfig

log = logging.getLogger(__name__)

DEGENERATE_PENALTY = 1e-12


class EmptyValidationSet(ValueError):
    pass


class DegeneratePenalty(ArithmeticError):
    pass


def weighted_distortion(U, W, d2, m: float) -> float:
    """``sum_k sum_n w_kn u_kn^m d2_kn``."""
    return float(np.sum(np.asarray(W) * np.asarray(U) ** m * np.asarray(d2)))


def cross_validation_error(state: ClusterState, data: Dataset, config: ModelConfig, validation_indices, train_indices=None) -> float:
    """Validation distortion of a trained state.

    If every validation sample was also a training sample (pass
    ``train_indices``), its trained memberships and weights are reused.
    Otherwise memberships come from one unpenalized update against the
    trained centroids, and weights from those memberships.
    """
    val = np.asarray(validation_indices, dtype=np.int64)
    if val.size == 0:
        raise EmptyValidationSet("validation set is empty")
    X = data.samples[val]
    D = engine.compute_distances(X, state.centroids, config.kernel)
    if train_indices is not None:
        train = np.asarray(train_indices, dtype=np.int64)
        pos = {int(t): i for i, t in enumerate(train)}
        if all(int(v) in pos for v in val):
            cols = [pos[int(v)] for v in val]
            U = state.memberships[:, cols]
            W = state.irls_weights[:, cols]
            return weighted_distortion(U, W, D.d2, config.m)
    U = engine.update_memberships(D, np.ones_like(D.d2), None, config.m)
    W = engine.update_irls_weights(U, D, config.m, config.weight)
    return weighted_distortion(U, W, D.d2, config.m)


def _subset(data: Dataset, idx: np.ndarray) -> Dataset:
    if idx.size == data.n_samples and np.array_equal(idx, np.arange(data.n_samples)):
        return data
    if data.grid is not None:
        raise ValueError("image data cannot be split; train and validate on the full image")
    labels = None if data.labels is None else data.labels[idx]
    return Dataset(data.samples[idx], labels=labels)


def _penalty_per_gamma(result, data: Dataset, config: ModelConfig) -> tuple[float, float]:
    """Unpenalized part Q and penalty per unit gamma of a trained state."""
    st = result.final_state
    probe = config.with_(gamma=1.0)
    obj = engine.objective(st.memberships, st.centroids, st.irls_weights, data, probe)
    return obj.q, obj.penalty


@dataclass
class TuneResult:
    best_gamma: float
    trace: list = field(default_factory=list)  # (gamma, validation error) pairs
    stopped_early: bool = False
    best_result: object = None


def tune_gamma(data: Dataset, split, config: ModelConfig, t_gamma: int = 10, **run_kwargs) -> TuneResult:
    """Increase gamma from 1 by ``0.1 * Q / ((J - Q) / gamma)`` steps, keep the best.

    The base model (gamma = 0) is fit on all of ``data`` first; each
    candidate is then trained on ``split[0]`` and scored on ``split[1]``
    with :func:`cross_validation_error`. The step is recomputed from the
    state just trained. If the penalty of that state vanishes the sweep
    stops early. When no candidate could be scored, ``best_gamma`` is 0.
    """
    if not config.penalty.active:
        raise ValueError("gamma tuning needs a penalized model")
    if t_gamma < 1:
        raise ValueError("t_gamma must be >= 1")
    train = np.asarray(split[0], dtype=np.int64)
    val = np.asarray(split[1], dtype=np.int64)
    if val.size == 0:
        raise EmptyValidationSet("validation set is empty")
    train_data = _subset(data, train)

    base_cfg = config.with_(gamma=0.0)
    base = engine.run(data, base_cfg, **run_kwargs)
    q, pen = _penalty_per_gamma(base, data, base_cfg)

    out = TuneResult(best_gamma=0.0)
    gamma = 1.0
    best_err = np.inf
    for _ in range(t_gamma):
        if pen < DEGENERATE_PENALTY:
            log.info("penalty vanished at gamma=%g; stopping gamma sweep", gamma)
            out.stopped_early = True
            break
        gamma = gamma + 0.1 * q / pen
        cfg = config.with_(gamma=gamma)
        res = engine.run(train_data, cfg, **run_kwargs)
        err = cross_validation_error(res.final_state, data, cfg, val, train)
        out.trace.append((gamma, err))
        if err < best_err:
            best_err = err
            out.best_gamma = gamma
            out.best_result = res
        q, pen = _penalty_per_gamma(res, train_data, cfg)
    return out
