import numpy as np
import pytest

from robust_fcm import engine, tuning
from robust_fcm.core import Dataset, KernelKind, ModelConfig, PenaltyVariant, WeightKind
from robust_fcm.tuning import EmptyValidationSet, cross_validation_error, tune_gamma, weighted_distortion

from conftest import blobs


def noisy_sequence(rng):
    base = blobs(rng, n_per=40, sep=4.0)
    return Dataset(base.samples, labels=base.labels)


def test_single_point_at_centroid_contributes_zero(rng):
    data = blobs(rng)
    res = engine.run(data, ModelConfig())
    probe = Dataset(np.vstack([data.samples, res.final_state.centroids[:1]]))
    assert cross_validation_error(res.final_state, probe, ModelConfig(), [data.n_samples]) == 0.0


def test_full_validation_equals_q(rng):
    data = blobs(rng, sep=3.0)
    cfg = ModelConfig(seed=2)
    st = engine.run(data, cfg).final_state
    idx = np.arange(data.n_samples)
    e = cross_validation_error(st, data, cfg, idx, idx)
    q = engine.objective(st.memberships, st.centroids, st.irls_weights, data, cfg).q
    assert e == pytest.approx(q, rel=1e-13)


def test_weighted_distortion_triple_loop(rng):
    U = rng.dirichlet(np.ones(2), size=3).T
    W = rng.uniform(0.1, 1, size=(2, 3))
    D = rng.uniform(0, 4, size=(2, 3))
    naive = sum(W[k, n] * U[k, n] ** 1.7 * D[k, n] for k in range(2) for n in range(3))
    assert weighted_distortion(U, W, D, 1.7) == pytest.approx(naive, rel=1e-14)


def test_heldout_validation_uses_unpenalized_update(rng):
    data = blobs(rng, sep=3.0)
    cfg = ModelConfig(weight=WeightKind("Cauchy", 1.0))
    st = engine.run(data, cfg).final_state
    val = np.array([1, 5, 40])
    D = engine.compute_distances(data.samples[val], st.centroids, cfg.kernel)
    U = engine.update_memberships(D, np.ones_like(D.d2), None, cfg.m)
    W = engine.update_irls_weights(U, D, cfg.m, cfg.weight)
    want = sum(W[k, n] * U[k, n] ** 2 * D.d2[k, n] for k in range(2) for n in range(3))
    assert cross_validation_error(st, data, cfg, val) == pytest.approx(want, rel=1e-13)
    with pytest.raises(EmptyValidationSet):
        cross_validation_error(st, data, cfg, [])


def _check_trace(res):
    gammas = [g for g, _ in res.trace]
    errs = [e for _, e in res.trace]
    assert res.best_gamma == gammas[int(np.argmin(errs))]
    assert all(g >= 1 for g in gammas)
    assert all(b > a for a, b in zip(gammas, gammas[1:]))


def test_one_candidate(rng):
    data = noisy_sequence(rng)
    idx = np.arange(data.n_samples)
    res = tune_gamma(data, (idx, idx), ModelConfig(penalty=PenaltyVariant("SII")), t_gamma=1)
    assert len(res.trace) == 1 and res.best_gamma == res.trace[0][0]


def test_five_candidates_sequence_si(rng):
    data = noisy_sequence(rng)
    idx = np.arange(data.n_samples)
    cfg = ModelConfig(penalty=PenaltyVariant("SI"), seed=3)
    res = tune_gamma(data, (idx, idx), cfg, t_gamma=5)
    assert len(res.trace) == 5
    _check_trace(res)
    again = tune_gamma(data, (idx, idx), cfg, t_gamma=5)
    assert again.trace == res.trace


def test_holdout_split(rng):
    data = noisy_sequence(rng)
    perm = np.random.default_rng(0).permutation(data.n_samples)
    split = (np.sort(perm[20:]), np.sort(perm[:20]))
    res = tune_gamma(data, split, ModelConfig(penalty=PenaltyVariant("SII"), kernel=KernelKind("RBF", 0.2)), t_gamma=3)
    assert len(res.trace) == 3
    _check_trace(res)


def test_vanishing_penalty_stops_early(rng, monkeypatch):
    data = noisy_sequence(rng)
    idx = np.arange(data.n_samples)
    real = tuning._penalty_per_gamma
    calls = []

    def fake(result, d, cfg):
        calls.append(1)
        q, pen = real(result, d, cfg)
        return q, (pen if len(calls) < 3 else 0.0)

    monkeypatch.setattr(tuning, "_penalty_per_gamma", fake)
    res = tune_gamma(data, (idx, idx), ModelConfig(penalty=PenaltyVariant("SII")), t_gamma=10)
    assert res.stopped_early and len(res.trace) == 2
    _check_trace(res)


def test_requires_penalty_and_nonempty_validation(rng):
    data = noisy_sequence(rng)
    idx = np.arange(data.n_samples)
    with pytest.raises(ValueError):
        tune_gamma(data, (idx, idx), ModelConfig())
    with pytest.raises(EmptyValidationSet):
        tune_gamma(data, (idx, []), ModelConfig(penalty=PenaltyVariant("SI")))
    with pytest.raises(ValueError):
        tune_gamma(data, (idx, idx), ModelConfig(penalty=PenaltyVariant("SI")), t_gamma=0)
