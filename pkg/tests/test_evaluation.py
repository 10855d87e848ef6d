import itertools

import numpy as np
import pytest

from robust_fcm.core import Dataset
from robust_fcm.dataio import synth_two_class_image
from robust_fcm.evaluation import (
    TooManyClustersForAlignment,
    add_gaussian_noise,
    add_salt_pepper,
    assign_and_align,
    data_diameter,
    hard_labels,
    kde_peak_centroids,
    mean_filter_3x3,
    median_filter_3x3,
    preprocess,
    segmentation_accuracy,
)
from robust_fcm.experiments import load_iris


def col(values):
    return Dataset(np.asarray(values, dtype=float))


def test_preprocess_examples():
    d = col([3.0, 1.0, 7.0])
    assert preprocess(d, "NoP") is d
    assert np.allclose(preprocess(col([2, 4, 6]), "U01").samples[:, 0], [0, 0.5, 1])
    assert np.allclose(preprocess(col([0, 2]), "N01").samples[:, 0], [-1, 1])
    assert np.allclose(preprocess(col([0, 2]), "Scale", scale_to=4).samples[:, 0], [0, 4])


def test_preprocess_properties(rng):
    X = rng.normal(3, 5, size=(40, 3))
    X[:, 2] = 1.5  # constant feature
    n01 = preprocess(Dataset(X), "N01").samples
    assert np.all(np.abs(n01[:, :2].mean(axis=0)) <= 1e-9)
    assert np.all(np.abs(n01[:, :2].std(axis=0) - 1) <= 1e-9)
    assert np.all(n01[:, 2] == 0)
    u01 = preprocess(Dataset(X), "U01").samples
    assert u01.min() >= 0 and u01.max() <= 1 and np.all(u01[:, 2] == 0)
    with pytest.raises(ValueError):
        preprocess(Dataset(X), "zscore")


def test_diameter():
    assert data_diameter(col([4.0])) == 0
    assert data_diameter(Dataset(np.array([[0.0, 0.0], [3.0, 4.0]]))) == 5
    X = preprocess(load_iris(), "N01").samples
    brute = max(np.sqrt(np.sum((a - b) ** 2)) for a in X for b in X)
    assert data_diameter(X, chunk=17) == pytest.approx(brute, rel=1e-15)


def test_alignment_examples():
    truth = np.array([0, 0, 1, 1, 2])
    assert assign_and_align(truth, truth)[1] == 100.0
    aligned, acc = assign_and_align(1 - np.array([0, 1, 1, 0]), np.array([0, 1, 1, 0]))
    assert acc == 100.0 and list(aligned) == [0, 1, 1, 0]
    U = np.array([[0.9, 0.2, 0.5], [0.1, 0.8, 0.5]])
    assert list(hard_labels(U)) == [0, 1, 0]
    assert assign_and_align(U, [1, 0, 1])[1] == 100.0
    with pytest.raises(TooManyClustersForAlignment):
        assign_and_align(np.arange(9), np.arange(9))


def test_alignment_optimal_over_fixed_permutations(rng):
    for _ in range(30):
        pred, truth = rng.integers(0, 3, 50), rng.integers(0, 3, 50)
        _, best = assign_and_align(pred, truth)
        for p in itertools.permutations(range(3)):
            assert best >= segmentation_accuracy(np.array(p)[pred], truth)


def test_gaussian_noise():
    img = synth_two_class_image()
    assert add_gaussian_noise(img, 0, seed=1) is img
    flat = Dataset(np.full(4096, 128.0), grid=(64, 64))
    noisy = add_gaussian_noise(flat, 5, seed=0).samples[:, 0]
    # variance is 5% of the squared peak intensity
    assert np.std(noisy - 128) == pytest.approx(np.sqrt(0.05) * 128, rel=0.1)
    a, b = add_gaussian_noise(img, 10, 1), add_gaussian_noise(img, 10, 2)
    assert not np.array_equal(a.samples, b.samples)
    assert np.array_equal(a.samples, add_gaussian_noise(img, 10, 1).samples)
    assert a.samples.min() >= 0 and a.samples.max() <= 255
    assert np.std(add_gaussian_noise(flat, 5, 0, scale=255).samples - 128) == pytest.approx(np.sqrt(0.05) * 255, rel=0.1)


def test_salt_pepper():
    img = synth_two_class_image()
    assert np.array_equal(add_salt_pepper(img, 0, 3).samples, img.samples)
    full = add_salt_pepper(img, 100, 3).samples
    assert set(np.unique(full)) <= {0.0, 255.0}
    out, idx = add_salt_pepper(img, 10, 3, return_indices=True)
    assert idx.size == len(set(idx.tolist())) == 410
    changed = np.flatnonzero(out.samples[:, 0] != img.samples[:, 0])
    assert set(changed) <= set(idx)
    assert np.array_equal(out.samples, add_salt_pepper(img, 10, 3).samples)


def test_filters():
    const = Dataset(np.full(20, 7.0), grid=(4, 5))
    assert np.array_equal(mean_filter_3x3(const).samples, const.samples)
    assert np.array_equal(median_filter_3x3(const).samples, const.samples)
    spot = np.zeros((5, 5))
    spot[2, 2] = 255
    spot_img = Dataset(spot.ravel(), grid=(5, 5))
    assert np.all(median_filter_3x3(spot_img).samples == 0)
    nine = np.zeros((5, 5))
    nine[2, 2] = 9
    assert mean_filter_3x3(Dataset(nine.ravel(), grid=(5, 5))).image()[2, 2] == 1


def test_filter_borders_and_value_set(rng):
    img = rng.integers(0, 256, size=(6, 7)).astype(float)
    med = median_filter_3x3(Dataset(img.ravel(), grid=(6, 7))).image()
    mean = mean_filter_3x3(Dataset(img.ravel(), grid=(6, 7))).image()
    assert set(np.unique(med)) <= set(np.unique(img))
    corner = np.sort(img[:2, :2].ravel())
    assert med[0, 0] == corner[1]  # lower middle of 4
    assert mean[0, 0] == pytest.approx(img[:2, :2].mean())
    r, c = 3, 4
    assert med[r, c] == np.median(img[r - 1 : r + 2, c - 1 : c + 2])


def test_kde_peaks():
    img = synth_two_class_image()
    got = kde_peak_centroids(img, 2, bandwidth=4.0)
    x = img.samples[:, 0]
    hist, edges = np.histogram(x, bins=256, range=(0, 256))
    lo = edges[np.argmax(hist[:128])]
    hi = edges[128 + np.argmax(hist[128:])]
    assert np.allclose(got, [lo, hi], atol=2)
    const = Dataset(np.full(9, 42.0), grid=(3, 3))
    assert list(kde_peak_centroids(const, 1)) == [42.0]
    many = kde_peak_centroids(img, 4, bandwidth=4.0)
    assert len(many) == 4 and many.min() >= 0 and many.max() <= 128
    assert np.all(np.diff(many) >= 0)
