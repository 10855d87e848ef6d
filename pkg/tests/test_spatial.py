import numpy as np
import pytest

from robust_fcm.spatial import IndexOutOfRange, ShapeMissing, adjacency, neighbors, normalizer


def test_examples():
    assert neighbors("Sequence", 0, n_samples=10) == [1]
    assert len(neighbors("Grid8", 0, shape=(64, 64))) == 3
    r, c = 5, 5
    got = {divmod(j, 64) for j in neighbors("Grid4", r * 64 + c, shape=(64, 64))}
    assert got == {(4, 5), (6, 5), (5, 4), (5, 6)}


def test_normalizers():
    assert [normalizer(t) for t in ("Sequence", "Grid4", "Grid8")] == [2, 4, 8]


def test_errors():
    with pytest.raises(IndexOutOfRange):
        neighbors("Sequence", 10, n_samples=10)
    with pytest.raises(IndexOutOfRange):
        neighbors("Grid4", -1, shape=(3, 3))
    with pytest.raises(ShapeMissing):
        neighbors("Grid8", 0)


@pytest.mark.parametrize("topology,shape", [("Sequence", None), ("Grid4", (5, 7)), ("Grid8", (5, 7)), ("Grid8", (1, 6)), ("Grid4", (6, 1))])
def test_symmetry_counts_and_adjacency(topology, shape):
    n_samples = 35 if shape is None else shape[0] * shape[1]
    lists = [neighbors(topology, n, shape=shape, n_samples=n_samples) for n in range(n_samples)]
    for n, nb in enumerate(lists):
        assert n not in nb
        assert len(nb) <= normalizer(topology)
        for j in nb:
            assert n in lists[j]
    A = adjacency(topology, n_samples, shape).toarray()
    dense = np.zeros((n_samples, n_samples))
    for n, nb in enumerate(lists):
        dense[n, nb] = 1
    assert np.array_equal(A, dense)


def test_interior_has_full_count():
    assert len(neighbors("Grid8", 2 * 5 + 2, shape=(5, 5))) == 8
    assert len(neighbors("Grid4", 2 * 5 + 2, shape=(5, 5))) == 4
    assert len(neighbors("Sequence", 3, n_samples=9)) == 2
