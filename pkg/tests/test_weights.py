import numpy as np
import pytest
from scipy import integrate

from robust_fcm.core import WEIGHT_KINDS, WeightKind
from robust_fcm.weights import printed_fair_weight, psi, rho, rho_weight_residual, weight

KINDS = [WeightKind(name, beta) for name in WEIGHT_KINDS for beta in (0.5, 1.0, 2.5)]
DENSE = np.linspace(0.0, 20.0, 4001)


def test_table_values():
    assert weight(WeightKind("L2"), 7.3) == 1.0
    assert weight(WeightKind("Huber", 1.0), 2.0) == 0.5
    assert weight(WeightKind("Welsch", 1.0), 0.0) == 1.0
    assert weight(WeightKind("Cauchy", 2.0), 2.0) == 0.5
    assert weight(WeightKind("Fair", 2.0), 2.0) == 0.5
    assert weight(WeightKind("L1L2"), 2.0) == pytest.approx(1 / np.sqrt(3))
    assert weight(WeightKind("GermanMcClure"), 1.0) == pytest.approx(0.25)


def test_rho_values():
    assert rho(WeightKind("L2"), 2.0) == 2.0
    assert rho(WeightKind("Huber", 1.0), 2.0) == 1.5
    for kind in KINDS:
        assert rho(kind, 0.0) == 0.0


def test_huber_kink_uses_quadratic_branch():
    k = WeightKind("Huber", 1.5)
    assert weight(k, 1.5) == 1.0
    assert rho(k, 1.5) == pytest.approx(0.5 * 1.5**2)


@pytest.mark.parametrize("kind", KINDS, ids=str)
def test_weight_in_unit_interval_and_non_increasing(kind):
    w = weight(kind, DENSE)
    # strictly positive wherever exp() does not underflow
    assert np.all(w[DENSE <= 5] > 0) and np.all(w >= 0) and np.all(w <= 1)
    assert np.all(np.diff(w) <= 1e-15)


@pytest.mark.parametrize("kind", KINDS, ids=str)
def test_rho_non_decreasing(kind):
    r = rho(kind, DENSE)
    assert r[0] == 0 and np.all(np.diff(r) >= -1e-15)


@pytest.mark.parametrize("kind", KINDS, ids=str)
def test_finite_difference_derivative(kind):
    h = 1e-4
    x = np.linspace(0.1, 5.0, 491)
    if kind.name == "Huber":
        x = x[np.abs(x - kind.beta) > 2 * h]
    fd = (rho(kind, x + h) - rho(kind, x - h)) / (2 * h)
    assert np.max(np.abs(fd - psi(kind, x))) <= 1e-5


def test_l2_residual_exact():
    assert rho_weight_residual(WeightKind("L2"), np.arange(0, 5.01, 0.5)) <= 1e-8


def _simpson_residual(kind, wf, xs, n=200001):
    s = np.linspace(0, xs[-1], n)
    f = s * wf(kind, s)
    cum = integrate.cumulative_simpson(f, x=s, initial=0.0)
    return np.max(np.abs(rho(kind, xs) - np.interp(xs, s, cum)))


def test_welsch_against_simpson_oracle():
    kind = WeightKind("Welsch", 1.5)
    xs = np.linspace(0, 5, 51)
    assert rho_weight_residual(kind, xs) <= 1e-6
    assert _simpson_residual(kind, weight, xs) <= 1e-6


def test_fair_corrected_passes_printed_fails():
    kind = WeightKind("Fair", 2.0)
    xs = np.linspace(0, 5, 51)
    assert rho_weight_residual(kind, xs) <= 1e-6
    assert _simpson_residual(kind, weight, xs) <= 1e-6
    assert rho_weight_residual(kind, xs, weight_fn=printed_fair_weight) > 0.1


def test_residual_rejects_unsorted_grid():
    with pytest.raises(ValueError):
        rho_weight_residual(WeightKind("L2"), [1.0, 0.5])


def test_vectorized_shapes():
    x = np.ones((3, 4))
    for kind in KINDS:
        assert weight(kind, x).shape == (3, 4)
        assert rho(kind, x).shape == (3, 4)
    assert isinstance(weight(WeightKind("Cauchy"), 1.0), float)
