"""M-estimation loss (rho) and weight (w) functions.

All functions take residual magnitudes ``x >= 0`` and broadcast over arrays.
Every pair satisfies ``rho'(x) = x * w(x)``, i.e.
``rho(x) = integral_0^x s w(s) ds``.
"""

from __future__ import annotations

import numpy as np
from scipy import integrate

from .core import WeightKind


def weight(kind: WeightKind, x):
    """IRLS weight ``w(x)`` in ``(0, 1]``.

    Parameters
    ----------
    kind : WeightKind
    x : float or ndarray
        Nonnegative residual magnitudes.

    Returns
    -------
    ndarray or float, same shape as ``x``.
    """
    x = np.abs(np.asarray(x, dtype=float))
    b = kind.beta
    name = kind.name
    if name == "L2":
        out = np.ones_like(x)
    elif name == "L1L2":
        out = 1.0 / np.sqrt(1.0 + 0.5 * x**2)
    elif name == "Huber":
        # the |x| <= beta branch owns the kink
        with np.errstate(divide="ignore"):
            out = np.where(x <= b, 1.0, b / np.where(x <= b, 1.0, x))
    elif name == "GermanMcClure":
        out = 1.0 / (1.0 + x**2) ** 2
    elif name == "Welsch":
        out = np.exp(-((x / b) ** 2))
    elif name == "Cauchy":
        out = 1.0 / (1.0 + (x / b) ** 2)
    elif name == "Fair":
        out = 1.0 / (1.0 + x / b)
    else:  # pragma: no cover - WeightKind validates names
        raise ValueError(name)
    return out if out.ndim else float(out)


def rho(kind: WeightKind, x):
    """Robust loss ``rho(x)``, with ``rho(0) = 0``."""
    x = np.abs(np.asarray(x, dtype=float))
    b = kind.beta
    name = kind.name
    if name == "L2":
        out = 0.5 * x**2
    elif name == "L1L2":
        out = 2.0 * (np.sqrt(1.0 + 0.5 * x**2) - 1.0)
    elif name == "Huber":
        out = np.where(x <= b, 0.5 * x**2, b * (x - 0.5 * b))
    elif name == "GermanMcClure":
        out = x**2 / (2.0 * (1.0 + x**2))
    elif name == "Welsch":
        out = 0.5 * b**2 * (1.0 - np.exp(-((x / b) ** 2)))
    elif name == "Cauchy":
        out = 0.5 * b**2 * np.log1p((x / b) ** 2)
    elif name == "Fair":
        out = b**2 * (x / b - np.log1p(x / b))
    else:  # pragma: no cover
        raise ValueError(name)
    return out if out.ndim else float(out)


def psi(kind: WeightKind, x):
    """Influence function ``x * w(x)``."""
    return np.asarray(x, dtype=float) * weight(kind, x)


def printed_fair_weight(kind: WeightKind, x):
    """The increasing ``1 + |x|/beta`` form of the Fair weight.

    Kept only as a negative control: it is not the derivative-consistent
    partner of the Fair loss.
    """
    return 1.0 + np.abs(np.asarray(x, dtype=float)) / kind.beta


def rho_weight_residual(kind: WeightKind, grid, weight_fn=None) -> float:
    """Max over ``grid`` of ``|rho(x) - integral_0^x s w(s) ds|``.

    The integral is evaluated by adaptive quadrature between consecutive
    grid points and accumulated. ``weight_fn(kind, s)`` defaults to
    :func:`weight`.
    """
    wf = weight if weight_fn is None else weight_fn
    xs = np.asarray(grid, dtype=float)
    if np.any(xs < 0) or np.any(np.diff(xs) < 0):
        raise ValueError("grid must be sorted and nonnegative")
    integrand = lambda s: s * float(wf(kind, s))  # noqa: E731
    points = [kind.beta] if kind.name == "Huber" else None
    acc = 0.0
    prev = 0.0
    worst = 0.0
    for x in xs:
        if x > prev:
            brk = None
            if points is not None and prev < points[0] < x:
                brk = points
            val, _ = integrate.quad(integrand, prev, x, points=brk, epsabs=1e-13, epsrel=1e-12, limit=200)
            acc += val
            prev = x
        worst = max(worst, abs(float(rho(kind, x)) - acc))
    return worst
