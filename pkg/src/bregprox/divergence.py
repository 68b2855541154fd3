"""Bregman distances induced by Legendre kernels."""

from __future__ import annotations

import numpy as np

from .errors import DomainError
from .kernels import Kernel


def bregman(kernel: Kernel, x, y) -> float:
    """D(x, y) = phi(x) - phi(y) - <grad phi(y), x - y>.

    ``y`` must lie in the interior of the kernel domain; ``x`` may be
    anywhere (the result is +inf outside dom phi).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if not kernel.dom_interior(y):
        raise DomainError(f"bregman: base point {y} not in int(dom {kernel.name})")
    vx = kernel.value(x)
    if not np.isfinite(vx):
        return float("inf")
    g = kernel.grad(y)
    return float(vx - kernel.value(y) - g @ (x - y))


def bregman_batch(kernel: Kernel, X, y) -> np.ndarray:
    """Vectorized D(X[i], y) over rows of X (shape (N, m))."""
    X = np.asarray(X, dtype=float)
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if not kernel.dom_interior(y):
        raise DomainError(f"bregman_batch: base point {y} not in int(dom {kernel.name})")
    g = kernel.grad(y)
    vals = kernel.value_batch(X) - kernel.value(y) - (X - y) @ g
    # points outside dom phi get +inf (value_batch may produce inf - inf = nan
    # only if g @ (X - y) is infinite, which cannot happen for finite X)
    return np.where(np.isfinite(kernel.value_batch(X)), vals, np.inf)


def bregman_dual_gap(kernel: Kernel, x, y) -> float:
    """|D_phi(x, y) - D_phi*(grad phi(y), grad phi(x))|.

    Zero (up to rounding) whenever both points are interior; used as a
    consistency check on kernel/conjugate pairs.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if not (kernel.dom_interior(x) and kernel.dom_interior(y)):
        raise DomainError("bregman_dual_gap needs both points interior")
    primal = bregman(kernel, x, y)
    dual = bregman(kernel.conjugate(), kernel.grad(y), kernel.grad(x))
    return abs(primal - dual)


def quadratic_bounds(kernel: Kernel, box, n_grid: int = 60) -> tuple:
    """Estimate (theta, Theta) with theta/2 |x-y|^2 <= D(x,y) <= Theta/2 |x-y|^2.

    Samples Hessian eigenvalue extremes over a grid in ``box`` (a list of
    per-coordinate (lo, hi) intervals inside int(dom phi)).  Requires a
    twice-differentiable kernel.
    """
    axes = [np.linspace(lo, hi, n_grid) for lo, hi in box]
    theta, big_theta = np.inf, 0.0
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.column_stack([m.ravel() for m in mesh])
    for p in pts:
        h = np.diag(kernel.hessian(p))
        theta = min(theta, float(h.min()))
        big_theta = max(big_theta, float(h.max()))
    return theta, big_theta
