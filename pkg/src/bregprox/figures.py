"""Bregman-ball tangency data: geometry behind the lower-support pictures.

Around the shifted center c = conj_grad(grad(xbar) + lam * v), the set
{z : D(z, c) <= D(xbar, c)} is a Bregman ball touching xbar.  If v is a
(relatively) proximal normal of the epigraph of h at xbar, the ball stays
below the graph of h, touching it only near xbar; with a kernel that is too
flat at the reference point the ball cuts into the epigraph arbitrarily
close to xbar.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError
from .kernels import Kernel


def _component_bregman(comp, x, c) -> float:
    return float(comp.val(x) - comp.val(c) - comp.grad(c) * (x - c))


def _vertical_extent(comp, c2: float, rem: float, span: float) -> tuple:
    """Solve D2(z, c2) = rem for the lowest/highest z on a separable ball."""
    if rem <= 0.0:
        return c2, c2

    def fn(z):
        return _component_bregman(comp, z, c2) - rem

    hi = c2 + span
    while fn(hi) < 0:
        hi = c2 + (hi - c2) * 2.0
    lo = c2 - span
    while fn(lo) < 0:
        lo = c2 - (c2 - lo) * 2.0
    z_top = brentq(fn, c2, hi, xtol=1e-14)
    z_bot = brentq(fn, lo, c2, xtol=1e-14)
    return z_bot, z_top


def tangency_scan(kernel: Kernel, h, xbar, v, lam: float,
                  width: float = 0.25, n: int = 400,
                  tol: float = 1e-9, touch_radius: float = 0.02) -> dict:
    """Min-gap scan between the graph of h and the top of the Bregman ball.

    Returns per-sample data plus a verdict: the scan passes when the ball
    never rises above the graph (min gap >= -tol) and the closest approach
    happens within ``touch_radius`` of the reference abscissa.
    """
    assert kernel.dim == 2, "tangency scan is a 2-D construction"
    xbar = np.atleast_1d(np.asarray(xbar, dtype=float))
    v = np.atleast_1d(np.asarray(v, dtype=float))
    dual = kernel.grad(xbar) + lam * v
    if not kernel.conj_dom_interior(dual):
        raise DomainError("shifted center leaves int(dom conj)")
    c = kernel.conj_grad(dual)
    level = float(kernel.value(xbar) - kernel.value(c)
                  - kernel.grad(c) @ (xbar - c))
    comp1, comp2 = kernel.components
    t0 = float(xbar[0])
    xs = np.unique(np.concatenate([
        np.linspace(t0 - width, t0 + width, n),
        t0 + np.geomspace(1e-9, width, n // 4),
        t0 - np.geomspace(1e-9, width, n // 4),
        np.array([t0]),
    ]))
    span = max(math.sqrt(level) + abs(lam), 1e-3)
    rows = []
    min_gap, min_at = math.inf, t0
    for x1 in xs:
        d1 = _component_bregman(comp1, x1, float(c[0]))
        rem = level - d1
        if rem < 0.0:
            continue
        z_bot, z_top = _vertical_extent(comp2, float(c[1]), rem, span)
        gap = float(h(x1)) - z_top
        rows.append((float(x1), z_bot, z_top, float(h(x1)), gap))
        if gap < min_gap:
            min_gap, min_at = gap, float(x1)
    passed = bool(min_gap >= -tol and abs(min_at - t0) <= touch_radius)
    return {
        "passed": passed,
        "min_gap": min_gap,
        "min_gap_at": min_at,
        "center": c,
        "level": level,
        "rows": rows,  # (x1, ball_bottom, ball_top, h(x1), gap)
    }
