"""Gradient formulas for Bregman-Moreau envelopes, with FD validation tools.

Three formulas are implemented, valid wherever the underlying prox is
single-valued:

  composed left:  grad of (lenv o conj_grad) at ydual
                  = (1/lam) (conj_grad(ydual) - lprox(conj_grad(ydual)))
  left:           grad lenv(y) = (1/lam) hess(y) (y - lprox(y))
  right:          grad renv(y) = (1/lam) (grad(y) - grad(rprox(y)))
                  = (1/lam) (grad(y) - dual lprox at grad(y))

plus the midpoint-convexity check of the envelope complements
(1/lam) conj - lenv o conj_grad and (1/lam) kernel - renv.
"""

from __future__ import annotations

import math
from typing import Callable, Optional

import numpy as np

from .errors import CrossCheckFailure, DomainError, MultivaluedProx
from .kernels import Kernel
from .objectives import ObjectiveFn
from .proxcore import ProxQuery, ProxResult, SearchConfig, left_envelope, right_envelope

ProxSolver = Callable[[ObjectiveFn, Kernel, float, np.ndarray], ProxResult]


def oracle_solver(search: SearchConfig) -> ProxSolver:
    """Wrap the grid oracle as a pluggable left-prox solver."""

    def solver(f, k, lam, y):
        return left_envelope(ProxQuery(f, k, lam, y, side="left"), search)

    return solver


def _single_point(res: ProxResult) -> np.ndarray:
    if res.multivalued:
        raise MultivaluedProx("gradient formula needs a single-valued prox",
                              minimizers=res.minimizers)
    return res.minimizers[0]


def left_env_grad_composed(f: ObjectiveFn, k: Kernel, lam: float, ydual,
                           solver: ProxSolver) -> np.ndarray:
    ydual = np.atleast_1d(np.asarray(ydual, dtype=float))
    if not k.conj_dom_interior(ydual):
        raise DomainError("dual point outside int(dom conj)")
    w = k.conj_grad(ydual)
    x = _single_point(solver(f, k, lam, w))
    return (w - x) / lam


def left_env_grad(f: ObjectiveFn, k: Kernel, lam: float, y,
                  solver: ProxSolver) -> np.ndarray:
    y = np.atleast_1d(np.asarray(y, dtype=float))
    hess = k.hessian(y)  # raises HessianUnavailable where kernel is not C^2
    x = _single_point(solver(f, k, lam, y))
    return hess @ (y - x) / lam


def right_env_grad(f: ObjectiveFn, k: Kernel, lam: float, y,
                   search: SearchConfig, cross_tol: float = 1e-6) -> np.ndarray:
    """Right-envelope gradient, cross-checked between its two expressions."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    res = right_envelope(ProxQuery(f, k, lam, y, side="right"), search)
    x = _single_point(res)
    gy = k.grad(y)
    expr1 = (gy - k.grad(x)) / lam
    dual_minimizers = res.diagnostics.get("dual_minimizers", [])
    if len(dual_minimizers) != 1:
        raise MultivaluedProx("dual path prox is multivalued",
                              minimizers=dual_minimizers)
    expr2 = (gy - dual_minimizers[0]) / lam
    if np.linalg.norm(expr1 - expr2) > cross_tol * (1.0 + np.linalg.norm(expr1)):
        raise CrossCheckFailure(
            f"right gradient expressions disagree: {expr1} vs {expr2}")
    return expr1


# ---------------------------------------------------------------------------
# envelope values as plain functions (for finite differences and convexity)
# ---------------------------------------------------------------------------


def left_envelope_value(f, k, lam, y, solver: ProxSolver) -> float:
    return solver(f, k, lam, np.atleast_1d(np.asarray(y, dtype=float))).env_value


def composed_left_envelope_value(f, k, lam, ydual, solver: ProxSolver) -> float:
    ydual = np.atleast_1d(np.asarray(ydual, dtype=float))
    if not k.conj_dom_interior(ydual):
        return math.inf
    return left_envelope_value(f, k, lam, k.conj_grad(ydual), solver)


def right_envelope_value(f, k, lam, y, search: SearchConfig) -> float:
    return right_envelope(
        ProxQuery(f, k, lam, np.atleast_1d(np.asarray(y, dtype=float)),
                  side="right"), search).env_value


def fd_gradient(func: Callable, y, h: float = 1e-5) -> dict:
    """Central-difference gradient with a Richardson consistency check.

    Per-coordinate step h * max(1, |y_i|); a second estimate at h/2 yields
    the extrapolated value and a spread that flags unreliable points (for
    instance when the step straddles a kink of the envelope).
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    m = y.size

    def central(step_scale):
        g = np.empty(m)
        for i in range(m):
            step = step_scale * max(1.0, abs(y[i]))
            e = np.zeros(m)
            e[i] = step
            g[i] = (func(y + e) - func(y - e)) / (2.0 * step)
        return g

    coarse = central(h)
    fine = central(h / 2.0)
    richardson = (4.0 * fine - coarse) / 3.0
    return {
        "grad": richardson,
        "coarse": coarse,
        "fine": fine,
        "spread": float(np.linalg.norm(fine - coarse)),
    }


def envelope_complement_convexity_check(
        f: ObjectiveFn, k: Kernel, lam: float, side: str,
        n_pairs: int, tol: float, box, seed: int = 0,
        solver: Optional[ProxSolver] = None,
        search: Optional[SearchConfig] = None) -> bool:
    """Midpoint convexity of the envelope complement at sampled pairs.

    side='left' checks g = (1/lam) conj - (lenv o conj_grad) over dual points
    (requires a supercoercive kernel); side='right' checks
    g = (1/lam) kernel - renv over primal points (requires full domain).
    A step size above the objective's prox-boundedness threshold is refused.
    """
    assert side in ("left", "right")
    thr = f.prox_bounded_threshold
    if thr is not None and lam > thr:
        raise DomainError(
            f"step size {lam} exceeds the prox-boundedness threshold {thr}")
    if side == "left":
        if not k.supercoercive:
            raise DomainError("left complement check needs a supercoercive kernel")
        assert solver is not None

        def g(y):
            return k.conj_value(y) / lam - composed_left_envelope_value(
                f, k, lam, y, solver)
    else:
        if not k.full_domain:
            raise DomainError("right complement check needs a full-domain kernel")
        assert search is not None

        def g(y):
            return k.value(y) / lam - right_envelope_value(f, k, lam, y, search)

    rng = np.random.default_rng(seed)
    box = [(float(lo), float(hi)) for lo, hi in box]
    m = len(box)
    for _ in range(n_pairs):
        a = np.array([rng.uniform(lo, hi) for lo, hi in box])
        b = np.array([rng.uniform(lo, hi) for lo, hi in box])
        ga, gb, gm = g(a), g(b), g(0.5 * (a + b))
        if not np.isfinite(ga) or not np.isfinite(gb) or not np.isfinite(gm):
            continue  # outside the effective domain of the complement
        if gm > 0.5 * (ga + gb) + tol:
            return False
    return True
