"""Numerical certification of prox-regularity relative to a Bregman kernel.

All certificates here are grid-based evidence, not proofs: each one records
the resolution and tolerance it was checked at.  Set indicators contribute
subgradient-graph samples through their ``boundary_pairs`` sampler, with
extra sample points accumulating geometrically at the reference point so
that violations confined to shrinking neighborhoods are still caught.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .divergence import bregman_batch
from .errors import DomainError
from .kernels import DOM_MARGIN, Kernel
from .objectives import ObjectiveFn, tilted
from .proxcore import ProxQuery, SearchConfig, left_envelope, tilt_transform_point


@dataclass
class ProximalSubgradientWitness:
    xbar: np.ndarray
    vbar: np.ndarray
    r: float
    eps: float
    kernel: str
    grid_resolution: float
    verified: bool
    violating_point: Optional[np.ndarray] = None
    violation: float = 0.0
    checked_points: int = 0


@dataclass
class RegularityCertificate:
    xbar: np.ndarray
    vbar: np.ndarray
    r: Optional[float]
    eps: float
    kernel: str
    attentive_band: float
    checked_pairs: int
    verified: bool
    violating_triple: Optional[tuple] = None
    diagnostics: dict = field(default_factory=dict)


def _ball_points(f: ObjectiveFn, k: Kernel, xbar, eps, resolution) -> np.ndarray:
    """Grid points of dom f within the eps-ball, plus curve samples that
    accumulate at xbar (geometric spacing down to 1e-9)."""
    m = k.dim
    lo_b, hi_b = k.interior_bounds(margin=max(DOM_MARGIN, 1e-9))
    if np.any(xbar - eps < lo_b) or np.any(xbar + eps > hi_b):
        raise DomainError("certification ball exits the kernel domain interior")
    n = max(int(math.ceil(2 * eps / resolution)) + 1, 3)
    axes = [np.linspace(xbar[i] - eps, xbar[i] + eps, n) for i in range(m)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.column_stack([g.ravel() for g in mesh])
    pts = pts[np.linalg.norm(pts - xbar, axis=1) <= eps]
    extra = [xbar.reshape(1, -1)]
    if f.curve is not None:
        t0 = float(xbar[0])
        ts = np.concatenate([t0 + np.geomspace(1e-12, eps, 80),
                             t0 - np.geomspace(1e-12, eps, 80)])
        ts = ts[(ts >= f.curve.tmin) & (ts <= f.curve.tmax)]
        if ts.size:
            cp = f.curve.point(ts)
            cp = cp[np.linalg.norm(cp - xbar, axis=1) <= eps]
            extra.append(cp)
    pts = np.vstack([pts] + extra)
    fin = np.isfinite(f.batch(pts))
    return pts[fin]


def certify_prox_subgradient(f: ObjectiveFn, k: Kernel, xbar, vbar,
                             r: float, eps: float, resolution: float,
                             tol: float = 1e-9) -> ProximalSubgradientWitness:
    """Grid check of f(x) >= f(xbar) + <vbar, x-xbar> - r D(x, xbar) on the ball."""
    xbar = np.atleast_1d(np.asarray(xbar, dtype=float))
    vbar = np.atleast_1d(np.asarray(vbar, dtype=float))
    fbar = f.value(xbar)
    if not np.isfinite(fbar):
        raise DomainError("f(xbar) must be finite")
    pts = _ball_points(f, k, xbar, eps, resolution)
    fv = f.batch(pts)
    lin = (pts - xbar) @ vbar
    dv = bregman_batch(k, pts, xbar)
    resid = fv - fbar - lin + r * dv  # must be >= -tol
    worst = int(np.argmin(resid))
    ok = bool(resid[worst] >= -tol)
    return ProximalSubgradientWitness(
        xbar=xbar, vbar=vbar, r=r, eps=eps, kernel=k.name,
        grid_resolution=resolution, verified=ok,
        violating_point=None if ok else pts[worst],
        violation=float(min(resid[worst], 0.0)),
        checked_points=pts.shape[0],
    )


def subgradient_prox_characterization_check(
        f: ObjectiveFn, k: Kernel, xbar, v, lam: float, tol: float,
        search: SearchConfig) -> bool:
    """xbar should be a global Bregman prox at the tilted base point, and the
    lower-support inequality with modulus 1/lam should hold box-wide."""
    xbar = np.atleast_1d(np.asarray(xbar, dtype=float))
    v = np.atleast_1d(np.asarray(v, dtype=float))
    z = tilt_transform_point(k, xbar, v, lam)
    res = left_envelope(ProxQuery(f, k, lam, z, side="left"), search)
    in_prox = any(np.linalg.norm(m - xbar) <= tol for m in res.minimizers)
    # box-wide inequality at r = 1/lam
    lo_b, hi_b = k.interior_bounds(margin=max(DOM_MARGIN, 1e-9))
    axes = []
    for i, (lo, hi) in enumerate(search.box):
        lo, hi = max(lo, lo_b[i]), min(hi, hi_b[i])
        n = max(int(math.ceil((hi - lo) / search.resolution)) + 1, 3)
        axes.append(np.linspace(lo, hi, n))
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.column_stack([g.ravel() for g in mesh])
    fv = f.batch(pts)
    fin = np.isfinite(fv)
    pts, fv = pts[fin], fv[fin]
    resid = fv - f.value(xbar) - (pts - xbar) @ v + bregman_batch(k, pts, xbar) / lam
    globally = bool(np.min(resid) >= -max(tol, 1e-9))
    return in_prox and globally


def _graph_samples(f: ObjectiveFn, xbar, vbar, eps, n: int) -> list:
    """(x, v) samples of the subdifferential graph in the attentive band."""
    pairs = []
    if f.boundary_pairs is not None:
        pairs.extend(f.boundary_pairs(xbar, eps, n))
    elif f.subgrad is not None:
        for t in np.concatenate([np.linspace(-eps, eps, n),
                                 np.geomspace(1e-9, eps, n // 2),
                                 -np.geomspace(1e-9, eps, n // 2)]):
            if f.dim == 1:
                x = xbar + np.array([t])
            else:
                # sample along each coordinate axis
                for i in range(f.dim):
                    x = xbar.copy()
                    x[i] += t
                    if np.isfinite(f.value(x)):
                        pairs.extend((x, g) for g in f.subgrad(x))
                continue
            if np.isfinite(f.value(x)):
                pairs.extend((x, g) for g in f.subgrad(x))
    else:
        raise DomainError("no subgradient oracle available for certification")
    # attentive filters: position, function value, subgradient proximity
    fbar = f.value(xbar)
    out = []
    for x, v in pairs:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        v = np.atleast_1d(np.asarray(v, dtype=float))
        fx = f.value(x)
        if (np.linalg.norm(x - xbar) <= eps and np.isfinite(fx) and
                abs(fx - fbar) <= eps and np.linalg.norm(v - vbar) <= eps):
            out.append((x, v, fx))
    return out


def certify_prox_regularity(f: ObjectiveFn, k: Kernel, xbar, vbar,
                            eps: float, resolution: float,
                            tol: float = 1e-9, n_graph: int = 60,
                            r_max: float = 2.0 ** 20) -> RegularityCertificate:
    """Two-point certification over the f-attentive band around (xbar, vbar).

    For every sampled subdifferential pair (x, v) in the band and every grid
    point x' of dom f in the ball, the inequality
    f(x') >= f(x) + <v, x'-x> - r D(x', x) must hold.  The modulus is taken
    from a doubling schedule {1, 2, 4, ..., 2^20}; the certificate reports
    the smallest passing value or a violating triple.
    """
    xbar = np.atleast_1d(np.asarray(xbar, dtype=float))
    vbar = np.atleast_1d(np.asarray(vbar, dtype=float))
    if f.subgrad_dist is not None and f.subgrad_dist(xbar, vbar) > max(tol, 1e-8):
        return RegularityCertificate(
            xbar=xbar, vbar=vbar, r=None, eps=eps, kernel=k.name,
            attentive_band=eps, checked_pairs=0, verified=False,
            diagnostics={"reason": "vbar is not a subgradient at xbar"})
    pairs = _graph_samples(f, xbar, vbar, eps, n_graph)
    if not pairs:
        raise DomainError("no subgradient samples found in the attentive band")
    pts = _ball_points(f, k, xbar, eps, resolution)
    fpts = f.batch(pts)

    # required modulus per pair: max over x' of (f(x)+<v,x'-x>-f(x')) / D(x',x)
    r_needed = 0.0
    worst_triple = None
    for x, v, fx in pairs:
        lin = (pts - x) @ v
        dv = bregman_batch(k, pts, x)
        gain = fx + lin - fpts  # amount the lower support exceeds f
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(dv > 0, gain / dv, np.where(gain > tol, np.inf, 0.0))
        idx = int(np.nanargmax(ratio))
        if ratio[idx] > r_needed:
            r_needed = float(ratio[idx])
            worst_triple = (pts[idx], x, v)
    r_cert = None
    r_pow = 1.0
    while r_pow <= r_max:
        if r_needed <= r_pow + tol:
            r_cert = r_pow
            break
        r_pow *= 2.0
    verified = r_cert is not None
    return RegularityCertificate(
        xbar=xbar, vbar=vbar, r=r_cert, eps=eps, kernel=k.name,
        attentive_band=eps, checked_pairs=len(pairs) * pts.shape[0],
        verified=verified,
        violating_triple=None if verified else worst_triple,
        diagnostics={"r_needed": r_needed, "n_graph_pairs": len(pairs),
                     "n_ball_points": pts.shape[0],
                     "resolution": resolution},
    )


def tilt_invariance_check(f: ObjectiveFn, k: Kernel, xbar, vbar,
                          eps: float, resolution: float) -> bool:
    """Certifying (f, vbar) and (f - <., vbar>, 0) must agree modulus-for-modulus."""
    a = certify_prox_regularity(f, k, xbar, vbar, eps, resolution)
    b = certify_prox_regularity(tilted(f, vbar), k, xbar,
                                np.zeros_like(np.atleast_1d(vbar), dtype=float),
                                eps, resolution)
    return a.verified == b.verified and (not a.verified or a.r == b.r)


def single_valuedness_scan(f: ObjectiveFn, k: Kernel, lam: float, ybar,
                           radius: float, samples: int, search: SearchConfig,
                           seed: int = 0, r: Optional[float] = None,
                           theta_bounds: Optional[tuple] = None) -> dict:
    """Oracle prox at random base points near ybar: single-valued fraction
    and empirical Lipschitz ratio, optionally compared against the
    very-strictly-convex bound Theta / (theta (1 - lam r))."""
    ybar = np.atleast_1d(np.asarray(ybar, dtype=float))
    rng = np.random.default_rng(seed)
    lo_b, hi_b = k.interior_bounds(margin=max(DOM_MARGIN, 1e-9))
    ys, xs = [], []
    n_single = 0
    for _ in range(samples):
        y = np.clip(ybar + rng.uniform(-radius, radius, size=k.dim), lo_b, hi_b)
        res = left_envelope(ProxQuery(f, k, lam, y, side="left"), search)
        ys.append(y)
        if not res.multivalued:
            n_single += 1
            xs.append((y, res.minimizers[0]))
    max_ratio = 0.0
    for i in range(len(xs)):
        for j in range(i + 1, len(xs)):
            dy = np.linalg.norm(xs[i][0] - xs[j][0])
            if dy > 1e-12:
                max_ratio = max(max_ratio,
                                float(np.linalg.norm(xs[i][1] - xs[j][1]) / dy))
    report = {
        "single_valued_fraction": n_single / samples,
        "max_lipschitz_ratio": max_ratio,
        "samples": samples,
    }
    if r is not None and theta_bounds is not None and lam * r < 1.0:
        theta, big_theta = theta_bounds
        report["lipschitz_bound"] = big_theta / (theta * (1.0 - lam * r))
        report["within_bound"] = max_ratio <= report["lipschitz_bound"] * (1 + 1e-6)
    return report


def lsmad_check(components, k: Kernel, L: float, region, samples: int,
                seed: int = 0, tol: float = 1e-9) -> bool:
    """Two-sided descent inequality |f(x)-f(y)-<grad f(y),x-y>| <= L D(x,y)
    at sampled pairs in the region, for every smooth component."""
    rng = np.random.default_rng(seed)
    region = [(float(lo), float(hi)) for lo, hi in region]
    m = k.dim
    X = np.column_stack([rng.uniform(lo, hi, samples) for lo, hi in region])
    Y = np.column_stack([rng.uniform(lo, hi, samples) for lo, hi in region])
    for comp in components:
        assert comp.grad is not None, "L-smad check needs component gradients"
        for x, y in zip(X, Y):
            d = float(bregman_batch(k, x.reshape(1, m), y)[0])
            lhs = abs(comp.value(x) - comp.value(y) - comp.grad(y) @ (x - y))
            if lhs > L * d + tol:
                return False
    return True
