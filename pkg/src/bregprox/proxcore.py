"""Reference (oracle) evaluation of Bregman proximal mappings and envelopes.

The oracle is a global grid search over a configured box followed by local
polish (golden-section in 1-D, coordinate descent with golden-section line
searches in 2-D).  It is deliberately brute force: the prox subproblem is
nonconvex and possibly multivalued, and the oracle must find *all* global
minimizers at desk scale, not just one.

Thin feasible sets (segments, graphs) are handled through the objective's
curve parameterization: the search then runs over the 1-D parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .divergence import bregman, bregman_batch
from .errors import CrossCheckFailure, DomainError, NotProxBounded
from .kernels import DOM_MARGIN, Kernel
from .objectives import ObjectiveFn, compose_conj_grad, tilted

GOLD = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SearchConfig:
    """Oracle search parameters.

    box: per-coordinate (lo, hi) search intervals (or the curve-parameter
    interval when the objective carries a curve).  resolution: grid spacing.
    """

    box: Sequence
    resolution: float = 1e-3
    value_tol: float = 1e-6
    point_tol: float = 1e-6
    floor: float = -1e12
    polish_iters: int = 45

    def axes(self, lo_bounds, hi_bounds):
        axes = []
        for (lo, hi), blo, bhi in zip(self.box, lo_bounds, hi_bounds):
            lo = max(lo, blo)
            hi = min(hi, bhi)
            if not lo < hi:
                raise DomainError("search box does not meet the kernel domain")
            n = max(int(math.ceil((hi - lo) / self.resolution)) + 1, 3)
            axes.append(np.linspace(lo, hi, n))
        return axes


@dataclass(frozen=True)
class ProxQuery:
    f: ObjectiveFn
    kernel: Kernel
    lam: float
    base: np.ndarray
    side: str = "left"

    def __post_init__(self):
        assert self.lam > 0, "lambda must be positive"
        assert self.side in ("left", "right")
        object.__setattr__(self, "base",
                           np.atleast_1d(np.asarray(self.base, dtype=float)))


@dataclass
class ProxResult:
    minimizers: List[np.ndarray]
    env_value: float
    multivalued: bool
    diagnostics: dict = field(default_factory=dict)

    @property
    def point(self) -> np.ndarray:
        """The unique minimizer; asserts single-valuedness."""
        assert len(self.minimizers) == 1, "prox is multivalued here"
        return self.minimizers[0]


# ---------------------------------------------------------------------------
# search machinery
# ---------------------------------------------------------------------------


def _golden(obj, lo, hi, iters):
    """Golden-section minimization of a scalar function on [lo, hi]."""
    a, b = lo, hi
    c = b - GOLD * (b - a)
    d = a + GOLD * (b - a)
    fc, fd = obj(c), obj(d)
    for _ in range(iters):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - GOLD * (b - a)
            fc = obj(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLD * (b - a)
            fd = obj(d)
    x = c if fc <= fd else d
    return x, min(fc, fd)


def _golden_recentered(obj1d, center, lo_bound, hi_bound, resolution, iters):
    """Golden search on a moving bracket; recenters while the minimum keeps
    landing near a bracket edge (the nearest local minimum may sit outside
    the initial window around a coarse grid candidate)."""
    c = center
    for _ in range(25):
        lo = max(c - 2 * resolution, lo_bound)
        hi = min(c + 2 * resolution, hi_bound)
        t, v = _golden(obj1d, lo, hi, iters)
        edge = 0.05 * (hi - lo)
        if t - lo > edge and hi - t > edge:
            return t, v
        c = t
    return t, v


def _snap_to_zero(obj, x, v, lo_bounds, hi_bounds):
    """Propose zeroing near-zero coordinates (objectives with a cusp at the
    origin beat any golden-section iterate there); accept if it helps."""
    near = np.abs(x) < 1e-3
    if not np.any(near) or np.all(x == 0.0) \
            or np.any(lo_bounds[near] > 0.0) or np.any(hi_bounds[near] < 0.0):
        return x, v
    xs = np.where(near, 0.0, x)
    vs = obj(xs)
    return (xs, vs) if vs < v else (x, v)


def _polish(obj, x0, lo_bounds, hi_bounds, resolution, iters):
    """Local refinement around a grid candidate; returns (point, value)."""
    x = np.array(x0, dtype=float)
    m = x.size
    if m == 1:
        t, v = _golden_recentered(lambda s: obj(np.array([s])), x[0],
                                  lo_bounds[0], hi_bounds[0], resolution, iters)
        return _snap_to_zero(obj, np.array([t]), v,
                             np.asarray(lo_bounds, dtype=float),
                             np.asarray(hi_bounds, dtype=float))
    # coordinate descent with golden-section line searches, shrinking brackets
    best = obj(x)
    width = 2 * resolution
    sweeps = max(iters // (2 * m), 6)
    for _ in range(sweeps):
        for i in range(m):
            def line(s, i=i):
                xt = x.copy()
                xt[i] = s
                return obj(xt)

            t, v = _golden_recentered(line, x[i], lo_bounds[i], hi_bounds[i],
                                      width / 2.0 if width > resolution
                                      else resolution, 40)
            if v < best:
                x[i], best = t, v
        width = max(width * 0.5, 1e-12)
    return _snap_to_zero(obj, x, best, np.asarray(lo_bounds, dtype=float),
                         np.asarray(hi_bounds, dtype=float))


def _cell_variation(V):
    """Per-cell maximum absolute difference to axis neighbors (+inf next to
    infinite cells, so domain-boundary cells stay candidates)."""
    var = np.zeros_like(V)
    for ax in range(V.ndim):
        if V.shape[ax] < 2:
            continue
        with np.errstate(invalid="ignore"):
            d = np.abs(np.diff(V, axis=ax))
        d = np.where(np.isnan(d), np.inf, d)
        var = np.maximum(var, np.concatenate(
            [d, np.take(d, [-1], axis=ax)], axis=ax))
        var = np.maximum(var, np.concatenate(
            [np.take(d, [0], axis=ax), d], axis=ax))
    return var


def _cluster_candidates(pts, vals, resolution):
    """Greedy clustering of near-optimal grid points by spatial adjacency."""
    order = np.argsort(vals)
    reps = []
    for idx in order:
        p = pts[idx]
        if all(np.max(np.abs(p - r)) > 2.5 * resolution for r in reps):
            reps.append(p)
    return reps


def _dedupe(minimizers, values, point_tol):
    order = np.argsort(values)
    kept_pts, kept_vals = [], []
    for idx in order:
        p = minimizers[idx]
        if all(np.linalg.norm(p - q) > point_tol for q in kept_pts):
            kept_pts.append(p)
            kept_vals.append(values[idx])
    return kept_pts, kept_vals


def _global_minimize(obj, obj_batch, search: SearchConfig,
                     lo_bounds, hi_bounds) -> ProxResult:
    """Grid + polish global search of a scalar objective over a box."""
    axes = search.axes(lo_bounds, hi_bounds)
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.column_stack([m.ravel() for m in mesh])
    vals = obj_batch(pts)
    finite = np.isfinite(vals)
    if not np.any(finite):
        raise DomainError("objective is +inf on the whole search grid")
    gmin = float(np.min(vals[finite]))
    if gmin < search.floor:
        raise NotProxBounded(
            f"objective reaches {gmin:.3e} below floor {search.floor:.3e}; "
            "not prox-bounded at this step size")
    window = max(search.value_tol * 10.0, 1e-12 * (1 + abs(gmin)))
    # a cell can hide a minimum roughly its neighbor variation below its own
    # value (steep cusps dip far below the surrounding grid values), so the
    # candidate test subtracts the local variation before applying the window
    var = _cell_variation(vals.reshape([len(a) for a in axes]))
    with np.errstate(invalid="ignore"):
        near = finite & (vals - var.ravel() <= gmin + window)
    reps = _cluster_candidates(pts[near], vals[near], search.resolution)
    if len(reps) > 80:
        reps = reps[:80]

    polished_pts, polished_vals = [], []
    for rep in reps:
        x, v = _polish(obj, rep, lo_bounds, hi_bounds,
                       search.resolution, search.polish_iters)
        polished_pts.append(x)
        polished_vals.append(v)
    best = min(polished_vals)
    if best < search.floor:
        raise NotProxBounded("polished objective fell below the floor")
    keep = [i for i, v in enumerate(polished_vals) if v <= best + search.value_tol]
    minimizers, values = _dedupe([polished_pts[i] for i in keep],
                                 [polished_vals[i] for i in keep],
                                 search.point_tol)
    return ProxResult(
        minimizers=minimizers,
        env_value=best,
        multivalued=len(minimizers) > 1,
        diagnostics={"grid_min": gmin, "n_grid": pts.shape[0],
                     "n_candidates": len(reps)},
    )


def _curve_minimize(f: ObjectiveFn, obj_point, search: SearchConfig) -> ProxResult:
    """Search along the objective's 1-D curve parameterization."""
    curve = f.curve
    lo = max(search.box[0][0], curve.tmin) if search.box else curve.tmin
    hi = min(search.box[0][1], curve.tmax) if search.box else curve.tmax

    def obj_t(t):
        return obj_point(curve.point(float(t[0]) if np.ndim(t) else float(t)))

    def obj_t_batch(T):
        pts = curve.point(T.ravel())
        return np.array([obj_point(p) for p in pts])

    res = _global_minimize(obj_t, obj_t_batch, SearchConfig(
        box=[(lo, hi)], resolution=search.resolution,
        value_tol=search.value_tol, point_tol=search.point_tol,
        floor=search.floor, polish_iters=search.polish_iters),
        np.array([-np.inf]), np.array([np.inf]))
    res.minimizers = [curve.point(float(t[0])) for t in res.minimizers]
    res.minimizers, _ = _dedupe(res.minimizers,
                                [res.env_value] * len(res.minimizers),
                                search.point_tol)
    res.multivalued = len(res.minimizers) > 1
    return res


# ---------------------------------------------------------------------------
# public oracle operations
# ---------------------------------------------------------------------------


def left_envelope(q: ProxQuery, search: SearchConfig) -> ProxResult:
    """Global value and minimizer set of x -> f(x) + (1/lam) D(x, base)."""
    assert q.side == "left"
    k, y, lam, f = q.kernel, q.base, q.lam, q.f
    if not k.dom_interior(y):
        raise DomainError("left prox base point must be interior to dom phi")

    def obj(x):
        fx = f.value(x)
        if not np.isfinite(fx):
            return math.inf
        d = bregman(k, x, y)
        return fx + d / lam

    if f.curve is not None:
        return _curve_minimize(f, obj, search)

    def obj_batch(X):
        inmask = k.dom_interior_batch(X)
        out = np.full(X.shape[0], np.inf)
        if np.any(inmask):
            Xi = X[inmask]
            out[inmask] = f.batch(Xi) + bregman_batch(k, Xi, y) / lam
        return out

    lo_b, hi_b = k.interior_bounds(margin=max(DOM_MARGIN, 1e-9))
    return _global_minimize(obj, obj_batch, search, lo_b, hi_b)


def right_envelope(q: ProxQuery, search: SearchConfig,
                   cross_tol: float = 1e-6) -> ProxResult:
    """Global value/minimizers of x -> f(x) + (1/lam) D(base, x).

    Computed two independent ways -- direct search, and via the dual-space
    identity (minimize (f o conj_grad) against the conjugate kernel at
    grad(base), then map minimizers back) -- and cross-checked.
    """
    assert q.side == "right"
    k, y, lam, f = q.kernel, q.base, q.lam, q.f
    if not k.full_domain:
        raise DomainError("right prox requires a kernel with full domain")

    # (a) direct
    def obj(x):
        fx = f.value(x)
        if not np.isfinite(fx):
            return math.inf
        return fx + bregman(k, y, x) / lam

    def obj_batch(X):
        out = np.full(X.shape[0], np.inf)
        fX = f.batch(X)
        fin = np.isfinite(fX)
        if np.any(fin):
            Xi = X[fin]
            G = k.grad_batch(Xi)
            d = k.value(y) - k.value_batch(Xi) - np.sum(G * (y - Xi), axis=1)
            out[fin] = fX[fin] + d / lam
        return out

    lo_b, hi_b = k.interior_bounds(margin=max(DOM_MARGIN, 1e-9))
    if f.curve is not None:
        direct = _curve_minimize(f, obj, search)
    else:
        direct = _global_minimize(obj, obj_batch, search, lo_b, hi_b)

    # (b) translation through the conjugate kernel
    fdual = compose_conj_grad(f, k)
    kdual = k.conjugate()
    ydual = k.grad(y)
    dual_box = _map_box(k, search.box) if fdual.curve is None else search.box
    # keep the dual grid density comparable to the primal one: the gradient
    # map can stretch the box arbitrarily (polish restores local accuracy)
    stretch = max(
        (dhi - dlo) / max(phi_ - plo, 1e-300)
        for (dlo, dhi), (plo, phi_) in zip(dual_box, search.box))
    dual_search = SearchConfig(
        box=dual_box, resolution=search.resolution * max(stretch, 1.0),
        value_tol=search.value_tol, point_tol=search.point_tol,
        floor=search.floor, polish_iters=search.polish_iters)
    dual = left_envelope(
        ProxQuery(fdual, kdual, lam, ydual, side="left"), dual_search)
    mapped = [k.conj_grad(z) for z in dual.minimizers]

    if abs(direct.env_value - dual.env_value) > cross_tol:
        raise CrossCheckFailure(
            f"right envelope paths disagree: direct {direct.env_value!r} "
            f"vs translated {dual.env_value!r}")
    if not _sets_match(direct.minimizers, mapped, max(10 * search.point_tol, 1e-5)):
        raise CrossCheckFailure("right prox minimizer sets disagree between paths")

    direct.diagnostics["translated_env"] = dual.env_value
    direct.diagnostics["translated_minimizers"] = mapped
    direct.diagnostics["dual_minimizers"] = dual.minimizers
    return direct


def _map_box(k: Kernel, box):
    """Push a primal box through the coordinate-wise monotone gradient."""
    lo_b, hi_b = k.interior_bounds(margin=max(DOM_MARGIN, 1e-9))
    out = []
    for i, (lo, hi) in enumerate(box):
        lo = max(lo, lo_b[i])
        hi = min(hi, hi_b[i])
        a = float(k.components[i].grad(lo))
        b = float(k.components[i].grad(hi))
        out.append((min(a, b), max(a, b)))
    return out


def _sets_match(setA, setB, tol) -> bool:
    if len(setA) != len(setB):
        return False
    used = [False] * len(setB)
    for a in setA:
        hit = False
        for j, b in enumerate(setB):
            if not used[j] and np.linalg.norm(a - b) <= tol:
                used[j] = True
                hit = True
                break
        if not hit:
            return False
    return True


def prox(q: ProxQuery, search: SearchConfig) -> ProxResult:
    """Dispatch to the left or right oracle per the query side."""
    if q.side == "left":
        return left_envelope(q, search)
    return right_envelope(q, search)


def tilt_transform_point(k: Kernel, y, v, lam: float) -> np.ndarray:
    """The tilted base point conj_grad(grad(y) + lam * v)."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    v = np.atleast_1d(np.asarray(v, dtype=float))
    z_dual = k.grad(y) + lam * v
    if not k.conj_dom_interior(z_dual):
        raise DomainError("tilted dual point leaves int(dom conj)")
    return k.conj_grad(z_dual)


def tilt_identity_check(f: ObjectiveFn, k: Kernel, y, v, lam: float,
                        tol: float, search: SearchConfig) -> bool:
    """Check that tilting the objective equals translating the base point.

    Tilted problem: minimize f(x) - <v,x> + (1/lam) D(x, y).  Translated
    problem: minimize f(x) + (1/lam) D(x, z) with z the tilted base point.
    Minimizer sets must coincide and the envelope values must satisfy
    lenv_tilted(y) = lenv(z) + (1/lam) D(z, y) - <v, z>.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    v = np.atleast_1d(np.asarray(v, dtype=float))
    z = tilt_transform_point(k, y, v, lam)
    lhs = left_envelope(ProxQuery(tilted(f, v), k, lam, y, side="left"), search)
    rhs = left_envelope(ProxQuery(f, k, lam, z, side="left"), search)
    if not _sets_match(lhs.minimizers, rhs.minimizers, max(10 * search.point_tol, 1e-5)):
        return False
    env_rhs = rhs.env_value + bregman(k, z, y) / lam - float(v @ z)
    return abs(lhs.env_value - env_rhs) <= tol


def prox_bounded_estimate(f: ObjectiveFn, k: Kernel, lambdas, probe,
                          floor: float = -1e12, n_per_axis: int = 801,
                          stab_rtol: float = 1e-3) -> dict:
    """Estimate the step-size threshold below which the envelope is finite.

    For each candidate step size, samples the infimum of f + (1/lam) * phi
    over an expanding sequence of boxes around the probe point; the step
    size passes when the infimum stabilizes (stops decreasing) above the
    floor.  Also reports the sampled liminf of f/phi at large norms when
    the kernel has full domain.
    """
    probe = np.atleast_1d(np.asarray(probe, dtype=float))
    if not k.dom_interior(probe):
        raise DomainError("probe point must be interior")
    lo_b, hi_b = k.interior_bounds(margin=max(DOM_MARGIN, 1e-9))
    m = k.dim
    n = n_per_axis if m == 1 else max(int(math.sqrt(n_per_axis)) * 4, 101)

    def sample_inf(lam, half_width):
        axes = [np.linspace(max(probe[i] - half_width, lo_b[i]),
                            min(probe[i] + half_width, hi_b[i]), n)
                for i in range(m)]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.column_stack([g.ravel() for g in mesh])
        vals = f.batch(pts) + k.value_batch(pts) / lam
        vals = vals[np.isfinite(vals)]
        return float(np.min(vals)) if vals.size else math.inf

    per_lambda = []
    lambda_hat = None
    for lam in sorted(lambdas):
        infs = [sample_inf(lam, w) for w in (5.0, 20.0, 80.0)]
        stable = (infs[-1] > floor and
                  infs[-1] >= infs[-2] - stab_rtol * (1.0 + abs(infs[-2])))
        per_lambda.append({"lam": float(lam), "infima": infs, "bounded": stable})
        if stable:
            lambda_hat = float(lam)
    if lambda_hat is None:
        lambda_hat = float(min(lambdas)) / 2.0
    elif lambda_hat == float(max(lambdas)) and all(r["bounded"] for r in per_lambda):
        lambda_hat = math.inf

    liminf_ratio = None
    if k.full_domain:
        ratios = []
        radius = 200.0
        if m == 1:
            shell = np.array([[-radius], [radius]])
        else:
            ang = np.linspace(0, 2 * math.pi, 64, endpoint=False)
            shell = radius * np.column_stack([np.cos(ang), np.sin(ang)])
            shell = shell[:, :m] if m <= 2 else shell
        fv = f.batch(shell)
        pv = k.value_batch(shell)
        ok = np.isfinite(fv) & (pv > 0)
        if np.any(ok):
            liminf_ratio = float(np.min(fv[ok] / pv[ok]))

    return {"lambda_hat": lambda_hat, "liminf_ratio": liminf_ratio,
            "per_lambda": per_lambda}
