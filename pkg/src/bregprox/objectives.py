"""Catalog of extended-real objective functions with subgradient oracles.

An ``ObjectiveFn`` bundles the pieces the oracle, the certifiers and the
solvers need: pointwise and batched values, a set-valued subgradient sample,
a closed-form distance to the subdifferential, and (for indicator functions
of thin sets) a curve parameterization the grid oracle can search along.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .kernels import Kernel


@dataclass(frozen=True)
class Curve:
    """1-D parameterization t -> point of a thin feasible set."""

    tmin: float
    tmax: float
    point: Callable  # t (scalar or array) -> point(s), shape (m,) or (N, m)


@dataclass(frozen=True)
class ObjectiveFn:
    """Extended-real objective f with optional differential structure.

    ``subgrad(x)`` returns a finite sample of subgradient vectors (possibly
    empty where the subdifferential is empty).  ``subgrad_dist(x, v)`` is the
    exact distance from v to the full subdifferential at x, when a closed
    form exists.  ``boundary_pairs(xbar, eps, n)`` samples (x, v) pairs from
    the subdifferential graph near ``xbar`` -- used for set indicators where
    no pointwise subgradient oracle makes sense.
    """

    name: str
    dim: int
    value: Callable  # point -> float (inf outside dom f)
    value_batch: Optional[Callable] = None  # (N, m) -> (N,)
    subgrad: Optional[Callable] = None  # point -> list of vectors
    subgrad_dist: Optional[Callable] = None  # (point, vector) -> float
    grad: Optional[Callable] = None  # point -> vector, where f is smooth
    dom_predicate: Optional[Callable] = None
    prox_bounded_threshold: Optional[float] = None
    boundary_pairs: Optional[Callable] = None
    curve: Optional[Curve] = None
    # argmin_u f(u) + (1/(2t)) |u - w|^2, where a closed form exists
    prox_classical: Optional[Callable] = None  # (w, t) -> point

    def __call__(self, x) -> float:
        return self.value(x)

    def batch(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if self.value_batch is not None:
            return np.asarray(self.value_batch(X), dtype=float)
        return np.array([self.value(row) for row in X], dtype=float)

    def in_dom(self, x) -> bool:
        if self.dom_predicate is not None:
            return bool(self.dom_predicate(np.atleast_1d(np.asarray(x, dtype=float))))
        return bool(np.isfinite(self.value(x)))


def _as_point(x, dim):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    assert x.shape == (dim,), f"expected dim {dim}, got {x.shape}"
    return x


# ---------------------------------------------------------------------------
# power family  f(x) = (1/p) sum |x_i|^p,  0 < p < 1
# ---------------------------------------------------------------------------


def power_lp(p: float, dim: int = 1) -> ObjectiveFn:
    assert 0 < p < 1, "power objective needs p in ]0,1["

    def value(x):
        x = _as_point(x, dim)
        return float(np.sum(np.abs(x) ** p) / p)

    def value_batch(X):
        return np.sum(np.abs(X) ** p, axis=1) / p

    def subgrad(x):
        x = _as_point(x, dim)
        if np.any(x == 0.0):
            # at 0 the scalar subdifferential is all of R; sample the zero vector
            g = np.where(x == 0.0, 0.0, np.sign(x) * np.abs(x) ** (p - 1.0))
            return [g]
        return [np.sign(x) * np.abs(x) ** (p - 1.0)]

    def subgrad_dist(x, v):
        # coordinates at 0 contribute nothing: the scalar subdifferential
        # there is all of R (the slope |x|^{p-1} blows up from both sides)
        x = _as_point(x, dim)
        v = _as_point(v, dim)
        nz = x != 0.0
        diff = v[nz] - np.sign(x[nz]) * np.abs(x[nz]) ** (p - 1.0)
        return float(np.linalg.norm(diff))

    return ObjectiveFn(
        name=f"power_lp(p={p:g},dim={dim})",
        dim=dim,
        value=value,
        value_batch=value_batch,
        subgrad=subgrad,
        subgrad_dist=subgrad_dist,
        prox_bounded_threshold=math.inf,  # f >= 0 everywhere
    )


def scaled_abs(c: float, dim: int = 1) -> ObjectiveFn:
    """f(x) = c * sum |x_i|, c > 0."""
    assert c > 0

    def value(x):
        return float(c * np.sum(np.abs(_as_point(x, dim))))

    def subgrad_dist(x, v):
        x = _as_point(x, dim)
        v = _as_point(v, dim)
        per = np.where(x == 0.0,
                       np.maximum(np.abs(v) - c, 0.0),
                       np.abs(v - c * np.sign(x)))
        return float(np.linalg.norm(per))

    return ObjectiveFn(
        name=f"scaled_abs(c={c:g},dim={dim})",
        dim=dim,
        value=value,
        value_batch=lambda X: c * np.sum(np.abs(X), axis=1),
        subgrad=lambda x: [c * np.sign(_as_point(x, dim))],
        subgrad_dist=subgrad_dist,
        prox_bounded_threshold=math.inf,
        # soft thresholding
        prox_classical=lambda w, t: np.sign(w) * np.maximum(
            np.abs(np.asarray(w, dtype=float)) - t * c, 0.0),
    )


def neg_quadratic(a: float = 0.5, dim: int = 1) -> ObjectiveFn:
    """f(x) = -a |x|^2 (prox-bounded threshold 1/(2a) against (1/2)|x|^2)."""
    assert a > 0

    def value(x):
        return float(-a * np.sum(np.square(_as_point(x, dim))))

    return ObjectiveFn(
        name=f"neg_quadratic(a={a:g},dim={dim})",
        dim=dim,
        value=value,
        value_batch=lambda X: -a * np.sum(np.square(X), axis=1),
        grad=lambda x: -2.0 * a * _as_point(x, dim),
        subgrad=lambda x: [-2.0 * a * _as_point(x, dim)],
        subgrad_dist=lambda x, v: float(
            np.linalg.norm(_as_point(v, dim) + 2.0 * a * _as_point(x, dim))),
        prox_bounded_threshold=1.0 / (2.0 * a),
    )


def zero_objective(dim: int = 1) -> ObjectiveFn:
    return ObjectiveFn(
        name=f"zero(dim={dim})",
        dim=dim,
        value=lambda x: 0.0,
        value_batch=lambda X: np.zeros(np.asarray(X).shape[0]),
        grad=lambda x: np.zeros(dim),
        subgrad=lambda x: [np.zeros(dim)],
        subgrad_dist=lambda x, v: float(np.linalg.norm(_as_point(v, dim))),
        prox_bounded_threshold=math.inf,
        prox_classical=lambda w, t: np.array(w, dtype=float),
    )


def linear_objective(a, dim: int | None = None) -> ObjectiveFn:
    a = np.atleast_1d(np.asarray(a, dtype=float))
    dim = dim or a.size

    return ObjectiveFn(
        name="linear",
        dim=dim,
        value=lambda x: float(a @ _as_point(x, dim)),
        value_batch=lambda X: np.asarray(X) @ a,
        grad=lambda x: a.copy(),
        subgrad=lambda x: [a.copy()],
        subgrad_dist=lambda x, v: float(np.linalg.norm(_as_point(v, dim) - a)),
        prox_bounded_threshold=math.inf,
        prox_classical=lambda w, t: np.asarray(w, dtype=float) - t * a,
    )


def quadratic_lsq(B, b, mu: float = 1.0) -> ObjectiveFn:
    """g(u) = (mu/2) |B u - b|^2."""
    B = np.asarray(B, dtype=float)
    b = np.asarray(b, dtype=float)
    dim = B.shape[1]

    def value(u):
        u = _as_point(u, dim)
        return float(0.5 * mu * np.sum(np.square(B @ u - b)))

    def grad(u):
        u = _as_point(u, dim)
        return mu * (B.T @ (B @ u - b))

    return ObjectiveFn(
        name=f"quadratic_lsq(mu={mu:g})",
        dim=dim,
        value=value,
        value_batch=lambda U: 0.5 * mu * np.sum(np.square(U @ B.T - b), axis=1),
        grad=grad,
        subgrad=lambda u: [grad(u)],
        subgrad_dist=lambda u, v: float(np.linalg.norm(_as_point(v, dim) - grad(u))),
        prox_bounded_threshold=math.inf,
        # (I + t mu B^T B)^{-1} (w + t mu B^T b)
        prox_classical=lambda w, t: np.linalg.solve(
            np.eye(dim) + t * mu * B.T @ B,
            np.asarray(w, dtype=float) + t * mu * B.T @ b),
    )


# ---------------------------------------------------------------------------
# indicator functions
# ---------------------------------------------------------------------------


def box_indicator(lo, hi) -> ObjectiveFn:
    """Indicator of the box prod [lo_i, hi_i]; 1-D intervals included."""
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    assert lo.shape == hi.shape and np.all(lo <= hi)
    dim = lo.size
    atol = 1e-12

    def inside(x):
        return np.all(x >= lo - atol) and np.all(x <= hi + atol)

    def value(x):
        return 0.0 if inside(_as_point(x, dim)) else math.inf

    def value_batch(X):
        X = np.asarray(X, dtype=float)
        ok = np.all((X >= lo - atol) & (X <= hi + atol), axis=1)
        return np.where(ok, 0.0, np.inf)

    def subgrad_dist(x, v):
        # distance from v to the normal cone of the box at x
        x = _as_point(x, dim)
        v = _as_point(v, dim)
        if not inside(x):
            return math.inf
        per = np.empty(dim)
        for i in range(dim):
            at_lo = abs(x[i] - lo[i]) <= atol
            at_hi = abs(x[i] - hi[i]) <= atol
            vi = v[i]
            if at_lo and at_hi:
                per[i] = 0.0  # degenerate coordinate: normal cone is R
            elif at_lo:
                per[i] = max(vi, 0.0)  # cone is (-inf, 0]
            elif at_hi:
                per[i] = max(-vi, 0.0)  # cone is [0, inf)
            else:
                per[i] = abs(vi)
        return float(np.linalg.norm(per))

    def subgrad(x):
        return [np.zeros(dim)] if inside(_as_point(x, dim)) else []

    return ObjectiveFn(
        name=f"box_indicator({lo.tolist()},{hi.tolist()})",
        dim=dim,
        value=value,
        value_batch=value_batch,
        subgrad=subgrad,
        subgrad_dist=subgrad_dist,
        dom_predicate=lambda x: inside(np.atleast_1d(np.asarray(x, dtype=float))),
        prox_bounded_threshold=math.inf,
        prox_classical=lambda w, t: np.clip(np.asarray(w, dtype=float), lo, hi),
    )


def interval_indicator(lo: float, hi: float) -> ObjectiveFn:
    return box_indicator([lo], [hi])


def nonpositive_indicator(dim: int = 1) -> ObjectiveFn:
    return box_indicator([-math.inf] * dim, [0.0] * dim)


def singleton_indicator(point) -> ObjectiveFn:
    point = np.atleast_1d(np.asarray(point, dtype=float))
    dim = point.size
    atol = 1e-12

    def value(x):
        return 0.0 if np.allclose(_as_point(x, dim), point, atol=atol) else math.inf

    return ObjectiveFn(
        name=f"singleton_indicator({point.tolist()})",
        dim=dim,
        value=value,
        value_batch=lambda X: np.where(
            np.all(np.abs(np.asarray(X) - point) <= atol, axis=1), 0.0, np.inf),
        # normal cone at the point is all of R^m
        subgrad_dist=lambda x, v: 0.0 if np.allclose(
            _as_point(x, dim), point, atol=atol) else math.inf,
        dom_predicate=lambda x: bool(np.allclose(x, point, atol=atol)),
        prox_bounded_threshold=math.inf,
        curve=Curve(0.0, 1.0, lambda t: np.broadcast_to(
            point, (np.atleast_1d(t).size, dim)).copy()
            if np.ndim(t) else point.copy()),
    )


def segment_indicator(a, b) -> ObjectiveFn:
    """Indicator of the segment {a + t (b - a) : t in [0,1]}."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    dim = a.size
    d = b - a
    atol = 1e-9

    def project_t(x):
        return float(np.clip((x - a) @ d / (d @ d), 0.0, 1.0))

    def value(x):
        x = _as_point(x, dim)
        t = project_t(x)
        return 0.0 if np.linalg.norm(x - (a + t * d)) <= atol else math.inf

    def curve_point(t):
        t = np.asarray(t, dtype=float)
        if t.ndim == 0:
            return a + float(t) * d
        return a[None, :] + t[:, None] * d[None, :]

    return ObjectiveFn(
        name="segment_indicator",
        dim=dim,
        value=value,
        value_batch=lambda X: np.array([value(row) for row in np.asarray(X)]),
        dom_predicate=lambda x: bool(np.isfinite(value(x))),
        prox_bounded_threshold=math.inf,
        curve=Curve(0.0, 1.0, curve_point),
    )


def epigraph_indicator(h: Callable, h_grad: Callable, name: str = "epigraph") -> ObjectiveFn:
    """Indicator of epi(h) = {(t, s) : s >= h(t)} for a C^1 function h on R.

    ``boundary_pairs`` samples (x, v) from the subdifferential graph: points
    x = (t, h(t)) on the boundary with outward normals v = s (h'(t), -1),
    s >= 0, plus interior points with v = 0.
    """

    def value(x):
        x = _as_point(x, 2)
        return 0.0 if x[1] >= h(x[0]) - 1e-12 else math.inf

    def value_batch(X):
        X = np.asarray(X, dtype=float)
        return np.where(X[:, 1] >= h(X[:, 0]) - 1e-12, 0.0, np.inf)

    def subgrad(x):
        x = _as_point(x, 2)
        if x[1] > h(x[0]) + 1e-12:
            return [np.zeros(2)]
        if x[1] < h(x[0]) - 1e-12:
            return []
        gp = float(h_grad(x[0]))
        return [np.zeros(2)] + [s * np.array([gp, -1.0]) for s in (0.5, 1.0, 2.0)]

    def subgrad_dist(x, v):
        x = _as_point(x, 2)
        v = _as_point(v, 2)
        if x[1] > h(x[0]) + 1e-12:
            return float(np.linalg.norm(v))
        if x[1] < h(x[0]) - 1e-12:
            return math.inf
        n = np.array([float(h_grad(x[0])), -1.0])
        s = max((v @ n) / (n @ n), 0.0)  # projection onto the normal ray
        return float(np.linalg.norm(v - s * n))

    def boundary_pairs(xbar, eps, n):
        xbar = _as_point(xbar, 2)
        t0 = xbar[0]
        # uniform parameter samples plus log-spaced ones accumulating at t0,
        # so violations in shrinking neighborhoods of the reference point
        # are not missed by grid resolution
        ts = np.concatenate([
            np.array([t0]),
            np.linspace(t0 - eps, t0 + eps, n),
            t0 + np.geomspace(1e-12, eps, n // 2),
            t0 - np.geomspace(1e-12, eps, n // 2),
        ])
        pairs = []
        for t in ts:
            x = np.array([t, float(h(t))])
            gp = float(h_grad(t))
            nvec = np.array([gp, -1.0])
            nvec = nvec / np.linalg.norm(nvec)
            for s in (0.5, 1.0, 2.0):
                pairs.append((x, s * nvec))
        return pairs

    return ObjectiveFn(
        name=name,
        dim=2,
        value=value,
        value_batch=value_batch,
        subgrad=subgrad,
        subgrad_dist=subgrad_dist,
        dom_predicate=lambda x: bool(np.isfinite(value(x))),
        prox_bounded_threshold=math.inf,
        boundary_pairs=boundary_pairs,
        curve=Curve(-10.0, 10.0, lambda t: np.column_stack(
            [np.atleast_1d(t), h(np.atleast_1d(t))])
            if np.ndim(t) else np.array([t, float(h(t))])),
    )


def curved_example() -> tuple:
    """The reference nonconvex boundary h(t) = 2 t^2 - 3 |t|^1.1 and epi(h).

    h is C^1 (the 1.1-power term has zero slope at 0) with a dent at the
    origin that is too sharp for quadratic lower support.
    """

    def h(t):
        t = np.asarray(t, dtype=float)
        return 2.0 * np.square(t) - 3.0 * np.abs(t) ** 1.1

    def h_grad(t):
        t = np.asarray(t, dtype=float)
        return 4.0 * t - 3.3 * np.sign(t) * np.abs(t) ** 0.1

    return h, h_grad, epigraph_indicator(h, h_grad, name="dented_epigraph")


def dent_residual() -> ObjectiveFn:
    """The smooth map F(x1, x2) = 2 x1^2 - 3|x1|^1.1 - x2 (C^1 on R^2)."""
    h, h_grad, _ = curved_example()

    def value(x):
        x = _as_point(x, 2)
        return float(h(x[0]) - x[1])

    def grad(x):
        x = _as_point(x, 2)
        return np.array([float(h_grad(x[0])), -1.0])

    return ObjectiveFn(
        name="dent_residual",
        dim=2,
        value=value,
        value_batch=lambda X: h(np.asarray(X)[:, 0]) - np.asarray(X)[:, 1],
        grad=grad,
        subgrad=lambda x: [grad(x)],
        subgrad_dist=lambda x, v: float(np.linalg.norm(_as_point(v, 2) - grad(x))),
    )


# ---------------------------------------------------------------------------
# transformations
# ---------------------------------------------------------------------------


def tilted(f: ObjectiveFn, v) -> ObjectiveFn:
    """f - <., v>."""
    v = np.atleast_1d(np.asarray(v, dtype=float))
    assert v.size == f.dim

    return replace(
        f,
        name=f.name + "-tilt",
        value=lambda x: f.value(x) - float(v @ np.atleast_1d(np.asarray(x, dtype=float))),
        value_batch=lambda X: f.batch(X) - np.asarray(X) @ v,
        subgrad=(lambda x: [g - v for g in f.subgrad(x)]) if f.subgrad else None,
        subgrad_dist=(lambda x, w: f.subgrad_dist(
            x, np.atleast_1d(np.asarray(w, dtype=float)) + v)) if f.subgrad_dist else None,
        grad=(lambda x: f.grad(x) - v) if f.grad else None,
    )


def compose_conj_grad(f: ObjectiveFn, kernel: Kernel) -> ObjectiveFn:
    """(f o grad phi*) as an objective on the dual space.

    Points outside int(dom phi*) map to +inf.  A curve parameterization is
    transported through grad phi, keeping thin sets searchable.
    """
    assert f.dim == kernel.dim

    def value(y):
        y = np.atleast_1d(np.asarray(y, dtype=float))
        if not kernel.conj_dom_interior(y):
            return math.inf
        return f.value(kernel.conj_grad(y))

    conj = kernel.conjugate()

    def value_batch(Y):
        Y = np.asarray(Y, dtype=float)
        out = np.full(Y.shape[0], np.inf)
        inmask = conj.dom_interior_batch(Y)
        if np.any(inmask):
            out[inmask] = f.batch(conj.grad_batch(Y[inmask]))
        return out

    curve = None
    if f.curve is not None:
        def curve_point(t):
            p = f.curve.point(t)
            if np.ndim(t) == 0:
                return kernel.grad(p)
            return kernel.grad_batch(p)
        curve = Curve(f.curve.tmin, f.curve.tmax, curve_point)

    return ObjectiveFn(
        name=f.name + "@conj_grad",
        dim=f.dim,
        value=value,
        value_batch=value_batch,
        dom_predicate=lambda y: bool(np.isfinite(value(y))),
        prox_bounded_threshold=f.prox_bounded_threshold,
        curve=curve,
    )
