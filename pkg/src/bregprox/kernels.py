"""Catalog of Legendre kernel functions.

Each kernel knows its value, gradient, convex conjugate, conjugate gradient
and (optionally) Hessian, together with domain structure.  Multi-dimensional
kernels are separable sums of scalar components, which covers everything the
library needs (the reference 2-D kernels are all coordinate-wise sums).

Extended-real convention: ``value``/``conj_value`` return ``+inf`` outside
the respective domain and never NaN.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.special import expit

from .errors import DomainError, HessianUnavailable

# Strict margin from the domain boundary used by interiority predicates;
# essential smoothness makes gradients blow up exactly at the boundary.
DOM_MARGIN = 1e-12


@dataclass(frozen=True)
class ScalarKernel:
    """One-dimensional Legendre kernel with elementwise-vectorized callables.

    ``val``/``grad``/``conj_val``/``conj_grad``/``hess`` accept scalars or
    numpy arrays and operate elementwise.  ``hess`` may return NaN where the
    second derivative does not exist (e.g. power kernels with q < 2 at 0).
    """

    name: str
    val: Callable
    grad: Callable
    conj_val: Callable
    conj_grad: Callable
    dom_lo: float
    dom_hi: float
    conj_dom_lo: float
    conj_dom_hi: float
    supercoercive: bool
    very_strictly_convex: bool
    hess: Optional[Callable] = None
    conj_hess: Optional[Callable] = None
    # Interval used by tests/suites to draw random interior points.
    sample_interval: tuple = (-2.0, 2.0)

    @property
    def full_domain(self) -> bool:
        return math.isinf(self.dom_lo) and math.isinf(self.dom_hi)

    def interior_interval(self, margin: float = DOM_MARGIN) -> tuple:
        lo = self.dom_lo + margin if math.isfinite(self.dom_lo) else -math.inf
        hi = self.dom_hi - margin if math.isfinite(self.dom_hi) else math.inf
        return lo, hi

    def conj_interior_interval(self, margin: float = DOM_MARGIN) -> tuple:
        lo = self.conj_dom_lo + margin if math.isfinite(self.conj_dom_lo) else -math.inf
        hi = self.conj_dom_hi - margin if math.isfinite(self.conj_dom_hi) else math.inf
        return lo, hi

    def interior(self, x):
        lo, hi = self.interior_interval()
        x = np.asarray(x, dtype=float)
        return (x > lo) & (x < hi)

    def conj_interior(self, y):
        lo, hi = self.conj_interior_interval()
        y = np.asarray(y, dtype=float)
        return (y > lo) & (y < hi)

    def conjugate(self) -> "ScalarKernel":
        """The conjugate kernel phi*, itself Legendre."""
        return ScalarKernel(
            name=self.name + "*",
            val=self.conj_val,
            grad=self.conj_grad,
            conj_val=self.val,
            conj_grad=self.grad,
            dom_lo=self.conj_dom_lo,
            dom_hi=self.conj_dom_hi,
            conj_dom_lo=self.dom_lo,
            conj_dom_hi=self.dom_hi,
            supercoercive=self.full_domain,
            very_strictly_convex=self.very_strictly_convex,
            hess=self.conj_hess,
            conj_hess=self.hess,
            sample_interval=_map_interval(self.grad, self.sample_interval),
        )


def _map_interval(grad, interval):
    a, b = grad(interval[0]), grad(interval[1])
    return (float(a), float(b))


class Kernel:
    """Separable Legendre kernel on R^m, a sum of scalar components.

    Immutable after construction; safe for concurrent reads.
    """

    def __init__(self, components: Sequence[ScalarKernel], name: str | None = None):
        self.components = tuple(components)
        if not self.components:
            raise ValueError("kernel needs at least one component")
        self.name = name or "+".join(c.name for c in self.components)

    @property
    def dim(self) -> int:
        return len(self.components)

    @property
    def supercoercive(self) -> bool:
        return all(c.supercoercive for c in self.components)

    @property
    def very_strictly_convex(self) -> bool:
        return all(c.very_strictly_convex for c in self.components)

    @property
    def full_domain(self) -> bool:
        return all(c.full_domain for c in self.components)

    # -- pointwise interface (x is a scalar or a shape-(m,) array) ----------

    def _split(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.shape != (self.dim,):
            raise ValueError(f"expected point of dim {self.dim}, got shape {x.shape}")
        return x

    def value(self, x) -> float:
        x = self._split(x)
        return float(sum(c.val(xi) for c, xi in zip(self.components, x)))

    def grad(self, x) -> np.ndarray:
        x = self._split(x)
        if not self.dom_interior(x):
            raise DomainError(f"{self.name}: point {x} not in int(dom)")
        return np.array([float(c.grad(xi)) for c, xi in zip(self.components, x)])

    def conj_value(self, y) -> float:
        y = self._split(y)
        return float(sum(c.conj_val(yi) for c, yi in zip(self.components, y)))

    def conj_grad(self, y) -> np.ndarray:
        y = self._split(y)
        if not self.conj_dom_interior(y):
            raise DomainError(f"{self.name}: point {y} not in int(dom conj)")
        return np.array([float(c.conj_grad(yi)) for c, yi in zip(self.components, y)])

    def hessian(self, x) -> np.ndarray:
        """Diagonal Hessian matrix; raises where the kernel is not C^2."""
        x = self._split(x)
        diag = []
        for c, xi in zip(self.components, x):
            if c.hess is None:
                raise HessianUnavailable(f"{c.name}: no Hessian")
            h = float(c.hess(xi))
            if not math.isfinite(h):
                raise HessianUnavailable(f"{c.name}: Hessian unavailable at {xi}")
            diag.append(h)
        return np.diag(diag)

    def dom_interior(self, x) -> bool:
        x = self._split(x)
        return bool(np.all([c.interior(xi) for c, xi in zip(self.components, x)]))

    def conj_dom_interior(self, y) -> bool:
        y = self._split(y)
        return bool(np.all([c.conj_interior(yi) for c, yi in zip(self.components, y)]))

    # -- batch interface (X has shape (N, m)) -------------------------------

    def value_batch(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return sum(c.val(X[:, i]) for i, c in enumerate(self.components))

    def grad_batch(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return np.column_stack([c.grad(X[:, i]) for i, c in enumerate(self.components)])

    def dom_interior_batch(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        mask = np.ones(X.shape[0], dtype=bool)
        for i, c in enumerate(self.components):
            mask &= c.interior(X[:, i])
        return mask

    def interior_bounds(self, margin: float = DOM_MARGIN):
        """Per-coordinate open interior intervals, as two arrays (lo, hi)."""
        los, his = zip(*[c.interior_interval(margin) for c in self.components])
        return np.array(los), np.array(his)

    def conjugate(self) -> "Kernel":
        return Kernel([c.conjugate() for c in self.components], name=self.name + "*")

    def sample_box(self):
        return [c.sample_interval for c in self.components]

    def __repr__(self):
        return f"Kernel({self.name}, dim={self.dim})"


# ---------------------------------------------------------------------------
# scalar catalog
# ---------------------------------------------------------------------------


def _half_squared() -> ScalarKernel:
    return ScalarKernel(
        name="half_squared_norm",
        val=lambda x: 0.5 * np.square(x),
        grad=lambda x: np.asarray(x, dtype=float) + 0.0,
        conj_val=lambda y: 0.5 * np.square(y),
        conj_grad=lambda y: np.asarray(y, dtype=float) + 0.0,
        dom_lo=-math.inf, dom_hi=math.inf,
        conj_dom_lo=-math.inf, conj_dom_hi=math.inf,
        supercoercive=True, very_strictly_convex=True,
        hess=lambda x: np.ones_like(np.asarray(x, dtype=float)),
        conj_hess=lambda y: np.ones_like(np.asarray(y, dtype=float)),
        sample_interval=(-3.0, 3.0),
    )


def _power(q: float) -> ScalarKernel:
    if not q > 1:
        raise ValueError(f"power kernel needs q > 1, got {q}")
    qc = q / (q - 1.0)  # conjugate exponent

    def val(x):
        return np.abs(x) ** q / q

    def grad(x):
        x = np.asarray(x, dtype=float)
        return np.sign(x) * np.abs(x) ** (q - 1.0)

    def conj_val(y):
        return np.abs(y) ** qc / qc

    def conj_grad(y):
        y = np.asarray(y, dtype=float)
        return np.sign(y) * np.abs(y) ** (qc - 1.0)

    def hess(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            h = (q - 1.0) * np.abs(x) ** (q - 2.0)
        if q < 2.0:
            h = np.where(x == 0.0, np.nan, h)  # not C^2 at 0
        return h

    def conj_hess(y):
        y = np.asarray(y, dtype=float)
        with np.errstate(divide="ignore"):
            h = (qc - 1.0) * np.abs(y) ** (qc - 2.0)
        if qc < 2.0:
            h = np.where(y == 0.0, np.nan, h)
        return h

    return ScalarKernel(
        name=f"power({q:g})",
        val=val, grad=grad, conj_val=conj_val, conj_grad=conj_grad,
        dom_lo=-math.inf, dom_hi=math.inf,
        conj_dom_lo=-math.inf, conj_dom_hi=math.inf,
        supercoercive=True,
        very_strictly_convex=(q == 2.0),
        hess=hess, conj_hess=conj_hess,
        sample_interval=(-3.0, 3.0),
    )


def _boltzmann_shannon() -> ScalarKernel:
    def val(x):
        x = np.asarray(x, dtype=float)
        out = np.full_like(x, np.inf)
        pos = x > 0
        out[pos] = x[pos] * np.log(x[pos]) - x[pos]
        out[x == 0] = 0.0
        return out if out.ndim else float(out)

    return ScalarKernel(
        name="boltzmann_shannon",
        val=lambda x: val(np.atleast_1d(x))[0] if np.isscalar(x) else val(x),
        grad=lambda x: np.log(x),
        conj_val=lambda y: np.exp(y),
        conj_grad=lambda y: np.exp(y),
        dom_lo=0.0, dom_hi=math.inf,
        conj_dom_lo=-math.inf, conj_dom_hi=math.inf,
        supercoercive=True, very_strictly_convex=True,
        hess=lambda x: 1.0 / np.asarray(x, dtype=float),
        conj_hess=lambda y: np.exp(y),
        sample_interval=(0.1, 4.0),
    )


def _burg() -> ScalarKernel:
    def val(x):
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, np.inf)
        pos = x > 0
        out[pos] = -np.log(x[pos])
        return out if out.ndim else float(out)

    def conj_val(y):
        y = np.asarray(y, dtype=float)
        out = np.full(y.shape, np.inf)
        neg = y < 0
        out[neg] = -1.0 - np.log(-y[neg])
        return out if out.ndim else float(out)

    return ScalarKernel(
        name="burg",
        val=lambda x: val(np.atleast_1d(x))[0] if np.isscalar(x) else val(x),
        grad=lambda x: -1.0 / np.asarray(x, dtype=float),
        conj_val=lambda y: conj_val(np.atleast_1d(y))[0] if np.isscalar(y) else conj_val(y),
        conj_grad=lambda y: -1.0 / np.asarray(y, dtype=float),
        dom_lo=0.0, dom_hi=math.inf,
        conj_dom_lo=-math.inf, conj_dom_hi=0.0,
        supercoercive=False, very_strictly_convex=True,
        hess=lambda x: 1.0 / np.square(x),
        conj_hess=lambda y: 1.0 / np.square(y),
        sample_interval=(0.2, 5.0),
    )


def _fermi_dirac() -> ScalarKernel:
    def val(x):
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, np.inf)
        inside = (x > 0) & (x < 1)
        xi = x[inside]
        out[inside] = xi * np.log(xi) + (1 - xi) * np.log1p(-xi)
        out[(x == 0) | (x == 1)] = 0.0
        return out if out.ndim else float(out)

    return ScalarKernel(
        name="fermi_dirac",
        val=lambda x: val(np.atleast_1d(x))[0] if np.isscalar(x) else val(x),
        grad=lambda x: np.log(np.asarray(x, dtype=float) / (1.0 - np.asarray(x, dtype=float))),
        conj_val=lambda y: np.logaddexp(0.0, y),
        conj_grad=expit,
        dom_lo=0.0, dom_hi=1.0,
        conj_dom_lo=-math.inf, conj_dom_hi=math.inf,
        supercoercive=True, very_strictly_convex=True,
        hess=lambda x: 1.0 / (np.asarray(x, dtype=float) * (1.0 - np.asarray(x, dtype=float))),
        conj_hess=lambda y: expit(y) * (1.0 - expit(y)),
        sample_interval=(0.1, 0.9),
    )


def _hellinger() -> ScalarKernel:
    def val(x):
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, np.inf)
        inside = np.abs(x) <= 1
        out[inside] = -np.sqrt(1.0 - np.square(x[inside]))
        return out if out.ndim else float(out)

    return ScalarKernel(
        name="hellinger",
        val=lambda x: val(np.atleast_1d(x))[0] if np.isscalar(x) else val(x),
        grad=lambda x: np.asarray(x, dtype=float) / np.sqrt(1.0 - np.square(x)),
        conj_val=lambda y: np.sqrt(1.0 + np.square(y)),
        conj_grad=lambda y: np.asarray(y, dtype=float) / np.sqrt(1.0 + np.square(y)),
        dom_lo=-1.0, dom_hi=1.0,
        conj_dom_lo=-math.inf, conj_dom_hi=math.inf,
        supercoercive=True, very_strictly_convex=True,
        hess=lambda x: (1.0 - np.square(x)) ** -1.5,
        conj_hess=lambda y: (1.0 + np.square(y)) ** -1.5,
        sample_interval=(-0.8, 0.8),
    )


def _exponential() -> ScalarKernel:
    def conj_val(y):
        y = np.asarray(y, dtype=float)
        out = np.full(y.shape, np.inf)
        pos = y > 0
        out[pos] = y[pos] * np.log(y[pos]) - y[pos]
        out[y == 0] = 0.0
        return out if out.ndim else float(out)

    return ScalarKernel(
        name="exponential",
        val=lambda x: np.exp(x),
        grad=lambda x: np.exp(x),
        conj_val=lambda y: conj_val(np.atleast_1d(y))[0] if np.isscalar(y) else conj_val(y),
        conj_grad=lambda y: np.log(y),
        dom_lo=-math.inf, dom_hi=math.inf,
        conj_dom_lo=0.0, conj_dom_hi=math.inf,
        supercoercive=False, very_strictly_convex=True,
        hess=lambda x: np.exp(x),
        conj_hess=lambda y: 1.0 / np.asarray(y, dtype=float),
        sample_interval=(-1.5, 1.5),
    )


def power_sum_scalar(terms: Sequence[tuple], name: str | None = None,
                     sample_interval: tuple = (-2.0, 2.0)) -> ScalarKernel:
    """Scalar kernel sum_i a_i |x|^{q_i} with a_i > 0, q_i > 1, dom = R.

    The conjugate has no closed form in general: the conjugate gradient is
    computed by inverting the (strictly increasing) gradient with Brent's
    method, and the conjugate value via the Fenchel-Young equality.
    """
    terms = [(float(a), float(q)) for a, q in terms]
    if not terms or any(a <= 0 or q <= 1 for a, q in terms):
        raise ValueError("power_sum terms need a > 0 and q > 1")

    def val(x):
        x = np.asarray(x, dtype=float)
        return sum(a * np.abs(x) ** q for a, q in terms)

    def grad(x):
        x = np.asarray(x, dtype=float)
        return sum(a * q * np.sign(x) * np.abs(x) ** (q - 1.0) for a, q in terms)

    def _invert_one(y):
        if y == 0.0:
            return 0.0
        b = 1.0
        while grad(b) < abs(y):
            b *= 2.0
            if b > 1e154:
                raise DomainError("power_sum: gradient inversion overflow")
        t = brentq(lambda s: float(grad(s)) - abs(y), 0.0, b,
                   xtol=1e-15, rtol=8.9e-16, maxiter=200)
        return math.copysign(t, y)

    def conj_grad(y):
        y = np.asarray(y, dtype=float)
        flat = np.array([_invert_one(v) for v in np.atleast_1d(y).ravel()])
        return flat.reshape(np.atleast_1d(y).shape) if y.ndim else float(flat[0])

    def conj_val(y):
        y = np.asarray(y, dtype=float)
        t = conj_grad(y)
        return y * t - val(t)

    min_q = min(q for _, q in terms)

    def hess(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            h = sum(a * q * (q - 1.0) * np.abs(x) ** (q - 2.0) for a, q in terms)
        if min_q < 2.0:
            h = np.where(x == 0.0, np.nan, h)
        return h

    return ScalarKernel(
        name=name or "power_sum(" + ",".join(f"{a:g}|x|^{q:g}" for a, q in terms) + ")",
        val=val, grad=grad, conj_val=conj_val, conj_grad=conj_grad,
        dom_lo=-math.inf, dom_hi=math.inf,
        conj_dom_lo=-math.inf, conj_dom_hi=math.inf,
        supercoercive=True,
        # not C^2 at 0 whenever some exponent is < 2
        very_strictly_convex=(min_q >= 2.0),
        hess=hess, conj_hess=None,
        sample_interval=sample_interval,
    )


_SCALAR_FACTORY = {
    "half_squared_norm": _half_squared,
    "power": _power,
    "boltzmann_shannon": _boltzmann_shannon,
    "burg": _burg,
    "fermi_dirac": _fermi_dirac,
    "hellinger": _hellinger,
    "exponential": _exponential,
}

KERNEL_KINDS = tuple(_SCALAR_FACTORY)


def make_kernel(kind: str, q: float | None = None, dim: int = 1) -> Kernel:
    """Construct a catalog kernel, replicated over ``dim`` coordinates."""
    if kind not in _SCALAR_FACTORY:
        raise ValueError(f"unknown kernel kind {kind!r}; choose from {KERNEL_KINDS}")
    if kind == "power":
        if q is None or not q > 1:
            raise ValueError("power kernel requires parameter q > 1")
        scalar = _power(q)
    else:
        if q is not None:
            raise ValueError(f"kernel kind {kind!r} takes no parameter")
        scalar = _SCALAR_FACTORY[kind]()
    return Kernel([scalar] * dim)


def separable(kernels: Sequence[Kernel | ScalarKernel], name: str | None = None) -> Kernel:
    """Concatenate kernels coordinate-wise into one separable kernel."""
    comps = []
    for k in kernels:
        comps.extend(k.components if isinstance(k, Kernel) else [k])
    return Kernel(comps, name=name)


def scale_kernel(k: Kernel, tau: float) -> Kernel:
    """tau * kernel (tau > 0); conjugate scales as tau * conj(y / tau)."""
    assert tau > 0.0

    def scaled(c: ScalarKernel) -> ScalarKernel:
        return ScalarKernel(
            name=f"{tau:g}*{c.name}",
            val=lambda x, c=c: tau * c.val(x),
            grad=lambda x, c=c: tau * c.grad(x),
            conj_val=lambda y, c=c: tau * c.conj_val(np.asarray(y, dtype=float) / tau),
            conj_grad=lambda y, c=c: c.conj_grad(np.asarray(y, dtype=float) / tau),
            dom_lo=c.dom_lo, dom_hi=c.dom_hi,
            conj_dom_lo=tau * c.conj_dom_lo, conj_dom_hi=tau * c.conj_dom_hi,
            supercoercive=c.supercoercive,
            very_strictly_convex=c.very_strictly_convex,
            hess=(lambda x, c=c: tau * c.hess(x)) if c.hess else None,
            conj_hess=(lambda y, c=c: c.conj_hess(
                np.asarray(y, dtype=float) / tau) / tau) if c.conj_hess else None,
            sample_interval=c.sample_interval,
        )

    return Kernel([scaled(c) for c in k.components], name=f"{tau:g}*{k.name}")


def ball_example_kernel() -> Kernel:
    """The 2-D kernel x1^2 + |x1|^1.1 + x2^2 used by the epigraph example."""
    first = power_sum_scalar([(1.0, 2.0), (1.0, 1.1)], sample_interval=(-1.5, 1.5))
    second = power_sum_scalar([(1.0, 2.0)], name="x^2", sample_interval=(-1.5, 1.5))
    return Kernel([first, second], name="x1^2+|x1|^1.1+x2^2")


def kernel_roundtrip_check(kernel: Kernel, samples: Sequence, tol: float) -> dict:
    """Check gradient bijectivity: max over samples of |conj_grad(grad(x)) - x|."""
    errors = []
    for x in samples:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if not kernel.dom_interior(x):
            raise DomainError(f"sample {x} outside int(dom {kernel.name})")
        back = kernel.conj_grad(kernel.grad(x))
        errors.append(float(np.linalg.norm(back - x)))
    max_err = max(errors) if errors else 0.0
    return {
        "kernel": kernel.name,
        "max_error": max_err,
        "tol": tol,
        "passed": max_err <= tol,
        "n_samples": len(errors),
    }
