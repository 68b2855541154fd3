"""Closed-form Bregman prox of the power objective (1/p)|x|^p, 0 < p < 1.

Against the kernel (1/q)|x|^q with q = alpha + (1 - alpha) p, the
first-order condition for a nonzero minimizer reduces -- through the
substitution u = x^(1-p) -- to the polynomial equation

    1 + (1/lam) u^alpha - |c| u = 0,        c = (1/lam) sign(y) |y|^(q-1),

solvable in radicals for alpha in {2, 3, 4}.  Candidates are the mapped
positive roots plus x = 0 (which is always stationary: the subdifferential
of |x|^p at 0 is all of R); the global minimizer is picked by objective
comparison, with ties reported as multivalued.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, MultivaluedProx
from .kernels import Kernel, make_kernel
from .objectives import ObjectiveFn
from .proxcore import ProxResult


@dataclass(frozen=True)
class PowerProxSpec:
    p: float
    alpha: int
    lam: float

    def __post_init__(self):
        assert 0.0 < self.p < 1.0, "p must lie in ]0,1["
        assert self.alpha in (2, 3, 4), "alpha must be 2, 3 or 4"
        assert self.lam > 0.0

    @property
    def q(self) -> float:
        return self.alpha + (1.0 - self.alpha) * self.p

    def kernel(self, dim: int = 1) -> Kernel:
        return make_kernel("power", q=self.q, dim=dim)


# ---------------------------------------------------------------------------
# polynomial root solving in radicals, degrees 2..4
# ---------------------------------------------------------------------------


def _newton_polish(coeffs, x, steps: int = 5) -> float:
    der = np.polyder(np.asarray(coeffs, dtype=float))
    fx = abs(np.polyval(coeffs, x))
    for _ in range(steps):
        d = np.polyval(der, x)
        if abs(d) < 1e-30:
            break
        x_new = x - np.polyval(coeffs, x) / d
        f_new = abs(np.polyval(coeffs, x_new))
        if not np.isfinite(x_new) or f_new >= fx:
            break
        x, fx = x_new, f_new
    return float(x)


def _quadratic_roots(a, b, c):
    disc = b * b - 4.0 * a * c
    scale = b * b + abs(4.0 * a * c) + 1e-300
    if disc < -1e-12 * scale:
        return []
    if disc <= 1e-12 * scale:
        return [-b / (2.0 * a)] * 2
    s = math.sqrt(disc)
    # numerically stable split avoiding cancellation
    qq = -(b + math.copysign(s, b)) / 2.0 if b != 0.0 else s / 2.0
    return [qq / a, c / qq]


def _cubic_roots(a, b, c, d):
    # depress: x = t - b/(3a), giving t^3 + p t + q
    shift = b / (3.0 * a)
    p = (3.0 * a * c - b * b) / (3.0 * a * a)
    q = (2.0 * b ** 3 - 9.0 * a * b * c + 27.0 * a * a * d) / (27.0 * a ** 3)
    disc = -4.0 * p ** 3 - 27.0 * q * q
    scale = 4.0 * abs(p) ** 3 + 27.0 * q * q + 1e-300
    if abs(disc) <= 1e-10 * scale:
        if abs(p) < 1e-14 * (1.0 + abs(q)):
            ts = [0.0] * 3  # triple root
        else:
            double = -3.0 * q / (2.0 * p)
            ts = [double, double, 3.0 * q / p]
    elif disc > 0.0:
        # three distinct real roots, trigonometric form
        m = 2.0 * math.sqrt(-p / 3.0)
        theta = math.acos(max(-1.0, min(1.0, 3.0 * q / (p * m))))
        ts = [m * math.cos((theta - 2.0 * math.pi * k) / 3.0) for k in range(3)]
    else:
        # one real root, Cardano
        half_q = q / 2.0
        rad = math.sqrt(half_q * half_q + (p / 3.0) ** 3)
        ts = [np.cbrt(-half_q + rad) + np.cbrt(-half_q - rad)]
    return [t - shift for t in ts]


def _quartic_roots(a, b, c, d, e):
    # depress: x = y - b/(4a), giving y^4 + p y^2 + q y + r
    b, c, d, e = b / a, c / a, d / a, e / a
    shift = b / 4.0
    p = c - 3.0 * b * b / 8.0
    q = d - b * c / 2.0 + b ** 3 / 8.0
    r = e - b * d / 4.0 + b * b * c / 16.0 - 3.0 * b ** 4 / 256.0
    scale = abs(p) + abs(q) + abs(r) + 1.0
    if abs(q) <= 1e-13 * scale:
        # biquadratic in y^2
        ys = []
        for z in _quadratic_roots(1.0, p, r):
            if z > 1e-14 * scale:
                s = math.sqrt(z)
                ys.extend([s, -s])
            elif z >= -1e-14 * scale:
                ys.extend([0.0, 0.0])
        return [y - shift for y in ys]
    # Ferrari: resolvent 8 m^3 + 8 p m^2 + (2 p^2 - 8 r) m - q^2 = 0
    ms = [m for m in _cubic_roots(8.0, 8.0 * p, 2.0 * p * p - 8.0 * r, -q * q)
          if m > 0.0]
    if not ms:
        return []
    m = max(ms)
    s2m = math.sqrt(2.0 * m)
    ys = []
    ys += _quadratic_roots(1.0, -s2m, p / 2.0 + m + q / (2.0 * s2m))
    ys += _quadratic_roots(1.0, s2m, p / 2.0 + m - q / (2.0 * s2m))
    return [y - shift for y in ys]


def poly_real_roots(coeffs, degree: int | None = None) -> list:
    """All real roots (with multiplicity, ascending) of a degree-2..4 polynomial.

    ``coeffs`` are in descending order of power; each root is refined by at
    most 5 Newton steps on the original polynomial.
    """
    coeffs = [float(c) for c in coeffs]
    degree = degree if degree is not None else len(coeffs) - 1
    assert len(coeffs) == degree + 1 and coeffs[0] != 0.0, "bad coefficient list"
    if degree == 2:
        roots = _quadratic_roots(*coeffs)
    elif degree == 3:
        roots = _cubic_roots(*coeffs)
    elif degree == 4:
        roots = _quartic_roots(*coeffs)
    else:
        raise ValueError(f"unsupported degree {degree}")
    return sorted(_newton_polish(coeffs, x) for x in roots)


# ---------------------------------------------------------------------------
# the power prox itself
# ---------------------------------------------------------------------------


def _prox_objective(spec: PowerProxSpec, x: float, y: float) -> float:
    p, q, lam = spec.p, spec.q, spec.lam
    d = (abs(x) ** q - abs(y) ** q) / q - math.copysign(abs(y) ** (q - 1.0), y) * (x - y)
    return abs(x) ** p / p + d / lam


def power_prox(spec: PowerProxSpec, y: float,
               value_tol: float = 1e-6, point_tol: float = 1e-6) -> ProxResult:
    """Left Bregman prox/envelope of (1/p)|x|^p with kernel (1/q)|x|^q at y."""
    y = float(y)
    if y == 0.0:
        return ProxResult([np.array([0.0])], 0.0, False,
                          {"roots": [], "c": 0.0})
    p, q, lam, alpha = spec.p, spec.q, spec.lam, spec.alpha
    c = abs(y) ** (q - 1.0) / lam
    coeffs = [1.0 / lam] + [0.0] * (alpha - 2) + [-c, 1.0]
    roots = poly_real_roots(coeffs, alpha)
    candidates = [0.0]
    for u in roots:
        if u <= 0.0:
            continue
        x = u ** (1.0 / (1.0 - p))
        # polish the stationarity residual directly in x
        for _ in range(5):
            psi = x ** (p - 1.0) + x ** (q - 1.0) / lam - c
            dpsi = (p - 1.0) * x ** (p - 2.0) + (q - 1.0) * x ** (q - 2.0) / lam
            if abs(dpsi) < 1e-30:
                break
            x_new = x - psi / dpsi
            if not (x_new > 0.0 and np.isfinite(x_new)):
                break
            if abs(x_new ** (p - 1.0) + x_new ** (q - 1.0) / lam - c) >= abs(psi):
                break
            x = x_new
        candidates.append(x)
    vals = [_prox_objective(spec, x, abs(y)) for x in candidates]
    best = min(vals)
    keep = [x for x, v in zip(candidates, vals) if v <= best + value_tol]
    # drop candidates that are not local minima (inflection-type double
    # roots descend on one side; a nearby point then beats them)
    filtered = []
    for x in keep:
        if x > 0.0:
            delta = max(100.0 * point_tol, 1e-3 * x)
            v = _prox_objective(spec, x, abs(y))
            drop_tol = 1e-12 * (1.0 + abs(v))
            if (_prox_objective(spec, x - delta, abs(y)) < v - drop_tol or
                    _prox_objective(spec, x + delta, abs(y)) < v - drop_tol):
                continue
        filtered.append(x)
    # dedupe by point_tol (tiny roots collapse onto 0)
    filtered = sorted(set(filtered))
    minimizers = []
    for x in filtered:
        if all(abs(x - m) > point_tol for m in minimizers):
            minimizers.append(x)
    sign = 1.0 if y > 0 else -1.0
    return ProxResult(
        minimizers=[np.array([sign * x]) for x in minimizers],
        env_value=best,
        multivalued=len(minimizers) > 1,
        diagnostics={"roots": roots, "c": c},
    )


def power_prox_vector(spec: PowerProxSpec, y,
                      value_tol: float = 1e-6, point_tol: float = 1e-6) -> list:
    """Coordinate-wise power prox for a vector base point."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    return [power_prox(spec, yi, value_tol, point_tol) for yi in y]


def power_prox_tilted(p: float, alpha: int, lam_eff: float, c: float,
                      value_tol: float = 1e-6, point_tol: float = 1e-6) -> ProxResult:
    """argmin_x (1/p)|x|^p + (1/lam_eff)(1/q)|x|^q - c x, in closed form.

    The linear term is re-expressed as a Bregman prox by choosing the base
    point whose kernel gradient matches it.  Used by solvers that fold
    several Bregman regularization terms into one effective step.
    """
    spec = PowerProxSpec(p=p, alpha=alpha, lam=lam_eff)
    q = spec.q
    y = math.copysign(abs(lam_eff * c) ** (1.0 / (q - 1.0)), c)
    return power_prox(spec, y, value_tol, point_tol)


def make_power_prox_solver(p: float, alpha: int,
                           value_tol: float = 1e-6, point_tol: float = 1e-6):
    """A separable prox solver: (f, kernel, lam, y) -> ProxResult.

    Applies the closed-form scalar prox per coordinate; the minimizer set is
    the cartesian product of the per-coordinate sets (capped at 8 to keep
    multivalued degeneracies visible without blowup).
    """

    def solver(f: ObjectiveFn, kernel: Kernel, lam: float, y) -> ProxResult:
        spec = PowerProxSpec(p=p, alpha=alpha, lam=lam)
        y = np.atleast_1d(np.asarray(y, dtype=float))
        per = [power_prox(spec, yi, value_tol, point_tol) for yi in y]
        env = float(sum(r.env_value for r in per))
        sets = [[float(m[0]) for m in r.minimizers] for r in per]
        n_combo = int(np.prod([len(s) for s in sets]))
        if n_combo > 8:
            raise MultivaluedProx(
                "too many minimizer combinations", minimizers=None)
        minimizers = [np.array(combo) for combo in itertools.product(*sets)]
        return ProxResult(minimizers=minimizers, env_value=env,
                          multivalued=n_combo > 1,
                          diagnostics={"per_coordinate": per})

    return solver


def power_proxreg_modulus(spec: PowerProxSpec, xbar: float, eps: float) -> float:
    """Lower bound on the prox-regularity modulus of (1/p)|x|^p at xbar != 0.

    On a ball avoiding 0, f + r*(1/q)|x|^q is convex as soon as
    r (q-1) x^(q-2) dominates (1-p) x^(p-2), i.e.

        r >= (1-p)/(q-1) * sup { x^(p-q) : |x - xbar| < eps }.

    With p < 1 < q the supremum sits at the inner edge |xbar| - eps.
    """
    p, q = spec.p, spec.q
    xbar, eps = float(xbar), float(eps)
    if eps <= 0.0 or abs(xbar) <= eps:
        raise DomainError("the ball around xbar must avoid 0")
    edge = abs(xbar) - eps
    return (1.0 - p) / (q - 1.0) * edge ** (p - q)
