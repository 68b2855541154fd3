"""Command-line front end: experiment orchestration and CSV/figure output.

Every subcommand that takes an output directory writes delimited CSV data
files and renders a matplotlib figure next to them.  Exit codes: 0 success,
1 suite acceptance failure, 2 configuration error, 3 unbounded envelope.
"""

from __future__ import annotations

import argparse
import configparser
import math
import os
import sys

import numpy as np

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from . import bpam as bpam_mod  # noqa: E402
from ._fmt import derive_seed, fmt_num, write_csv  # noqa: E402
from .analytic import PowerProxSpec, make_power_prox_solver, power_prox  # noqa: E402
from .divergence import bregman, bregman_dual_gap  # noqa: E402
from .envelopes import (envelope_complement_convexity_check, fd_gradient,  # noqa: E402
                        left_env_grad, left_env_grad_composed,
                        left_envelope_value, composed_left_envelope_value,
                        oracle_solver, right_env_grad, right_envelope_value)
from .errors import (BregproxError, ConfigError, MultivaluedProx,  # noqa: E402
                     NotProxBounded, UnboundedSubproblem)
from .figures import tangency_scan  # noqa: E402
from .kernels import (KERNEL_KINDS, Kernel, ball_example_kernel,  # noqa: E402
                      make_kernel)
from .objectives import (ObjectiveFn, box_indicator, curved_example,  # noqa: E402
                         interval_indicator, neg_quadratic, power_lp,
                         quadratic_lsq, scaled_abs, zero_objective)
from .proxcore import (ProxQuery, SearchConfig, left_envelope,  # noqa: E402
                       prox_bounded_estimate, right_envelope)
from .regularity import certify_prox_regularity  # noqa: E402

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_UNBOUNDED = 3


# ---------------------------------------------------------------------------
# argument parsing helpers
# ---------------------------------------------------------------------------


def parse_kernel(spec: str, dim: int = 1) -> Kernel:
    if spec == "ball_example":
        return ball_example_kernel()
    name, _, param = spec.partition(":")
    if name == "power":
        try:
            return make_kernel("power", q=float(param), dim=dim)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    if name in KERNEL_KINDS:
        if param:
            raise ConfigError(f"kernel {name!r} takes no parameter")
        return make_kernel(name, dim=dim)
    raise ConfigError(f"unknown kernel {spec!r}")


def parse_objective(spec: str):
    """Parse a catalog objective string; returns (objective, power_spec_args)."""
    name, _, rest = spec.partition(":")
    kv = {}
    if rest:
        for item in rest.split(","):
            if "=" in item:
                k, v = item.split("=", 1)
                kv[k] = v
            else:
                kv.setdefault("_pos", []).append(item)
    if name == "power":
        p = float(kv.get("p", 0.5))
        alpha = int(kv.get("alpha", 2))
        dim = int(kv.get("dim", 1))
        return power_lp(p, dim=dim), {"p": p, "alpha": alpha}
    if name == "interval":
        pos = kv.get("_pos", ["0", "1"])
        return interval_indicator(float(pos[0]), float(pos[1])), None
    if name == "zero":
        return zero_objective(int(kv.get("dim", 1))), None
    if name == "neg_quadratic":
        return neg_quadratic(float(kv.get("a", 0.5)), int(kv.get("dim", 1))), None
    if name == "abs":
        return scaled_abs(float(kv.get("c", 1.0)), int(kv.get("dim", 1))), None
    if name == "epigraph":
        _, _, epi = curved_example()
        return epi, None
    raise ConfigError(f"unknown objective {spec!r}")


def parse_y_values(args) -> list:
    ys = []
    if getattr(args, "y", None):
        ys.extend(float(v) for v in args.y.split(",") if v.strip())
    if getattr(args, "y_range", None):
        parts = args.y_range.split(":")
        if len(parts) != 3:
            raise ConfigError("--y-range expects lo:hi:step")
        lo, hi, step = map(float, parts)
        if step <= 0 or hi < lo:
            raise ConfigError("--y-range expects lo <= hi and step > 0")
        ys.extend(np.arange(lo, hi + step / 2, step).tolist())
    if not ys:
        raise ConfigError("no base points given (use --y or --y-range)")
    return ys


def _outdir(args) -> str:
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    return out


def _save_figure(fig, out: str, name: str) -> None:
    fig.savefig(os.path.join(out, name), dpi=120, bbox_inches="tight")
    plt.close(fig)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_prox(args) -> int:
    f, power_args = parse_objective(args.f)
    ys = parse_y_values(args)
    kernel = (parse_kernel(args.kernel, dim=f.dim) if args.kernel
              else (PowerProxSpec(power_args["p"], power_args["alpha"],
                                  args.lam).kernel() if power_args else None))
    if kernel is None:
        raise ConfigError("a kernel is required for this objective")
    if args.side == "right" and not kernel.full_domain:
        raise ConfigError(
            "side=right requires a kernel with full domain (dom = R^m)")
    if args.side == "left":
        _require_prox_bounded(f, kernel, args.lam)
    out = _outdir(args)
    spec = PowerProxSpec(power_args["p"], power_args["alpha"], args.lam) \
        if power_args else None
    use_analytic = (spec is not None and args.side == "left"
                    and kernel.dim == 1
                    and kernel.components[0].name == f"power({spec.q:g})")
    rows = []
    for y in ys:
        agreement = ""
        if use_analytic:
            res = power_prox(spec, y)
            if args.oracle:
                box = [(-abs(y) - 1.0, abs(y) + 1.0)]
                ores = left_envelope(
                    ProxQuery(f, kernel, args.lam, np.array([y]), side="left"),
                    SearchConfig(box=box, resolution=args.resolution))
                agreement = fmt_num(abs(res.env_value - ores.env_value))
        else:
            box = [(-abs(y) - 2.0, abs(y) + 2.0)] * kernel.dim
            q = ProxQuery(f, kernel, args.lam, np.full(kernel.dim, y),
                          side=args.side)
            res = (left_envelope(q, SearchConfig(box=box, resolution=args.resolution))
                   if args.side == "left"
                   else right_envelope(q, SearchConfig(box=box,
                                                       resolution=args.resolution)))
        rows.append((y, res.minimizers, res.env_value, res.multivalued, agreement))
    write_csv(os.path.join(out, "prox.csv"),
              ["y", "minimizers", "env", "multivalued", "agreement"], rows)
    if kernel.dim == 1:
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
        for y, mins, env, multi, _ in rows:
            for m in mins:
                ax1.plot([y], [float(m[0])], "b." if not multi else "r.")
        ax1.set_xlabel("y")
        ax1.set_ylabel("prox(y)")
        ax2.plot([r[0] for r in rows], [r[2] for r in rows], "k-")
        ax2.set_xlabel("y")
        ax2.set_ylabel("envelope")
        _save_figure(fig, out, "prox.png")
    return EXIT_OK


def _require_prox_bounded(f, kernel, lam) -> None:
    """Reject step sizes beyond the envelope's finiteness threshold: the
    box-bounded oracle alone cannot see the objective running to -inf."""
    if f.prox_bounded_threshold is None or not kernel.full_domain:
        return
    report = prox_bounded_estimate(f, kernel, [lam], probe=np.zeros(kernel.dim))
    if not report["per_lambda"][0]["bounded"]:
        raise NotProxBounded(
            f"envelope is unbounded below at step size {lam:g} "
            f"(threshold near {f.prox_bounded_threshold:g})")


def cmd_envelope(args) -> int:
    f, power_args = parse_objective(args.f)
    kernel = parse_kernel(args.kernel, dim=f.dim)
    ys = parse_y_values(args)
    lams = [float(v) for v in args.lam.split(",")]
    for lam in lams:
        _require_prox_bounded(f, kernel, lam)
    out = _outdir(args)
    rows = []
    for lam in lams:
        for y in ys:
            box = [(-abs(y) - 2.0, abs(y) + 2.0)] * kernel.dim
            search = SearchConfig(box=box, resolution=args.resolution)
            q = ProxQuery(f, kernel, lam, np.full(kernel.dim, y), side=args.side)
            env = (left_envelope(q, search) if args.side == "left"
                   else right_envelope(q, search)).env_value
            rows.append((lam, y, env))
    write_csv(os.path.join(out, "envelope.csv"), ["lam", "y", "env"], rows)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for lam in lams:
        pts = [(y, e) for (l, y, e) in rows if l == lam]
        ax.plot([p[0] for p in pts], [p[1] for p in pts], label=f"lam={lam:g}")
    ax.set_xlabel("y")
    ax.set_ylabel("envelope")
    ax.legend()
    _save_figure(fig, out, "envelope.png")
    return EXIT_OK


def _grad_check_rows(combo_name, f, kernel, lam, formula, points, solver,
                     search):
    """Rows (y, formula, fd, abs_err, rel_err, single_valued) per point."""
    rows = []
    for y in points:
        y = np.atleast_1d(np.asarray(y, dtype=float))
        try:
            if formula == "composed-left":
                g = left_env_grad_composed(f, kernel, lam, y, solver)
                fd = fd_gradient(
                    lambda z: composed_left_envelope_value(f, kernel, lam, z, solver),
                    y)
            elif formula == "left":
                g = left_env_grad(f, kernel, lam, y, solver)
                fd = fd_gradient(
                    lambda z: left_envelope_value(f, kernel, lam, z, solver), y)
            else:
                g = right_env_grad(f, kernel, lam, y, search)
                fd = fd_gradient(
                    lambda z: right_envelope_value(f, kernel, lam, z, search), y)
        except MultivaluedProx:
            rows.append((combo_name, formula, y, "", "", "", "", False))
            continue
        abs_err = float(np.linalg.norm(g - fd["grad"]))
        rel_err = abs_err / (1.0 + float(np.linalg.norm(g)))
        rows.append((combo_name, formula, y, g, fd["grad"], abs_err, rel_err, True))
    return rows


def default_grad_check_combos():
    """Three combos: (name, f, kernel, lam, primal interval, dual interval,
    solver kind).  The composed-left formula takes dual-side points, so each
    combo carries a sampling interval inside int(dom of the conjugate)."""
    spec = PowerProxSpec(0.5, 2, 1.0)
    combos = [
        ("power-vs-power", power_lp(0.5), spec.kernel(), 1.0,
         (2.5, 6.0), (2.5, 6.0), "analytic"),
        ("interval-vs-exponential", interval_indicator(0.0, 1.0),
         make_kernel("exponential"), 1.0, (-1.5, 2.5), (0.2, 6.0), "oracle"),
        ("abs-vs-quadratic", scaled_abs(0.5), make_kernel("half_squared_norm"),
         1.0, (0.8, 3.0), (0.8, 3.0), "oracle"),
    ]
    return combos


def _combo_solver(kind, f, kernel, lam, power_p=0.5, power_alpha=2):
    if kind == "analytic":
        return make_power_prox_solver(power_p, power_alpha)
    box = [iv for iv in [(-8.0, 8.0)] * kernel.dim]
    # coarse grid: the recentered polish supplies the accuracy, the grid only
    # needs to land inside every basin
    return oracle_solver(SearchConfig(box=box, resolution=1e-2))


def cmd_grad_check(args) -> int:
    out = _outdir(args)
    rng = np.random.default_rng(args.seed)
    formulas = (["composed-left", "left", "right"] if args.formula == "all"
                else [args.formula])
    rows = []
    for name, f, kernel, lam, primal, dual, kind in default_grad_check_combos():
        solver = _combo_solver(kind, f, kernel, lam)
        search = SearchConfig(box=[(-8.0, 8.0)] * kernel.dim, resolution=1e-2)
        for formula in formulas:
            lo, hi = dual if formula == "composed-left" else primal
            pts = rng.uniform(lo, hi, size=args.n)
            rows.extend(_grad_check_rows(name, f, kernel, lam, formula, pts,
                                         solver, search))
    write_csv(os.path.join(out, "grad_check.csv"),
              ["combo", "formula", "y", "formula_value", "fd_value",
               "abs_error", "rel_error", "single_valued"], rows)
    rels = [r[6] for r in rows if r[7]]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.semilogy(range(len(rels)), [max(r, 1e-18) for r in rels], ".")
    ax.axhline(args.tol, color="r", linestyle="--")
    ax.set_xlabel("check index")
    ax.set_ylabel("relative error")
    _save_figure(fig, out, "grad_check.png")
    worst = max(rels) if rels else math.inf
    print(f"grad-check: {len(rels)} single-valued points, "
          f"max relative error {fmt_num(worst)}")
    return EXIT_OK if worst <= args.tol else EXIT_FAIL


def cmd_certify(args) -> int:
    out = _outdir(args)
    _, _, epi = curved_example()
    f, _ = (epi, None) if args.f == "epigraph" else parse_objective(args.f)
    kernel = parse_kernel(args.kernel, dim=f.dim)
    xbar = np.array([float(v) for v in args.xbar.split(",")])
    vbar = np.array([float(v) for v in args.vbar.split(",")])
    cert = certify_prox_regularity(f, kernel, xbar, vbar, args.eps,
                                   args.resolution)
    rows = [(kernel.name, xbar, vbar, cert.r if cert.r is not None else "",
             cert.eps, cert.verified, cert.checked_pairs,
             cert.diagnostics.get("r_needed", ""))]
    write_csv(os.path.join(out, "certificate.csv"),
              ["kernel", "xbar", "vbar", "r", "eps", "verified",
               "checked_pairs", "r_needed"], rows)
    print(f"certify: kernel={kernel.name} verified={cert.verified} "
          f"r={cert.r} (needed {fmt_num(cert.diagnostics.get('r_needed', 0))})")
    if cert.violating_triple is not None:
        xprime, x, v = cert.violating_triple
        print(f"certify: violating triple x'={xprime} x={x} v={v}")
    return EXIT_OK


def cmd_run_bpam(args) -> int:
    out = _outdir(args)
    problem, u0, x0 = bpam_mod.make_sparse_recovery_problem(
        n=args.n, p_exp=args.p, alpha=args.alpha, lam=args.lam,
        mu=args.mu, M=args.M, seed=args.seed)
    x_update = bpam_mod.make_power_x_update(args.p, args.alpha)
    trace = bpam_mod.bpam_run(problem, (u0, x0), x_update,
                              max_iters=args.iters, res_tol=args.tol)
    rows = [(t, trace.F_vals[t], trace.slack[t], trace.rho_x[t],
             trace.rho_u[t], trace.step_norm[t])
            for t in range(trace.iterations)]
    write_csv(os.path.join(out, "bpam_trace.csv"),
              ["t", "F", "decrease_slack", "rho_x", "rho_u", "step_norm"], rows)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
    ax1.plot(trace.F_vals)
    ax1.set_xlabel("iteration")
    ax1.set_ylabel("joint objective")
    ax2.semilogy([max(r, 1e-18) for r in trace.rho_x], label="rho_x")
    ax2.semilogy([max(r, 1e-18) for r in trace.rho_u], label="rho_u")
    ax2.set_xlabel("iteration")
    ax2.legend()
    _save_figure(fig, out, "bpam_trace.png")
    print(f"run-bpam: {trace.iterations} iterations, converged={trace.converged}, "
          f"final residuals ({fmt_num(trace.rho_x[-1])}, {fmt_num(trace.rho_u[-1])})")
    if args.check_translated:
        solver = make_power_prox_solver(args.p, args.alpha)
        rep = bpam_mod.translated_stationarity_check(
            problem, trace.u, trace.x, args.translated_tol, solver)
        print(f"run-bpam: translated stationarity residual "
              f"{fmt_num(rep['residual'])} (ok={rep['ok']})")
    return EXIT_OK


def make_bpg_toy(p: float, alpha: int, lam: float, M: float, seed: int):
    """1-D equivalence toy: power f, quadratic g, identity coupling."""
    rng = np.random.default_rng(seed)
    spec = PowerProxSpec(p, alpha, lam)
    problem = bpam_mod.BpamProblem(
        f=power_lp(p), g=quadratic_lsq(np.array([[1.0]]),
                                       np.array([rng.uniform(1.0, 3.0)]), mu=1.0),
        A=np.eye(1), phi=spec.kernel(), lam=lam, sigma=None, M=M)
    u0 = np.array([rng.uniform(2.0, 4.0)])
    return problem, u0


def cmd_bpg_equiv(args) -> int:
    out = _outdir(args)
    problem, u0 = make_bpg_toy(args.p, args.alpha, args.lam, args.M, args.seed)
    solver = make_power_prox_solver(args.p, args.alpha)
    rep = bpam_mod.bpg_equivalence_demo(problem, u0, args.steps, solver)
    write_csv(os.path.join(out, "bpg_equiv.csv"), ["t", "gap"],
              list(enumerate(rep["gaps"])))
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.semilogy([max(g, 1e-18) for g in rep["gaps"]], ".-")
    ax.set_xlabel("iteration")
    ax.set_ylabel("iterate gap")
    _save_figure(fig, out, "bpg_equiv.png")
    print(f"bpg-equiv: max iterate gap {fmt_num(rep['max_gap'])} "
          f"over {args.steps} steps")
    return EXIT_OK if rep["max_gap"] <= args.tol else EXIT_FAIL


def cmd_figure(args) -> int:
    out = _outdir(args)
    h, _, _ = curved_example()
    kernel = parse_kernel(args.kernel, dim=2)
    scan = tangency_scan(kernel, h, np.zeros(2), np.array([0.0, -1.0]),
                         args.lam, width=args.width, n=args.n)
    write_csv(os.path.join(out, "ball.csv"),
              ["x1", "ball_bottom", "ball_top"],
              [(r[0], r[1], r[2]) for r in scan["rows"]])
    xs = np.linspace(-args.width, args.width, 600)
    write_csv(os.path.join(out, "graph.csv"), ["x1", "h"],
              [(float(x), float(h(x))) for x in xs])
    write_csv(os.path.join(out, "tangency.csv"),
              ["kernel", "lam", "passed", "min_gap", "min_gap_at"],
              [(kernel.name, args.lam, scan["passed"], scan["min_gap"],
                scan["min_gap_at"])])
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(xs, h(xs), "k-", label="boundary")
    bx = [r[0] for r in scan["rows"]]
    ax.fill_between(bx, [r[1] for r in scan["rows"]],
                    [r[2] for r in scan["rows"]], alpha=0.4, label="ball")
    ax.plot([0.0], [0.0], "r*", markersize=10)
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.legend()
    _save_figure(fig, out, "tangency.png")
    print(f"figure: kernel={kernel.name} tangency passed={scan['passed']} "
          f"min gap {fmt_num(scan['min_gap'])} at {fmt_num(scan['min_gap_at'])}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# experiment suite
# ---------------------------------------------------------------------------


def _suite_kernel_duality(section, seed, out):
    rng = np.random.default_rng(seed)
    tol = section.getfloat("tol", 1e-9)
    n = section.getint("n", 100)
    worst = 0.0
    for kernel in _catalog_kernels():
        lo, hi = kernel.components[0].sample_interval
        for _ in range(n):
            x = np.array([rng.uniform(lo, hi) for _ in range(kernel.dim)])
            back = kernel.conj_grad(kernel.grad(x))
            err = float(np.linalg.norm(back - x)) / (1.0 + float(np.linalg.norm(x)))
            fy = abs(kernel.value(x) + kernel.conj_value(kernel.grad(x))
                     - float(x @ kernel.grad(x)))
            worst = max(worst, err, fy)
    return worst <= tol, f"max error {fmt_num(worst)} (tol {fmt_num(tol)})"


def _suite_dual_identity(section, seed, out):
    rng = np.random.default_rng(seed)
    tol = section.getfloat("tol", 1e-8)
    n = section.getint("n", 100)
    worst = 0.0
    for kernel in _catalog_kernels():
        lo, hi = kernel.components[0].sample_interval
        for _ in range(n):
            x = np.array([rng.uniform(lo, hi) for _ in range(kernel.dim)])
            y = np.array([rng.uniform(lo, hi) for _ in range(kernel.dim)])
            worst = max(worst, bregman_dual_gap(kernel, x, y))
    return worst <= tol, f"max gap {fmt_num(worst)} (tol {fmt_num(tol)})"


def _catalog_kernels():
    kernels = [make_kernel("half_squared_norm"), make_kernel("power", q=1.5),
               make_kernel("power", q=3.0), make_kernel("boltzmann_shannon"),
               make_kernel("burg"), make_kernel("fermi_dirac"),
               make_kernel("hellinger"), make_kernel("exponential")]
    return kernels


def _suite_prox_agreement(section, seed, out):
    rng = np.random.default_rng(seed)
    n = section.getint("n", 200)
    point_tol = section.getfloat("point_tol", 1e-4)
    value_tol = section.getfloat("value_tol", 1e-6)
    worst_pt, worst_env = 0.0, 0.0
    mismatches = 0
    for _ in range(n):
        p = rng.uniform(0.2, 0.9)
        alpha = int(rng.choice([2, 3, 4]))
        lam = rng.uniform(0.1, 2.0)
        y = rng.uniform(-10.0, 10.0)
        spec = PowerProxSpec(p, alpha, lam)
        ana = power_prox(spec, y)
        f = power_lp(p)
        box = [(-abs(y) - 1.0, abs(y) + 1.0)]
        ora = left_envelope(ProxQuery(f, spec.kernel(), lam, np.array([y]),
                                      side="left"),
                            SearchConfig(box=box, resolution=1e-3))
        worst_env = max(worst_env, abs(ana.env_value - ora.env_value))
        if len(ana.minimizers) != len(ora.minimizers):
            mismatches += 1
            continue
        for a, o in zip(sorted(float(m[0]) for m in ana.minimizers),
                        sorted(float(m[0]) for m in ora.minimizers)):
            worst_pt = max(worst_pt, abs(a - o))
    ok = mismatches == 0 and worst_pt <= point_tol and worst_env <= value_tol
    return ok, (f"{n} instances, set mismatches {mismatches}, "
                f"max point gap {fmt_num(worst_pt)}, "
                f"max env gap {fmt_num(worst_env)}")


def _suite_grad_check(section, seed, out):
    class A:
        pass

    args = A()
    args.out = out
    args.seed = seed
    args.n = section.getint("n", 50)
    args.tol = section.getfloat("tol", 1e-4)
    args.formula = section.get("formula", "all")
    code = cmd_grad_check(args)
    return code == EXIT_OK, f"see {out}/grad_check.csv"


def _suite_complement(section, seed, out):
    p = section.getfloat("p", 0.5)
    alpha = section.getint("alpha", 2)
    lam = section.getfloat("lam", 1.0)
    n = section.getint("n", 1000)
    tol = section.getfloat("tol", 1e-8)
    solver = make_power_prox_solver(p, alpha)
    spec = PowerProxSpec(p, alpha, lam)
    ok = envelope_complement_convexity_check(
        power_lp(p), spec.kernel(), lam, "left", n, tol,
        box=[(-6.0, 6.0)], seed=seed, solver=solver)
    return ok, f"{n} midpoint pairs at tol {fmt_num(tol)}"


def _suite_certify(section, seed, out):
    _, _, epi = curved_example()
    kernel = parse_kernel(section.get("kernel", "ball_example"), dim=2)
    expect = section.getboolean("expect_verified", True)
    cert = certify_prox_regularity(
        epi, kernel, np.zeros(2), np.array([0.0, -1.0]),
        section.getfloat("eps", 0.3), section.getfloat("resolution", 0.003))
    ok = cert.verified == expect
    return ok, (f"kernel {kernel.name}: verified={cert.verified} r={cert.r} "
                f"needed {fmt_num(cert.diagnostics.get('r_needed', 0))}")


def _suite_bpam(section, seed, out):
    class A:
        pass

    args = A()
    args.out = out
    args.seed = seed
    args.n = section.getint("n", 20)
    args.p = section.getfloat("p", 0.5)
    args.alpha = section.getint("alpha", 2)
    args.lam = section.getfloat("lam", 0.5)
    args.mu = section.getfloat("mu", 1.0)
    args.M = section.getfloat("M", 20.0)
    args.iters = section.getint("iters", 10000)
    args.tol = section.getfloat("tol", 1e-6)
    args.check_translated = section.getboolean("check_translated", True)
    args.translated_tol = section.getfloat("translated_tol", 1e-5)
    problem, u0, x0 = bpam_mod.make_sparse_recovery_problem(
        n=args.n, p_exp=args.p, alpha=args.alpha, lam=args.lam,
        mu=args.mu, M=args.M, seed=args.seed)
    x_update = bpam_mod.make_power_x_update(args.p, args.alpha)
    trace = bpam_mod.bpam_run(problem, (u0, x0), x_update,
                              max_iters=args.iters, res_tol=args.tol)
    slack_ok = all(s >= -1e-9 * (1.0 + abs(F))
                   for s, F in zip(trace.slack, trace.F_vals))
    res_ok = trace.converged
    trans_ok = True
    detail = (f"{trace.iterations} iters, slack_ok={slack_ok}, "
              f"residuals ({fmt_num(trace.rho_x[-1])}, {fmt_num(trace.rho_u[-1])})")
    if args.check_translated:
        solver = make_power_prox_solver(args.p, args.alpha)
        rep = bpam_mod.translated_stationarity_check(
            problem, trace.u, trace.x, args.translated_tol, solver)
        trans_ok = rep["ok"]
        detail += f", translated residual {fmt_num(rep['residual'])}"
    return slack_ok and res_ok and trans_ok, detail


def _suite_bpg(section, seed, out):
    problem, u0 = make_bpg_toy(section.getfloat("p", 0.5),
                               section.getint("alpha", 2),
                               section.getfloat("lam", 1.0),
                               section.getfloat("M", 5.0), seed)
    solver = make_power_prox_solver(section.getfloat("p", 0.5),
                                    section.getint("alpha", 2))
    rep = bpam_mod.bpg_equivalence_demo(problem, u0,
                                        section.getint("steps", 50), solver)
    tol = section.getfloat("tol", 1e-8)
    return rep["max_gap"] <= tol, f"max gap {fmt_num(rep['max_gap'])}"


def _suite_figure(section, seed, out):
    h, _, _ = curved_example()
    kernel = parse_kernel(section.get("kernel", "ball_example"), dim=2)
    expect = section.getboolean("expect_pass", True)
    scan = tangency_scan(kernel, h, np.zeros(2), np.array([0.0, -1.0]),
                         section.getfloat("lam", 0.2))
    return scan["passed"] == expect, (
        f"kernel {kernel.name}: passed={scan['passed']} "
        f"min gap {fmt_num(scan['min_gap'])}")


_SUITE_KINDS = {
    "kernel-duality": _suite_kernel_duality,
    "dual-identity": _suite_dual_identity,
    "prox-agreement": _suite_prox_agreement,
    "grad-check": _suite_grad_check,
    "complement-convexity": _suite_complement,
    "certify": _suite_certify,
    "bpam": _suite_bpam,
    "bpg-equiv": _suite_bpg,
    "figure": _suite_figure,
}


def bundled_config_path() -> str:
    return os.path.join(os.path.dirname(__file__), "data", "acceptance.cfg")


def cmd_run_suite(args) -> int:
    path = args.config
    if path == "acceptance":
        path = bundled_config_path()
    if not path or not os.path.isfile(path):
        raise ConfigError(f"config file not found: {args.config!r}")
    cfg = configparser.ConfigParser()
    try:
        cfg.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    master_seed = args.seed
    if cfg.has_section("suite"):
        master_seed = cfg.getint("suite", "seed", fallback=master_seed)
    out_root = args.out or (cfg.get("suite", "out", fallback="suite_out")
                            if cfg.has_section("suite") else "suite_out")
    os.makedirs(out_root, exist_ok=True)
    summary = []
    any_failed = False
    for name in cfg.sections():
        if name == "suite":
            continue
        section = cfg[name]
        kind = section.get("kind")
        if kind not in _SUITE_KINDS:
            raise ConfigError(f"section [{name}]: unknown kind {kind!r}")
        exp_out = os.path.join(out_root, name)
        os.makedirs(exp_out, exist_ok=True)
        seed = derive_seed(master_seed, name)
        passed, detail = _SUITE_KINDS[kind](section, seed, exp_out)
        summary.append((name, kind, passed, detail))
        any_failed |= not passed
        print(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
    write_csv(os.path.join(out_root, "summary.csv"),
              ["experiment", "kind", "passed", "detail"], summary)
    return EXIT_FAIL if any_failed else EXIT_OK


# ---------------------------------------------------------------------------
# argument parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="bregprox",
        description="Bregman proximal mappings, envelopes, regularity "
                    "certification and alternating minimization.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=1e-4)

    p = sub.add_parser("prox", help="evaluate Bregman prox over base points")
    common(p)
    p.add_argument("--f", required=True)
    p.add_argument("--kernel", default=None)
    p.add_argument("--lam", type=float, default=1.0)
    p.add_argument("--y", default=None)
    p.add_argument("--y-range", default=None)
    p.add_argument("--side", choices=["left", "right"], default="left")
    p.add_argument("--resolution", type=float, default=1e-3)
    p.add_argument("--oracle", action="store_true",
                   help="cross-check analytic results against the grid oracle")
    p.set_defaults(func=cmd_prox)

    p = sub.add_parser("envelope", help="envelope value sweep")
    common(p)
    p.add_argument("--f", required=True)
    p.add_argument("--kernel", required=True)
    p.add_argument("--lam", default="1.0", help="comma-separated step sizes")
    p.add_argument("--y", default=None)
    p.add_argument("--y-range", default=None)
    p.add_argument("--side", choices=["left", "right"], default="left")
    p.add_argument("--resolution", type=float, default=1e-3)
    p.set_defaults(func=cmd_envelope)

    p = sub.add_parser("grad-check", help="envelope gradients vs finite differences")
    common(p)
    p.add_argument("--formula",
                   choices=["all", "composed-left", "left", "right"],
                   default="all")
    p.add_argument("--n", type=int, default=50)
    p.set_defaults(func=cmd_grad_check)

    p = sub.add_parser("certify", help="prox-regularity certification")
    common(p)
    p.add_argument("--f", default="epigraph")
    p.add_argument("--kernel", default="ball_example")
    p.add_argument("--xbar", default="0,0")
    p.add_argument("--vbar", default="0,-1")
    p.add_argument("--eps", type=float, default=0.3)
    p.add_argument("--resolution", type=float, default=0.003)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("run-bpam", help="sparse-recovery alternating run")
    common(p)
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--alpha", type=int, default=2)
    p.add_argument("--lam", type=float, default=0.5)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--M", type=float, default=20.0)
    p.add_argument("--iters", type=int, default=10000)
    p.add_argument("--check-translated", action="store_true")
    p.add_argument("--translated-tol", type=float, default=1e-5)
    p.set_defaults(func=cmd_run_bpam, tol=1e-6)

    p = sub.add_parser("bpg-equiv", help="alternating vs envelope-gradient runs")
    common(p)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--alpha", type=int, default=2)
    p.add_argument("--lam", type=float, default=1.0)
    p.add_argument("--M", type=float, default=5.0)
    p.add_argument("--steps", type=int, default=50)
    p.set_defaults(func=cmd_bpg_equiv, tol=1e-8)

    p = sub.add_parser("figure", help="Bregman-ball tangency data and plot")
    common(p)
    p.add_argument("--kernel", default="ball_example")
    p.add_argument("--lam", type=float, default=0.2)
    p.add_argument("--width", type=float, default=0.25)
    p.add_argument("--n", type=int, default=400)
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("run-suite", help="run a config-defined experiment suite")
    common(p)
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_run_suite)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NotProxBounded, UnboundedSubproblem) as exc:
        print(f"unbounded: {exc}", file=sys.stderr)
        return EXIT_UNBOUNDED
    except BregproxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
