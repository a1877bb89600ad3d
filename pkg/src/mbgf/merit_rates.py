"""Merit-function estimation, criticality measures, rate checks, Lyapunov monitors.

The merit function is u0(x) = sup_z min_i (f_i(x) - f_i(z)): nonnegative
everywhere and zero exactly at weak Pareto points.  The sup is attained
inside any box containing L(f, f(x)) because z outside that level set makes
some f_i(z) > f_i(x) and hence the inner min negative.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateScalingError, GridBudgetError, InvalidInputError
from .geometry import _min_norm_weights
from .scaling import gradnorm_eta, scaled_hull_generators

GRID_BUDGET = 20_000_000
_CHUNK = 500_000


@dataclass(frozen=True)
class MeritEstimate:
    value: float
    certified_error: float
    witness: np.ndarray
    heuristic: bool = False


@dataclass(frozen=True)
class RateReport:
    name: str
    constant: float
    observed_sup: float
    slack: float
    verdict: str
    slope: float = field(default=float("nan"))


def _check_point(p, x):
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape != (p.n,) or not np.all(np.isfinite(x)):
        raise InvalidInputError(f"x must be a finite vector of length {p.n}")
    return x


def _grid_axes(box, h):
    sides = box.hi - box.lo
    counts = np.maximum(1, np.ceil(sides / h).astype(int) + 1)
    total = int(np.prod(counts.astype(float)))
    if total > GRID_BUDGET:
        raise GridBudgetError(
            f"u0 grid needs {total} points (> {GRID_BUDGET}); shrink the box, "
            "coarsen h, or use u0_ascent for convex problems",
            requested=total, budget=GRID_BUDGET)
    return [np.linspace(lo, hi, c) for lo, hi, c in zip(box.lo, box.hi, counts)]


def u0_certified(p, x, box, h):
    """Grid maximum of z -> min_i(f_i(x) - f_i(z)) over a covering box.

    The box must contain L(f, f(x)).  The returned value underestimates the
    true sup by at most certified_error = M_region * h * sqrt(n) / 2, since
    the inner function is M_region-Lipschitz in z.
    """
    x = _check_point(p, x)
    if not (np.isfinite(h) and h > 0):
        raise InvalidInputError(f"grid spacing h must be > 0, got {h!r}")
    fx = p.value(x)
    axes = _grid_axes(box, h)
    best_val, best_z = 0.0, x  # z = x is always admissible and gives 0
    rest = int(np.prod([len(a) for a in axes[1:]])) if len(axes) > 1 else 1
    block = max(1, _CHUNK // rest)
    for lo in range(0, len(axes[0]), block):
        mesh = np.meshgrid(axes[0][lo:lo + block], *axes[1:], indexing="ij")
        chunk = np.stack([g.ravel() for g in mesh], axis=-1)
        inner = (fx - p._value(chunk)).min(axis=-1)
        j = int(np.argmax(inner))
        if inner[j] > best_val:
            best_val, best_z = float(inner[j]), chunk[j].copy()
    err = p.grad_bound * h * np.sqrt(p.n) / 2.0
    return MeritEstimate(value=best_val, certified_error=float(err), witness=best_z)


def u0_ascent(p, x, starts=20, iters=400, seed=0):
    """Multi-start projected supergradient ascent for convex problems.

    The inner function min_i(f_i(x) - f_i(z)) is concave in z when every f_i
    is convex, so the multi-start ascent attains the global sup up to the
    step-size schedule; the estimate carries a heuristic flag instead of a
    certified error.
    """
    x = _check_point(p, x)
    if p.convexity_class not in ("convex", "strongly_convex"):
        raise InvalidInputError(
            f"u0_ascent needs a convex problem, got {p.convexity_class!r}")
    fx = p.value(x)
    box = p.level_set_bound(fx).box
    lo, hi = box.lo, box.hi
    rng = np.random.default_rng(seed)
    Z = lo + rng.random((max(1, starts - 1), p.n)) * (hi - lo)
    Z = np.vstack([Z, x[None, :]])
    diam = float(np.linalg.norm(hi - lo))
    best_val, best_z = 0.0, x
    for t in range(iters):
        F = p._value(Z)
        inner = (fx - F).min(axis=-1)
        j = int(np.argmax(inner))
        if inner[j] > best_val:
            best_val, best_z = float(inner[j]), Z[j].copy()
        active = np.argmin(fx - F, axis=-1)
        G = -np.take_along_axis(p._grads(Z), active[:, None, None], axis=1)[:, 0, :]
        norms = np.maximum(1.0, np.sqrt((G * G).sum(axis=-1)))
        step = diam / (t + 2.0)
        Z = np.clip(Z + (step / norms)[:, None] * G, lo, hi)
    return MeritEstimate(value=best_val, certified_error=0.0,
                         witness=best_z, heuristic=True)


def criticality(p, x, rule=None):
    """(unscaled, scaled) min-norm criticality measures at x.

    unscaled uses the raw gradient hull; scaled uses the gradient-norm
    balanced hull (eta = 0 by default).  A degenerate scaling only affects
    the scaled figure; the raised error carries the unscaled value.
    """
    x = _check_point(p, x)
    G = p.grads(x)
    du = _min_norm_weights(G) @ G
    unscaled = float(np.sqrt(du @ du))
    if rule is None:
        rule = gradnorm_eta(0.0)
    try:
        Gs = scaled_hull_generators(rule, p, x, 0.0)
    except DegenerateScalingError as e:
        e.unscaled_criticality = unscaled
        raise
    ds = _min_norm_weights(Gs) @ Gs
    return unscaled, float(np.sqrt(ds @ ds))


def fit_loglog_slope(ts, values):
    """Least-squares slope of log value vs log t over the final decade,
    excluding the first 10% of the horizon and nonpositive values."""
    ts = np.asarray(ts, dtype=float)
    values = np.asarray(values, dtype=float)
    t_max = ts.max()
    mask = (ts >= t_max / 10.0) & (ts >= ts.min() + 0.1 * (t_max - ts.min()))
    mask &= (values > 0) & (ts > 0)
    if mask.sum() < 2:
        return float("nan")
    A = np.vstack([np.log(ts[mask]), np.ones(mask.sum())]).T
    coef, *_ = np.linalg.lstsq(A, np.log(values[mask]), rcond=None)
    return float(coef[0])


def check_bound(ts, values, *, name, constant, bound_fn, slack=0.05,
                running_min=False):
    """Compare a (t, value) series against a theoretical bound curve.

    bound_fn maps the time grid to the bound values; the verdict passes iff
    sup_t value/bound <= 1 + slack.  For min-over-prefix statements the
    running minimum is formed before comparison.
    """
    ts = np.asarray(ts, dtype=float)
    values = np.asarray(values, dtype=float)
    if ts.shape != values.shape or ts.ndim != 1 or ts.size == 0:
        raise InvalidInputError("series must be matching 1-D arrays")
    if running_min:
        values = np.minimum.accumulate(values)
    bounds = np.asarray(bound_fn(ts), dtype=float)
    if np.any(bounds <= 0):
        raise InvalidInputError("bound curve must be positive on the series")
    observed = float((values / bounds).max())
    return RateReport(
        name=name, constant=float(constant), observed_sup=observed,
        slack=float(slack),
        verdict="pass" if observed <= 1.0 + slack else "fail",
        slope=fit_loglog_slope(ts, values))


def _monitor_record(values, slack_scale=1e-6):
    values = np.asarray(values, dtype=float)
    diffs = np.diff(values)
    slack = slack_scale * (1.0 + np.abs(values[:-1]))
    worst = float((diffs - slack).max()) if diffs.size else 0.0
    return {"values": values,
            "worst_increase": float(diffs.max()) if diffs.size else 0.0,
            "ok": bool(worst <= 0.0)}


def lyapunov_monitors(run, which, z, p=None, rule=None):
    """Evaluate named Lyapunov monitors on a recorded run.

    which: iterable from {"h", "convex", "strongly_convex", "accelerated",
    "discrete"}.  z must lie in the level set of the final record.  Each
    monitor is checked for monotone non-increase within slack
    1e-6 * (1 + |monitor|) per record.
    """
    if p is None:
        from .problems import get_problem
        p = get_problem(run.problem_name)
    if rule is None:
        from .scaling import parse_scaling
        rule = parse_scaling(run.rule_spec)
    z = _check_point(p, z)
    fz = p.value(z)
    f_final = run.f_values[-1]
    if np.any(fz > f_final + 1e-9 * (1.0 + np.abs(f_final))):
        raise InvalidInputError("z must lie in the level set of the final record")

    gaps = run.f_values - fz              # (N, m)
    d2 = ((run.states - z) ** 2).sum(axis=-1)
    out = {}
    for name in which:
        if name == "h":
            out["h"] = _monitor_record(0.5 * d2)
        elif name == "convex":
            amax = rule.declared_bounds(p)[1]
            vals = (run.times / amax) * gaps.min(axis=-1) + 0.5 * d2
            out["convex_E"] = _monitor_record(vals)
        elif name == "strongly_convex":
            amax = rule.declared_bounds(p)[1]
            vals = np.exp(run.times / amax) * (gaps.min(axis=-1) + 0.5 * d2)
            out["strongly_convex_W"] = _monitor_record(vals)
        elif name == "accelerated":
            if run.velocities is None:
                raise InvalidInputError("accelerated monitor needs recorded velocities")
            alphas = np.asarray(rule.values, dtype=float)
            theta = run.config.theta
            w = (run.times + theta)[:, None]
            shifted = 2.0 * (run.states - z) + w * run.velocities
            norm2 = 0.5 * (shifted ** 2).sum(axis=-1)
            E = (w ** 2) * gaps / alphas + norm2[:, None]
            for i in range(p.m):
                out[f"accel_E_{i}"] = _monitor_record(E[:, i])
            out["accel_E_min"] = _monitor_record(E.min(axis=-1))
        elif name == "discrete":
            from .discrete import merit_coefficient
            vals = run.ks * gaps.min(axis=-1) + merit_coefficient(run) * d2
            out["discrete_E"] = _monitor_record(vals)
        else:
            raise InvalidInputError(f"unknown monitor {name!r}")
    return out
