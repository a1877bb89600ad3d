"""Command-line surface: experiment configs, deterministic runs, artifacts.

One binary with subcommands (run, accel, discrete, verify, list-problems)
sharing a single config format.  Configs are accepted as JSON objects or
key=value lines; unknown keys are rejected by name, defaults are filled in,
and a validated config round-trips losslessly through its serialized form.
Trajectory/iterate CSVs print floats with 17 significant digits so they parse
back to the exact in-memory doubles.

Exit codes: 0 run complete / all checks pass, 1 check failure, 2 usage or
config error, 3 numeric-domain or divergence error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from .errors import (MBGFError, InvalidInputError, ConfigError,
                     NumericDomainError, DivergenceError,
                     DegenerateScalingError, NoConvergenceError,
                     GridBudgetError)
from .problems import get_problem, list_problems, level_set_bound
from .scaling import parse_scaling
from .flow import FlowConfig, integrate_first_order, integrate_accelerated
from .discrete import DiscreteConfig, run_discrete
from .merit_rates import RateReport, check_bound
from . import verify as verify_mod

# Short names accepted anywhere a problem name is; stored canonically.
PROBLEM_ALIASES = {
    "p1": "unbalanced-convex",
    "p2": "strongly-convex",
    "p3": "nonconvex-bounded-grad",
    "p4": "scalar-pair",
}

MODES = ("flow", "accel", "discrete")

# Rate reports a config may request by name.
RATE_NAMES = ("runmin-criticality", "merit-cheap")


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated run description; hashable and equality-comparable.

    t_end is required for the flow modes and optional (unused) for discrete.
    x0 and scaling are always concrete after validation, so serializing and
    re-parsing reproduces the identical config.
    """

    problem: str
    mode: str = "flow"
    x0: tuple = ()
    scaling: str = ""
    t_end: float = None
    dt: float = 1e-3
    r: float = 3.0
    theta: float = 1.0
    iters: int = 1000
    safety: float = 0.99
    stop_tol: float = 0.0
    record_every: int = 1
    seed: int = 0
    rates: tuple = ()
    out_csv: str = None
    out_json: str = None

    def to_dict(self):
        return {
            "problem": self.problem, "mode": self.mode,
            "x0": list(self.x0), "scaling": self.scaling,
            "t_end": self.t_end, "dt": self.dt,
            "r": self.r, "theta": self.theta,
            "iters": self.iters, "safety": self.safety,
            "stop_tol": self.stop_tol, "record_every": self.record_every,
            "seed": self.seed, "rates": list(self.rates),
            "out_csv": self.out_csv, "out_json": self.out_json,
        }

    def to_text(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


_FIELD_NAMES = tuple(f.name for f in fields(ExperimentConfig))


def _require_number(key, v):
    if isinstance(v, bool) or not isinstance(v, (int, float, np.integer,
                                                 np.floating)):
        raise ConfigError(f"{key}: malformed number, got {v!r}")
    v = float(v)
    if not np.isfinite(v):
        raise ConfigError(f"{key}: must be finite, got {v!r}")
    return v


def _require_int(key, v, lo):
    if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
        raise ConfigError(f"{key}: expected an integer, got {v!r}")
    if v < lo:
        raise ConfigError(f"{key}: must be >= {lo}, got {v}")
    return int(v)


def _require_str(key, v):
    if not isinstance(v, str):
        raise ConfigError(f"{key}: expected a string, got {v!r}")
    return v


def resolve_problem_name(name):
    return PROBLEM_ALIASES.get(name, name)


def validate_config(raw):
    """Validate a plain dict into an ExperimentConfig, naming the first
    offending key on error and filling documented defaults."""
    if not isinstance(raw, dict):
        raise ConfigError(f"config: expected a mapping, got {type(raw).__name__}")
    for key in raw:
        if key not in _FIELD_NAMES:
            raise ConfigError(f"unknown config key {key!r}")

    if "problem" not in raw:
        raise ConfigError("problem: missing (required)")
    pname = resolve_problem_name(_require_str("problem", raw["problem"]))
    p = get_problem(pname)  # ConfigError on unknown, lists known names

    mode = _require_str("mode", raw.get("mode", "flow"))
    if mode not in MODES:
        raise ConfigError(f"mode: expected one of {', '.join(MODES)}, got {mode!r}")

    x0_raw = raw.get("x0", list(p.starts[0]))
    if not isinstance(x0_raw, (list, tuple)):
        raise ConfigError(f"x0: expected a list of {p.n} numbers, got {x0_raw!r}")
    x0 = tuple(_require_number("x0", v) for v in x0_raw)
    if len(x0) != p.n:
        raise ConfigError(f"x0: expected {p.n} coordinates, got {len(x0)}")

    scaling = _require_str("scaling", raw.get(
        "scaling", "const:" + ",".join(["1"] * p.m)))
    rule = parse_scaling(scaling)  # ConfigError on bad syntax
    if rule.variant == "constant" and len(rule.values) != p.m:
        raise ConfigError(
            f"scaling: const needs {p.m} values for {pname}, got {len(rule.values)}")
    if mode == "accel" and rule.variant != "constant":
        raise ConfigError("scaling: accel mode requires a constant scaling")

    t_end = raw.get("t_end")
    if t_end is None:
        if mode in ("flow", "accel"):
            raise ConfigError("t_end: missing (required for flow/accel modes)")
    else:
        t_end = _require_number("t_end", t_end)
        if t_end <= 0:
            raise ConfigError(f"t_end: must be > 0, got {t_end!r}")

    dt = _require_number("dt", raw.get("dt", 1e-3))
    if dt <= 0:
        raise ConfigError(f"dt: must be > 0, got {dt!r}")
    r = _require_number("r", raw.get("r", 3.0))
    if r <= 0:
        raise ConfigError(f"r: must be > 0, got {r!r}")
    theta = _require_number("theta", raw.get("theta", 1.0))
    if theta <= 0:
        raise ConfigError(f"theta: must be > 0, got {theta!r}")
    iters = _require_int("iters", raw.get("iters", 1000), lo=1)
    safety = _require_number("safety", raw.get("safety", 0.99))
    if not 0.0 < safety <= 1.0:
        raise ConfigError(f"safety: must lie in (0, 1], got {safety!r}")
    stop_tol = _require_number("stop_tol", raw.get("stop_tol", 0.0))
    if stop_tol < 0:
        raise ConfigError(f"stop_tol: must be >= 0, got {stop_tol!r}")
    record_every = _require_int("record_every", raw.get("record_every", 1), lo=1)
    seed = _require_int("seed", raw.get("seed", 0), lo=-(2 ** 63))

    rates_raw = raw.get("rates", [])
    if isinstance(rates_raw, str):
        rates_raw = [rates_raw]
    if not isinstance(rates_raw, (list, tuple)):
        raise ConfigError(f"rates: expected a list of names, got {rates_raw!r}")
    rates = tuple(_require_str("rates", v) for v in rates_raw)
    for name in rates:
        if name not in RATE_NAMES:
            raise ConfigError(
                f"rates: unknown report {name!r} (known: {', '.join(RATE_NAMES)})")
    if "runmin-criticality" in rates:
        if mode not in ("flow",) or not rule.variant.startswith("gradnorm") \
                or not rule.eta > 0:
            raise ConfigError("rates: runmin-criticality needs mode=flow and "
                              "a gradnorm scaling with eta > 0")
        if t_end <= 1:
            raise ConfigError("rates: runmin-criticality is evaluated on "
                              "t in [1, t_end]; need t_end > 1")
    if "merit-cheap" in rates and mode != "discrete":
        raise ConfigError("rates: merit-cheap needs mode=discrete")

    out_csv = raw.get("out_csv")
    if out_csv is not None:
        out_csv = _require_str("out_csv", out_csv)
    out_json = raw.get("out_json")
    if out_json is not None:
        out_json = _require_str("out_json", out_json)

    return ExperimentConfig(
        problem=pname, mode=mode, x0=x0, scaling=scaling, t_end=t_end,
        dt=dt, r=r, theta=theta, iters=iters, safety=safety,
        stop_tol=stop_tol, record_every=record_every, seed=seed,
        rates=rates, out_csv=out_csv, out_json=out_json)


def _parse_kv_value(key, raw):
    raw = raw.strip()
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        pass
    if key in ("x0", "rates") and "," in raw:
        parts = [tok.strip() for tok in raw.split(",") if tok.strip()]
        if key == "rates":
            return parts
        try:
            return [float(tok) for tok in parts]
        except ValueError:
            raise ConfigError(f"x0: malformed number in {raw!r}") from None
    return raw


def parse_config(text):
    """Parse config text (a JSON object, or key=value lines with # comments)
    into a validated ExperimentConfig."""
    if not isinstance(text, str):
        raise ConfigError("config: expected text")
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            raw = json.loads(stripped)
        except json.JSONDecodeError as e:
            raise ConfigError(f"config: invalid JSON ({e})") from None
        return validate_config(raw)
    raw = {}
    for lineno, line in enumerate(stripped.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(
                f"config line {lineno}: expected key=value, got {line!r}")
        key = key.strip()
        if key in raw:
            raise ConfigError(f"{key}: duplicate key (line {lineno})")
        raw[key] = _parse_kv_value(key, value)
    return validate_config(raw)


# ---------------------------------------------------------------------------
# CSV / JSON persistence


def _fmt(v):
    return f"{float(v):.17g}"


def trajectory_csv_text(tr):
    """CSV with header; columns t, x_*, [v_* accel], f_*, speed,
    crit_unscaled, crit_scaled, [W_* accel]."""
    n = tr.states.shape[1]
    m = tr.f_values.shape[1]
    accel = tr.mode == "accelerated"
    header = ["t"] + [f"x_{i}" for i in range(n)]
    cols = [tr.times] + [tr.states[:, i] for i in range(n)]
    if accel:
        header += [f"v_{i}" for i in range(n)]
        cols += [tr.velocities[:, i] for i in range(n)]
    header += [f"f_{i}" for i in range(m)] + ["speed", "crit_unscaled",
                                              "crit_scaled"]
    cols += [tr.f_values[:, i] for i in range(m)]
    cols += [tr.speeds, tr.crit_unscaled, tr.crit_scaled]
    if accel:
        header += [f"W_{i}" for i in range(m)]
        cols += [tr.energies[:, i] for i in range(m)]
    lines = [",".join(header)]
    for row in zip(*cols):
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def iterates_csv_text(seq):
    """CSV with header; columns k, x_*, f_*, step, crit_unscaled, crit_scaled."""
    n = seq.states.shape[1]
    m = seq.f_values.shape[1]
    header = (["k"] + [f"x_{i}" for i in range(n)] +
              [f"f_{i}" for i in range(m)] +
              ["step", "crit_unscaled", "crit_scaled"])
    cols = ([seq.states[:, i] for i in range(n)] +
            [seq.f_values[:, i] for i in range(m)] +
            [seq.steps, seq.crit_unscaled, seq.crit_scaled])
    lines = [",".join(header)]
    for k, row in zip(seq.ks, zip(*cols)):
        lines.append(",".join([str(int(k))] + [_fmt(v) for v in row]))
    return "\n".join(lines) + "\n"


def _write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def _jf(v):
    v = float(v)
    return v if np.isfinite(v) else None


def _report_dict(rep):
    return {"name": rep.name, "constant": _jf(rep.constant),
            "observed_sup": _jf(rep.observed_sup), "slope": _jf(rep.slope),
            "slack": _jf(rep.slack), "verdict": rep.verdict}


def summary_json_text(summary):
    return json.dumps(summary, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# Run orchestration


def _min_gap(p, x0):
    return float((p.value(np.asarray(x0, dtype=float)) - p.lower_bounds).min())


def _rate_reports(cfg, p, rule, result):
    reports = []
    for name in cfg.rates:
        if name == "runmin-criticality":
            # Running-min scaled criticality against sqrt(gap / (eta t)).
            gap = _min_gap(p, cfg.x0)
            runmin = np.minimum.accumulate(result.crit_scaled)
            mask = result.times >= 1.0
            eta = rule.eta
            rep = check_bound(
                result.times[mask], runmin[mask], name=name, constant=gap,
                bound_fn=lambda t: np.sqrt(gap) / np.sqrt(eta * t))
        else:  # merit-cheap
            # k * min_i(f_i(x_k) - inf f_i) against (alpha_max/s_min) R^2.
            amax = rule.declared_bounds(p)[1]
            lsb = level_set_bound(p, p.value(np.asarray(cfg.x0, dtype=float)))
            C = amax / result.s_min * lsb.radius ** 2
            cheap = (result.f_values - p.lower_bounds).min(axis=1)
            ks = np.asarray(result.ks, dtype=float)
            mask = ks >= 1.0
            if not mask.any():
                # stopped at a critical point before k=1: nothing to bound
                rep = RateReport(name=name, constant=float(C),
                                 observed_sup=0.0, slack=0.05,
                                 verdict="pass", slope=float("nan"))
            else:
                rep = check_bound(ks[mask], cheap[mask], name=name,
                                  constant=C, bound_fn=lambda k: C / k)
        reports.append(rep)
    return reports


def run_experiment(cfg):
    """Execute one configured run; write requested artifacts; return the
    summary dict (also written to cfg.out_json when set)."""
    p = get_problem(cfg.problem)
    rule = parse_scaling(cfg.scaling)
    x0 = np.asarray(cfg.x0, dtype=float)

    start = time.perf_counter()
    if cfg.mode == "flow":
        fc = FlowConfig(t_end=cfg.t_end, dt=cfg.dt,
                        record_every=cfg.record_every)
        result = integrate_first_order(p, rule, x0, fc)
    elif cfg.mode == "accel":
        fc = FlowConfig(t_end=cfg.t_end, dt=cfg.dt, mode="accelerated",
                        r=cfg.r, theta=cfg.theta,
                        record_every=cfg.record_every)
        result = integrate_accelerated(p, rule, x0, fc)
    else:
        dc = DiscreteConfig(max_iters=cfg.iters, step="paper_default",
                            safety=cfg.safety, stop_tol=cfg.stop_tol)
        result = run_discrete(p, rule, x0, dc)
    wall = time.perf_counter() - start

    reports = _rate_reports(cfg, p, rule, result)

    if cfg.out_csv:
        text = (iterates_csv_text(result) if cfg.mode == "discrete"
                else trajectory_csv_text(result))
        _write_text(cfg.out_csv, text)

    final = {
        "x": [float(v) for v in result.states[-1]],
        "f": [float(v) for v in result.f_values[-1]],
        "crit_unscaled": float(result.crit_unscaled[-1]),
        "crit_scaled": float(result.crit_scaled[-1]),
    }
    if cfg.mode == "discrete":
        final["k"] = int(result.ks[-1])
    else:
        final["t"] = float(result.times[-1])
    summary = {
        "config": cfg.to_dict(),
        "records": len(result),
        "final": final,
        "rate_reports": [_report_dict(r) for r in reports],
        "wall_time_s": wall,
    }
    if cfg.out_json:
        _write_text(cfg.out_json, summary_json_text(summary))
    return summary


# ---------------------------------------------------------------------------
# Subcommands


def _merge_cli_config(args, mode):
    if args.config is not None:
        try:
            with open(args.config, "r", encoding="utf-8") as f:
                text = f.read()
        except OSError as e:
            raise ConfigError(f"config: cannot read {args.config!r} ({e})") from None
        stripped = text.strip()
        if stripped.startswith("{"):
            try:
                raw = json.loads(stripped)
            except json.JSONDecodeError as e:
                raise ConfigError(f"config: invalid JSON ({e})") from None
            if not isinstance(raw, dict):
                raise ConfigError("config: expected a JSON object")
        else:
            # Reuse the key=value reader, deferring validation to the end.
            raw = {}
            for lineno, line in enumerate(stripped.splitlines(), start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                key, sep, value = line.partition("=")
                if not sep:
                    raise ConfigError(
                        f"config line {lineno}: expected key=value, got {line!r}")
                key = key.strip()
                if key in raw:
                    raise ConfigError(f"{key}: duplicate key (line {lineno})")
                raw[key] = _parse_kv_value(key, value)
    else:
        raw = {}

    file_mode = raw.get("mode")
    if mode == "flow":
        raw.setdefault("mode", "flow")
    else:
        if file_mode is not None and file_mode != mode:
            raise ConfigError(
                f"mode: config file says {file_mode!r} but the subcommand is {mode}")
        raw["mode"] = mode

    overrides = {
        "problem": args.problem, "scaling": args.scaling,
        "seed": args.seed, "out_csv": args.out, "out_json": args.summary,
    }
    if args.x0 is not None:
        try:
            overrides["x0"] = [float(tok) for tok in args.x0.split(",")]
        except ValueError:
            raise ConfigError(f"x0: malformed number in {args.x0!r}") from None
    if args.rates is not None:
        overrides["rates"] = [tok.strip() for tok in args.rates.split(",")
                              if tok.strip()]
    for attr, key in (("t_end", "t_end"), ("dt", "dt"), ("r", "r"),
                      ("theta", "theta"), ("iters", "iters"),
                      ("safety", "safety"), ("stop_tol", "stop_tol"),
                      ("record_every", "record_every")):
        if hasattr(args, attr) and getattr(args, attr) is not None:
            overrides[key] = getattr(args, attr)
    for key, value in overrides.items():
        if value is not None:
            raw[key] = value
    return validate_config(raw)


def _print_run_summary(summary, out):
    final = summary["final"]
    where = f"t = {final['t']:g}" if "t" in final else f"k = {final['k']}"
    fvals = ", ".join(f"{v:.6g}" for v in final["f"])
    print(f"{summary['config']['problem']} [{summary['config']['mode']}] "
          f"finished at {where} ({summary['records']} records, "
          f"{summary['wall_time_s']:.2f} s)", file=out)
    print(f"  final f = ({fvals})", file=out)
    print(f"  criticality: unscaled {final['crit_unscaled']:.3e}, "
          f"scaled {final['crit_scaled']:.3e}", file=out)
    for rep in summary["rate_reports"]:
        sup = "n/a" if rep["observed_sup"] is None else f"{rep['observed_sup']:.4g}"
        print(f"  rate {rep['name']}: {rep['verdict']} "
              f"(sup value/bound = {sup})", file=out)


def _cmd_run(args, mode):
    cfg = _merge_cli_config(args, mode)
    summary = run_experiment(cfg)
    _print_run_summary(summary, sys.stdout)
    if cfg.out_csv:
        print(f"wrote {cfg.out_csv}")
    if cfg.out_json:
        print(f"wrote {cfg.out_json}")
    bad = [r for r in summary["rate_reports"] if r["verdict"] != "pass"]
    return 1 if bad else 0


def _worker_count(n_tasks):
    raw = os.environ.get("MBGF_THREADS")
    if raw is None:
        cap = os.cpu_count() or 1
    else:
        try:
            cap = int(raw)
        except ValueError:
            raise ConfigError(f"MBGF_THREADS: expected an integer, got {raw!r}") from None
        if cap < 1:
            raise ConfigError(f"MBGF_THREADS: must be >= 1, got {cap}")
    return max(1, min(n_tasks, cap))


def _cmd_verify(args):
    names = verify_mod.SUITES if args.suite == "all" else (args.suite,)
    workers = _worker_count(len(names))
    seed = args.seed
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(
                lambda nm: verify_mod.run_suite(nm, seed=seed), names))
    else:
        reports = [verify_mod.run_suite(nm, seed=seed) for nm in names]

    for rep in reports:
        print(verify_mod.format_report(rep))
        print()
    n_pass = sum(verify_mod.suite_passed(r) for r in reports)
    print(f"verify: {n_pass}/{len(reports)} suites passed (seed {seed})")

    if args.json is not None:
        payload = {"seed": seed, "reports": reports}
        _write_text(args.json, json.dumps(payload, indent=2, sort_keys=True) + "\n")
        print(f"wrote {args.json}")
    return 0 if n_pass == len(reports) else 1


def _cmd_list_problems(args):
    alias_of = {v: k for k, v in PROBLEM_ALIASES.items()}
    for name in list_problems():
        p = get_problem(name)
        start = ", ".join(f"{v:g}" for v in p.starts[0])
        alias = f"  (alias {alias_of[name]})" if name in alias_of else ""
        print(f"{name}: m={p.m} n={p.n} start=({start}){alias}")
    return 0


def _add_common(sub):
    sub.add_argument("--config", help="config file (JSON object or key=value lines)")
    sub.add_argument("--problem", help="problem name (p1..p4 or full name)")
    sub.add_argument("--scaling", help="scaling spec, e.g. const:1,1 or "
                                       "gradnorm:eta=0.1,min=0.1,max=10")
    sub.add_argument("--x0", help="start point, comma separated, e.g. 1,0")
    sub.add_argument("--seed", type=int, help="seed recorded in the summary")
    sub.add_argument("--rates", help="comma-separated rate reports to attach "
                                     f"({', '.join(RATE_NAMES)})")
    sub.add_argument("--out", help="trajectory/iterate CSV path")
    sub.add_argument("--summary", help="summary JSON path")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mbgf",
        description="Balanced multiobjective gradient flows: runs and checks.")
    subs = parser.add_subparsers(dest="command", required=True)

    run = subs.add_parser("run", help="integrate the first-order flow")
    _add_common(run)
    run.add_argument("--t-end", dest="t_end", type=float)
    run.add_argument("--dt", type=float)
    run.add_argument("--record-every", dest="record_every", type=int)
    run.set_defaults(fn=lambda a: _cmd_run(a, "flow"))

    accel = subs.add_parser("accel", help="integrate the accelerated flow")
    _add_common(accel)
    accel.add_argument("--t-end", dest="t_end", type=float)
    accel.add_argument("--dt", type=float)
    accel.add_argument("--r", type=float, help="damping exponent (>= 3 for the rate)")
    accel.add_argument("--theta", type=float, help="time shift in the damping")
    accel.add_argument("--record-every", dest="record_every", type=int)
    accel.set_defaults(fn=lambda a: _cmd_run(a, "accel"))

    disc = subs.add_parser("discrete", help="run the discrete method")
    _add_common(disc)
    disc.add_argument("--iters", type=int)
    disc.add_argument("--safety", type=float)
    disc.add_argument("--stop-tol", dest="stop_tol", type=float)
    disc.set_defaults(fn=lambda a: _cmd_run(a, "discrete"))

    ver = subs.add_parser("verify", help="run bound-based verification suites")
    ver.add_argument("--suite", default="all",
                     help="suite name or 'all' (default); see docs for names")
    ver.add_argument("--seed", type=int, default=verify_mod.DEFAULT_SEED)
    ver.add_argument("--json", help="write the JSON report here")
    ver.set_defaults(fn=_cmd_verify)

    lp = subs.add_parser("list-problems", help="list registered problems")
    lp.set_defaults(fn=_cmd_list_problems)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    try:
        return args.fn(args)
    except (ConfigError, InvalidInputError, GridBudgetError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (NumericDomainError, DivergenceError, DegenerateScalingError,
            NoConvergenceError, MBGFError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
