"""Command-line experiments: long runs, step-size sweeps and bound audits.

Exit codes: 0 success, 1 input error, 2 a checked contract failed (including
numerical blowup).
"""
import argparse
import json
import secrets
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import bounds
from .filters import catalog, get_filter
from .integrator import IntegrationError, IntegratorConfig, integrate, make_workspace, step
from .system import (
    OscillatorSystem,
    State,
    exchange_terms,
    linear_nonlinearity,
    random_state,
    random_system,
)
from .wave import C2_UPPER, WaveProblem, build_system, default_problem, rho_certificate

EXIT_OK, EXIT_INPUT, EXIT_CONTRACT = 0, 1, 2

# Contracts enforced on compliant runs.
MOD_DRIFT_RTOL = 1e-8
MOD_STEP_RTOL = 1e-13
EXCHANGE_RTOL = 1e-12
# analytic ceiling for ||A|| / ||V||_H1; the empirical sweep stays near 1.15
DEFAULT_C2 = C2_UPPER


class InputError(Exception):
    pass


def _parse_h_list(text):
    try:
        hs = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"bad --h-list {text!r}") from None
    if not hs or any(not h > 0 for h in hs):
        raise InputError("--h-list needs positive step sizes")
    return hs


def _load_json_arg(value, what):
    if value is None:
        return None
    text = value
    if not value.lstrip().startswith("{"):
        path = Path(value)
        if not path.exists():
            raise InputError(f"{what} file {value} does not exist")
        text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what} is not valid JSON: {exc}") from None


def _seed(args, log):
    if args.seed is None:
        args.seed = secrets.randbelow(2**32)
        log(f"seed: {args.seed}")
    return args.seed


def _ode_setup(args, log):
    data = _load_json_arg(args.system, "system")
    rng = np.random.default_rng(_seed(args, log))
    if data is None:
        sys_ = random_system(rng, args.dim, omega_max=args.omega_max, a_norm=args.a_norm)
    else:
        try:
            sys_ = OscillatorSystem.from_dict(data)
        except (ValueError, TypeError) as exc:
            raise InputError(str(exc)) from None
    st = data.get("state") if data else None
    if st:
        try:
            s0 = State(
                np.asarray(st["q_re"]) + 1j * np.asarray(st.get("q_im", 0.0)),
                np.asarray(st["qdot_re"]) + 1j * np.asarray(st.get("qdot_im", 0.0)),
            )
        except (KeyError, ValueError) as exc:
            raise InputError(f"bad initial state: {exc}") from None
    else:
        s0 = random_state(rng, sys_.d)
    if s0.q.shape != (sys_.d,):
        raise InputError("initial state dimension does not match the system")
    return sys_, s0


def _wave_setup(args, log):
    data = _load_json_arg(args.problem, "problem")
    try:
        if data is None:
            problem = default_problem(args.K or 32, 4.0 if args.rho is None else args.rho)
        else:
            problem = WaveProblem.from_dict(data, K=args.K, rho=args.rho)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    sys_, s0 = build_system(problem)
    return problem, sys_, s0


def _out_path(out, h, multi):
    if out in (None, "-"):
        return None
    p = Path(out)
    if not multi:
        return p
    return p.with_name(f"{p.stem}_h{h:g}{p.suffix}")


def _write_series(series, path, fmt):
    fh = sys.stdout if path is None else open(path, "w", newline="")
    try:
        if fmt == "json":
            series.to_json(fh)
        else:
            series.to_csv(fh)
    finally:
        if path is not None:
            fh.close()


def _run_one(sys_, s0, fp, h, steps, stride, formulation):
    """Integrate and summarize; returns (series, summary dict)."""
    cfg = IntegratorConfig(h, fp, formulation)
    summary = {"h": h, "filter": fp.name, "steps": steps}
    try:
        _, series = integrate(sys_, None, cfg, s0, steps, stride)
    except IntegrationError as exc:
        summary.update(blowup_step=exc.step, ok=False)
        return exc.series, summary
    scale = float(series.scale.max()) if len(series) else 0.0
    mod_drift = series.max_abs_drift("mod")
    summary.update(
        max_abs_drift_H=series.max_abs_drift("H"),
        max_abs_drift_mod=mod_drift,
        max_rel_step_defect=series.max_rel_step_defect,
        scale=scale,
        advisory=cfg.advisory,
    )
    ok = True
    if fp.hl_compliant and len(series):
        ok = mod_drift <= MOD_DRIFT_RTOL * scale and (
            series.max_rel_step_defect <= MOD_STEP_RTOL
        )
    summary["ok"] = ok
    return series, summary


def _sweep_job(payload):
    system_dict, q, v, name, h, steps, stride, formulation = payload
    sys_ = OscillatorSystem.from_dict(system_dict)
    return _run_one(sys_, State(q, v), get_filter(name), h, steps, stride, formulation)


def _emit_summary(summaries, to_stderr, extra=None):
    stream = sys.stderr if to_stderr else sys.stdout
    for s in summaries:
        stream.write(json.dumps(s, default=_jsonable) + "\n")
    if extra is not None:
        stream.write(json.dumps(extra, default=_jsonable) + "\n")


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    return str(x)


def cmd_ode(args):
    to_stderr = args.out in (None, "-")
    log = (lambda m: print(m, file=sys.stderr)) if to_stderr else print
    fp = get_filter(args.filter)
    sys_, s0 = _ode_setup(args, log)
    series, summary = _run_one(sys_, s0, fp, args.h, args.steps, args.stride, args.formulation)
    _write_series(series, _out_path(args.out, args.h, False), args.format)
    _emit_summary([summary], to_stderr)
    return EXIT_OK if summary["ok"] else EXIT_CONTRACT


def _run_many(jobs_payload, n_jobs):
    if n_jobs <= 1 or len(jobs_payload) == 1:
        return [_sweep_job(p) for p in jobs_payload]
    with ProcessPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(_sweep_job, jobs_payload))


def cmd_sweep(args):
    to_stderr = args.out in (None, "-")
    log = (lambda m: print(m, file=sys.stderr)) if to_stderr else print
    hs = _parse_h_list(args.h_list) if args.h_list else [args.h]
    names = [n.strip() for n in args.filter.split(",")]
    for n in names:
        get_filter(n)
    sys_, s0 = _ode_setup(args, log)
    payload = [
        (sys_.to_dict(), s0.q, s0.qdot, n, h, args.steps, args.stride, args.formulation)
        for n in names
        for h in hs
    ]
    results = _run_many(payload, args.jobs)
    multi = len(results) > 1
    summaries = []
    for (series, summary), p in zip(results, payload):
        path = _out_path(args.out, p[4], multi)
        if path is not None and len(names) > 1:
            path = path.with_name(f"{path.stem}_{p[3]}{path.suffix}")
        _write_series(series, path, args.format)
        summaries.append(summary)
    _emit_summary(summaries, to_stderr)
    return EXIT_OK if all(s["ok"] for s in summaries) else EXIT_CONTRACT


def cmd_wave(args):
    to_stderr = args.out in (None, "-")
    problem, sys_, s0 = _wave_setup(args, print if not to_stderr else lambda m: None)
    fp = get_filter(args.filter)
    hs = _parse_h_list(args.h_list) if args.h_list else [args.h]
    cert = rho_certificate(problem, fp, args.c2)
    summaries = []
    ok = True
    for h in hs:
        series, summary = _run_one(sys_, s0, fp, h, args.steps, args.stride, args.formulation)
        if cert.certified and "blowup_step" not in summary and len(series):
            rep = bounds.unconditional_bound_check(sys_, fp, h, s0, series)
            summary["drift_ceiling"] = rep.ceiling
            summary["ceiling_holds"] = rep.certified
            summary["ok"] = summary["ok"] and rep.certified
        ok = ok and summary["ok"]
        _write_series(series, _out_path(args.out, h, len(hs) > 1), args.format)
        summaries.append(summary)
    _emit_summary(summaries, to_stderr, {"certificate": cert.to_dict()})
    return EXIT_OK if ok else EXIT_CONTRACT


def _na(exc):
    return {"status": "not applicable", "reason": str(exc)}


def audit_run(sys_, s0, fp, h, steps, formulation="splitting", extra=None):
    """Run one trajectory and evaluate every bound on it. Returns (report, ok)."""
    cfg = IntegratorConfig(h, fp, formulation)
    stride = max(1, steps // 1000) if steps else 1
    report = {"filter": fp.name, "h": h, "steps": steps, "advisory_h_gt_1": h > 1}
    hard_ok = True
    try:
        _, series = integrate(sys_, None, cfg, s0, steps, stride, keep_states=True)
    except IntegrationError as exc:
        report["blowup_step"] = exc.step
        return report, False
    report["observed_max_drift_H"] = series.max_abs_drift("H")
    report["observed_max_drift_mod"] = series.max_abs_drift("mod")

    bc = bounds.bound_constants(sys_, fp)
    report["constants"] = bc.__dict__
    worst1 = worst2 = np.inf
    close_ok = True
    states = [s0] + [
        State(q, v) for q, v in zip(series.states_q if series.states_q is not None else [],
                                    series.states_qdot if series.states_qdot is not None else [])
    ]
    for s in states:
        r = bounds.closeness_check(sys_, fp, h, s, bc)
        worst1, worst2 = min(worst1, r.slack_first), min(worst2, r.slack_second)
        close_ok = close_ok and r.ok
    report["closeness"] = {"worst_slack_first": worst1, "worst_slack_second": worst2,
                           "states": len(states), "ok": close_ok}
    hard_ok &= close_ok

    if fp.hl_compliant and len(series):
        scale = float(series.scale.max())
        mod = {
            "max_rel_step_defect": series.max_rel_step_defect,
            "rel_drift": series.max_abs_drift("mod") / scale if scale else 0.0,
        }
        mod["ok"] = bool(mod["max_rel_step_defect"] <= MOD_STEP_RTOL
                         and mod["rel_drift"] <= MOD_DRIFT_RTOL)
        report["modified_energy"] = mod
        hard_ok &= mod["ok"]
    else:
        report["modified_energy"] = _na("filter pair is not compliant")

    try:
        r = bounds.drift_bound_check(sys_, fp, h, series, bc)
        report["drift_bound"] = dict(r.__dict__)
        hard_ok &= r.ok
    except bounds.HypothesisNotMet as exc:
        report["drift_bound"] = _na(exc)

    try:
        r = bounds.unconditional_bound_check(sys_, fp, h, s0, series, bc)
        report["unconditional"] = dict(r.__dict__)
        hard_ok &= r.certified
    except bounds.HypothesisNotMet as exc:
        report["unconditional"] = _na(exc)

    if fp.hl_compliant:
        g = linear_nonlinearity(sys_)
        ws = make_workspace(sys_, h, fp)
        s, worst = s0, 0.0
        for _ in range(min(steps, 100)):
            s1 = step(sys_, None, cfg, ws, s)
            worst = max(worst, _exchange_rel_defect(sys_, g, fp, h, s, s1))
            s = s1
        report["exchange"] = {"max_rel_defect": worst, "ok": worst <= EXCHANGE_RTOL}
        hard_ok &= worst <= EXCHANGE_RTOL
    else:
        report["exchange"] = _na("filter pair is not compliant")
    if extra:
        report.update(extra)
    report["ok"] = bool(hard_ok)
    return report, bool(hard_ok)


def _exchange_rel_defect(sys_, g, fp, h, s, s1):
    lhs, rhs, ca, cb = exchange_terms(sys_, g, fp, h, s, s1)
    scale = max(abs(lhs), abs(rhs), abs(ca), abs(cb), 1e-300)
    return abs(lhs - rhs) / scale


def cmd_audit(args):
    log = lambda m: print(m, file=sys.stderr)  # noqa: E731
    fp = get_filter(args.filter)
    extra = None
    if args.kind == "wave":
        problem, sys_, s0 = _wave_setup(args, log)
        extra = {"certificate": rho_certificate(problem, fp, args.c2).to_dict()}
    else:
        sys_, s0 = _ode_setup(args, log)
    report, ok = audit_run(sys_, s0, fp, args.h, args.steps, args.formulation, extra)
    text = json.dumps(report, default=_jsonable, indent=2)
    if args.out in (None, "-"):
        print(text)
    else:
        Path(args.out).write_text(text + "\n")
    return EXIT_OK if ok else EXIT_CONTRACT


def cmd_filters(args):
    rows = []
    for name, fp in catalog().items():
        rows.append(
            {
                "name": name,
                "phi": fp.phi.label,
                "psi1": fp.psi1.label,
                "c0": fp.c0,
                "c1": fp.c1,
                "hl_compliant": fp.hl_compliant,
            }
        )
    if args.format == "json":
        print(json.dumps(rows, indent=2))
    else:
        print(f"{'name':<14} {'phi':<6} {'psi1':<7} {'c0':>4} {'c1':>5}  compliant")
        for r in rows:
            print(
                f"{r['name']:<14} {r['phi']:<6} {r['psi1']:<7} {r['c0']:>4g} "
                f"{r['c1']:>5g}  {'yes' if r['hl_compliant'] else 'no'}"
            )
    return EXIT_OK


def _common(p, with_h=True):
    p.add_argument("--filter", default="deuflhard",
                   help="deuflhard | hairer-lubich | gautschi | unfiltered")
    p.add_argument("--formulation", choices=("splitting", "direct"), default="splitting")
    if with_h:
        p.add_argument("--h", type=float, default=0.1, help="step size")
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--stride", type=int, default=None, help="record every N steps")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)


def _ode_args(p):
    p.add_argument("--system", help="system JSON file or inline JSON object")
    p.add_argument("--dim", type=int, default=4, help="dimension of a random system")
    p.add_argument("--omega-max", type=float, default=1e3)
    p.add_argument("--a-norm", type=float, default=1.0)


def _wave_args(p):
    p.add_argument("--problem", help="problem JSON file or inline JSON object")
    p.add_argument("--K", type=int, default=None)
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--c2", type=float, default=DEFAULT_C2,
                   help="estimate of the constant in ||A|| <= c2 ||V||_H1")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="oscint", description="Trigonometric integrators and energy audits"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ode", help="long run of an oscillatory ODE")
    _common(p)
    _ode_args(p)
    p.set_defaults(func=cmd_ode)

    p = sub.add_parser("sweep", help="runs over several step sizes and filters")
    _common(p)
    _ode_args(p)
    p.add_argument("--h-list", help="comma-separated step sizes")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("wave", help="Klein-Gordon collocation runs")
    _common(p)
    _wave_args(p)
    p.add_argument("--h-list", help="comma-separated step sizes")
    p.set_defaults(func=cmd_wave)

    p = sub.add_parser("audit", help="bound audit of one run (JSON report)")
    _common(p)
    _ode_args(p)
    _wave_args(p)
    p.add_argument("--kind", choices=("ode", "wave"), default="ode")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("filters", help="list the filter catalog")
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.set_defaults(func=cmd_filters)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        if getattr(args, "steps", 0) is not None and getattr(args, "steps", 0) < 0:
            raise InputError("--steps must be nonnegative")
        if getattr(args, "stride", None) is not None and args.stride < 1:
            raise InputError("--stride must be at least 1")
        if hasattr(args, "h") and not args.h > 0:
            raise InputError("--h must be positive")
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
