"""Command-line interface.

Exit codes: 0 success, 1 usage/input error, 2 model assertion failed
(a scientific regression such as a lower-bound mismatch or a potential
contraction violation).  Output on stdout is machine-readable
``name value`` lines; diagnostics go to stderr.  Identical argv and
seed produce identical stdout bytes.
"""

from __future__ import annotations

import argparse
import sys

from . import bounds, engine, harness, potential, stats
from .bounds import ModelAssertionError
from .rng import SplitMix64, derive_seed
from .workloads import UnitTasks, WeightedTasks, dag_for_work, DagTasks


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _emit(name, value):
    if isinstance(value, float):
        print(f"{name} {value:.6f}")
    else:
        print(f"{name} {value}")


def _cmd_bounds(args) -> int:
    m = args.m
    _emit("two_lambda_unit", 2.0 * bounds.lam("unit", m))
    nu_star, best = bounds.optimize_nu("power", m)
    _emit("min_nu_lambda", best)
    _emit("nu_star", nu_star)
    _emit("three_lambda_coop3", 3.0 * bounds.lam("coop", m, nu=3.0))
    _emit("three_lambda_dag", 3.0 * bounds.lam("dag", m))
    _emit("lambda_limit", bounds.LAMBDA_LIMIT)
    if args.W:
        _emit("bound_unit_variance",
              bounds.makespan_bound("unit_variance", args.W, m).expected)
        _emit("bound_unit_power",
              bounds.makespan_bound("unit_power", args.W, m).expected)
        _emit("bound_unit_coop",
              bounds.makespan_bound("unit_coop", args.W, m).expected)
        if args.n and args.p_max:
            _emit("bound_weighted",
                  bounds.makespan_bound("weighted", args.W, m,
                                        n=args.n, p_max=args.p_max).expected)
        if args.D:
            _emit("bound_dag",
                  bounds.makespan_bound("dag", args.W, m, D=args.D).expected)
    return 0


def _cmd_run(args) -> int:
    try:
        config = harness.load_config(args.config)
    except (OSError, ValueError, KeyError) as e:
        print(f"error: cannot load config: {e}", file=sys.stderr)
        return 1
    if args.seed is not None:
        from dataclasses import replace
        config = replace(config, seed=args.seed)
    rec = harness.run_one(config)
    for name in harness.CSV_HEADER:
        _emit(name, getattr(rec, name))
    return 0


def _cmd_sweep(args) -> int:
    try:
        spec = harness.load_sweep(args.config)
    except (OSError, ValueError, KeyError) as e:
        print(f"error: cannot load sweep spec: {e}", file=sys.stderr)
        return 1
    if args.seed is not None:
        from dataclasses import replace
        spec = replace(spec, master_seed=args.seed)
    if args.reps is not None:
        from dataclasses import replace
        spec = replace(spec, replications=args.reps)
    records = harness.run_sweep(spec, workers=args.workers)
    harness.write_csv(records, args.out)
    _emit("rows", len(records))
    _emit("out", args.out)
    return 0


def _cmd_fit(args) -> int:
    try:
        records = harness.read_csv(args.csv)
    except (OSError, ValueError) as e:
        print(f"error: cannot read CSV: {e}", file=sys.stderr)
        return 1
    values = [getattr(r, args.column) - args.shift for r in records]
    for fit in (stats.fit_gev_pwm(values), stats.fit_gaussian(values)):
        fit = stats.evaluate_fit(fit, values)
        tag = fit.family
        for name, val in zip(("mu", "sigma", "xi") if tag == "gev" else ("mean", "sd"),
                             fit.params):
            _emit(f"{tag}_{name}", val)
        _emit(f"{tag}_chi2", fit.chi2)
        _emit(f"{tag}_dof", fit.dof)
        _emit(f"{tag}_p_value", fit.p_value)
    return 0


def _cmd_slope(args) -> int:
    W_list = [2 ** e for e in range(args.wexp_lo, args.wexp_hi + 1)]
    res = harness.slope_experiment(args.m, W_list, args.reps,
                                   master_seed=args.seed or 0,
                                   cooperative=args.coop, workers=args.workers)
    _emit("slope", res.slope)
    _emit("intercept", res.intercept)
    _emit("r_squared", res.r_squared)
    return 0


def _cmd_coop_ratio(args) -> int:
    res = harness.coop_ratio_experiment(args.m, args.W, args.reps,
                                        master_seed=args.seed or 0)
    _emit("ratio", res.ratio)
    _emit("mean_steals_standard", res.mean_steals_standard)
    _emit("mean_steals_cooperative", res.mean_steals_cooperative)
    return 0


def _cmd_lower_bound(args) -> int:
    res = bounds.lower_bound_run(args.k, check=False)
    _emit("cmax", res.cmax)
    _emit("expected", args.k + 2)
    _emit("steals_total", res.steals_total)
    if res.cmax != args.k + 2:
        print("error: lower-bound construction mismatch", file=sys.stderr)
        return 2
    return 0


def _cmd_verify_potential(args) -> int:
    from .verify import random_reachable_state, scenario_setup

    rng = SplitMix64(derive_seed(args.seed or 0, 0xFEED))
    failures = 0
    checked = 0
    for s in range(args.states):
        sim = random_reachable_state(args.scenario, rng, max_m=args.m)
        kind, nu, h_fn = scenario_setup(args.scenario, sim.m)
        res = potential.verify_one_step_decrease(sim, kind, h_fn,
                                                 samples=args.samples, rng=rng,
                                                 nu=nu)
        if res.skipped:
            continue
        checked += 1
        if not res.passed:
            failures += 1
            print(f"state {s}: estimate {res.expected_after:.6g} exceeds "
                  f"bound {res.bound:.6g}", file=sys.stderr)
    _emit("states_checked", checked)
    _emit("failures", failures)
    return 2 if failures else 0


def main(argv=None) -> int:
    parser = _Parser(prog="worksteal",
                     description="work-stealing scheduler simulator and analysis")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="print bound constants")
    p.add_argument("--m", type=int, default=1024)
    p.add_argument("--W", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--p-max", dest="p_max", type=int)
    p.add_argument("--D", type=int)
    p.add_argument("--nu", type=float)
    p.add_argument("--seed", type=int)
    p.set_defaults(fn=_cmd_bounds)

    p = sub.add_parser("run", help="run one configuration from JSON")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("sweep", help="run a sweep spec, write CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--reps", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int)
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("fit", help="fit GEV and Gaussian to a CSV column")
    p.add_argument("--csv", required=True)
    p.add_argument("--column", default="cmax")
    p.add_argument("--shift", type=int, default=0)
    p.add_argument("--seed", type=int)
    p.set_defaults(fn=_cmd_fit)

    p = sub.add_parser("slope", help="overhead slope against log2(W)")
    p.add_argument("--m", type=int, default=1024)
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--wexp-lo", type=int, default=13)
    p.add_argument("--wexp-hi", type=int, default=20)
    p.add_argument("--coop", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int)
    p.set_defaults(fn=_cmd_slope)

    p = sub.add_parser("coop-ratio", help="cooperative steal saving")
    p.add_argument("--m", type=int, default=128)
    p.add_argument("--W", type=int, default=2 ** 17)
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--seed", type=int)
    p.set_defaults(fn=_cmd_coop_ratio)

    p = sub.add_parser("lower-bound", help="best-case cascade construction")
    p.add_argument("k", type=int)
    p.add_argument("--seed", type=int)
    p.set_defaults(fn=_cmd_lower_bound)

    p = sub.add_parser("verify-potential", help="one-step contraction checks")
    p.add_argument("--scenario", choices=("unit", "power", "coop", "dag"),
                   default="unit")
    p.add_argument("--states", type=int, default=20)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--m", type=int, default=6)
    p.add_argument("--seed", type=int)
    p.set_defaults(fn=_cmd_verify_potential)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ModelAssertionError as e:
        print(f"model assertion failed: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
