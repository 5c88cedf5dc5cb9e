"""Command-line interface.

Exit codes: 0 on success, 1 on usage errors, 2 on runtime failures.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import harness
from .dynamics import EvolutionConfig, curve_to_csv, success_probability_curve
from .gsat import GsatParams, gsat_solve
from .hamiltonian import HamiltonianSchedule
from .satcore import (count_solutions, generate_random_3sat,
                      generate_unique_solution_instance, parse_dimacs_record,
                      serialize_dimacs, InstanceRecord)
from .spectra import fit_crossing, spectrum_sweep, sweep_to_csv


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _add_common(p: _Parser):
    p.add_argument("--seed", type=int, default=0, help="master random seed")
    p.add_argument("--out", type=str, default=None, help="output file or directory")
    p.add_argument("--threads", type=int, default=1, help="worker processes")
    p.add_argument("--tolerance", type=float, default=1e-8, help="eigensolver tolerance")


def build_parser() -> _Parser:
    parser = _Parser(prog="adiasat",
                     description="Quantum adiabatic algorithm simulator for random 3-SAT")
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("generate", parents=[], help="write a random 3-SAT instance as DIMACS",
                       add_help=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=None, help="clause count (default: ratio*n)")
    p.add_argument("--ratio", type=float, default=3.0, help="m/n when --m is absent")
    p.add_argument("--unique", action="store_true",
                   help="rejection-sample until exactly one solution")
    p.add_argument("--max-trials", type=int, default=1_000_000)
    _add_common(p)

    p = sub.add_parser("count", help="count solutions of a DIMACS instance")
    p.add_argument("--cnf", type=str, required=True)
    _add_common(p)

    p = sub.add_parser("spectrum", help="sweep the low spectrum over the schedule")
    p.add_argument("--cnf", type=str, required=True)
    p.add_argument("--k", type=int, default=18)
    p.add_argument("--points", type=int, default=64)
    _add_common(p)

    p = sub.add_parser("gap", help="minimum gap and Landau-Zener fit for an instance")
    p.add_argument("--cnf", type=str, required=True)
    p.add_argument("--coarse-points", type=int, default=32)
    p.add_argument("--refine-tol", type=float, default=1e-4)
    _add_common(p)

    p = sub.add_parser("evolve", help="integrate the Schrodinger equation, report p(ground)")
    p.add_argument("--cnf", type=str, required=True)
    p.add_argument("--T", type=str, required=True,
                   help="total time, or comma list for a curve")
    p.add_argument("--dt", type=float, default=0.1)
    p.add_argument("--series-tol", type=float, default=1e-12)
    p.add_argument("--tau", type=float, default=None,
                   help="Landau-Zener time for the prediction column "
                        "(default: fitted from the spectrum)")
    _add_common(p)

    p = sub.add_parser("gsat", help="run GSAT with random-walk extension")
    p.add_argument("--cnf", type=str, required=True)
    p.add_argument("--p-walk", type=float, default=0.5)
    p.add_argument("--max-flips", type=int, default=None)
    p.add_argument("--max-restarts", type=int, default=100)
    _add_common(p)

    p = sub.add_parser("experiment", help="run a configured experiment pipeline")
    p.add_argument("--config", type=str, default=None, help="key = value config file")
    p.add_argument("--kind", type=str, default=None, choices=harness.KINDS)
    p.add_argument("--n", type=str, default=None, help="e.g. 8..14 or 8,10,12")
    p.add_argument("--ratio", type=str, default=None)
    p.add_argument("--instances", type=int, default=None)
    _add_common(p)

    p = sub.add_parser("fit", help="exponential fit a*exp(b*n) over CSV columns")
    p.add_argument("--csv", type=str, required=True)
    p.add_argument("--x", type=str, default="n")
    p.add_argument("--y", type=str, required=True)
    p.add_argument("--agg", type=str, default=None,
                   choices=("mean", "median", "min", "max"),
                   help="aggregate y per x value before fitting")
    _add_common(p)

    return parser


def _load_record(path: str) -> InstanceRecord:
    return parse_dimacs_record(Path(path).read_text())


def _cmd_generate(args) -> int:
    m = args.m if args.m is not None else round(args.ratio * args.n)
    if args.unique:
        rec = generate_unique_solution_instance(args.n, m, args.seed,
                                                max_trials=args.max_trials)
        text = serialize_dimacs(rec.formula, rec)
    else:
        formula = generate_random_3sat(args.n, m, args.seed)
        text = serialize_dimacs(formula,
                                InstanceRecord(formula, None, None, args.seed, None))
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_count(args) -> int:
    rec = _load_record(args.cnf)
    print(count_solutions(rec.formula))
    return 0


def _cmd_spectrum(args) -> int:
    rec = _load_record(args.cnf)
    ham = HamiltonianSchedule(rec.formula)
    grid = np.linspace(0.0, 1.0, args.points)
    samples = spectrum_sweep(ham, grid, k=min(args.k, ham.dim - 2), tol=args.tolerance)
    out = Path(args.out) if args.out else Path("spectrum.csv")
    if out.is_dir():
        out = out / "spectrum.csv"
    sweep_to_csv(samples, out)
    print(f"wrote {len(samples)} schedule points to {out}")
    return 0


def _cmd_gap(args) -> int:
    rec = _load_record(args.cnf)
    ham = HamiltonianSchedule(rec.formula)
    fit = fit_crossing(ham, coarse_points=args.coarse_points,
                       refine_tol=args.refine_tol, tol=args.tolerance)
    record = fit.to_dict()
    text = json.dumps(record, indent=1)
    print(text)
    if args.out:
        Path(args.out).write_text(text + "\n")
    return 0


def _cmd_evolve(args) -> int:
    rec = _load_record(args.cnf)
    ham = HamiltonianSchedule(rec.formula)
    if rec.solution is None:
        from .satcore import satisfying_assignments

        sols = satisfying_assignments(rec.formula, limit=2)
        if len(sols) != 1:
            raise RuntimeError("evolve needs a unique-solution instance "
                               "(give a file with a 'c solution' comment)")
        solution = sols[0]
    else:
        solution = rec.solution
    tau = args.tau
    if tau is None:
        tau = fit_crossing(ham, tol=args.tolerance).tau_lz
    T_list = [float(tok) for tok in args.T.split(",")]
    cfg = EvolutionConfig(T=T_list[0], dt=args.dt, series_tol=args.series_tol)
    records = success_probability_curve(ham, solution, T_list, config=cfg, tau_lz=tau)
    for r in records:
        print(f"T={r.T:g} p_ground={r.p_ground:.6f} "
              f"lz_success={1.0 - r.lz_prediction:.6f} norm_drift={r.norm_drift:.2e}")
    if args.out:
        out = Path(args.out)
        if out.is_dir():
            out = out / "lz_curve.csv"
        curve_to_csv(records, out)
    return 0


def _cmd_gsat(args) -> int:
    rec = _load_record(args.cnf)
    params = GsatParams(max_flips=args.max_flips, max_restarts=args.max_restarts,
                        p_walk=args.p_walk, seed=args.seed)
    result = gsat_solve(rec.formula, params)
    status = "solved" if result.solved else "unsolved"
    print(f"{status} flips={result.flips} restarts={result.restarts} "
          f"assignment={result.assignment}")
    return 0


def _cmd_experiment(args) -> int:
    overrides = {
        "kind": args.kind,
        "out_dir": args.out,
        "seed": args.seed if args.seed != 0 else None,
        "threads": args.threads if args.threads != 1 else None,
        "instances": args.instances,
        "n_values": harness._parse_int_list(args.n) if args.n else None,
        "ratios": tuple(float(t) for t in args.ratio.split(",")) if args.ratio else None,
    }
    if args.config:
        config = harness.parse_config_file(args.config, **overrides)
    else:
        if any(not overrides.get(k) for k in ("kind", "out_dir", "n_values")):
            _usage_error("experiment needs --config, or --kind with --out and --n")
        config = harness.ExperimentConfig(
            kind=overrides["kind"], out_dir=overrides["out_dir"],
            seed=overrides["seed"] or 0, threads=overrides["threads"] or 1,
            instances=overrides["instances"] or 50,
            n_values=overrides["n_values"],
            ratios=overrides["ratios"] or (3.0,))
    result = harness.run_experiment(config)
    print(f"{config.kind}: {len(result.rows)} rows, {result.failures} failures, "
          f"{result.wall_time_s:.1f} s -> {config.out_dir}")
    for name, fit in result.fits.items():
        print(f"  fit {name}: {fit.amplitude:.4g} * exp({fit.rate:+.4f} n) "
              f"(log-rms {fit.log_rms:.3g})")
    return 0


def _usage_error(message: str):
    print(f"adiasat: error: {message}", file=sys.stderr)
    raise SystemExit(1)


def _cmd_fit(args) -> int:
    rows = np.genfromtxt(args.csv, delimiter=",", names=True)
    names = rows.dtype.names
    if args.x not in names or args.y not in names:
        raise RuntimeError(f"csv columns are {names}; no {args.x!r}/{args.y!r}")
    x = np.atleast_1d(rows[args.x])
    y = np.atleast_1d(rows[args.y])
    if args.agg:
        agg = {"mean": np.mean, "median": harness.lower_median,
               "min": np.min, "max": np.max}[args.agg]
        xs = sorted(set(x.tolist()))
        ys = [float(agg([yy for xx, yy in zip(x, y) if xx == xv])) for xv in xs]
        x, y = np.array(xs), np.array(ys)
    fit = harness.fit_exponential(x, y)
    print(f"amplitude={fit.amplitude!r} rate={fit.rate!r} log_rms={fit.log_rms!r}")
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "count": _cmd_count,
    "spectrum": _cmd_spectrum,
    "gap": _cmd_gap,
    "evolve": _cmd_evolve,
    "gsat": _cmd_gsat,
    "experiment": _cmd_experiment,
    "fit": _cmd_fit,
}


def cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    except Exception as exc:  # runtime failures exit 2 with a message
        print(f"adiasat {args.command}: error: {exc}", file=sys.stderr)
        return 2


def main():  # console entry point
    raise SystemExit(cli())
