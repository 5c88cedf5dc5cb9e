"""Experiment pipelines behind the scaling figures, plus the exponential fits.

Each experiment kind maps a seeded configuration to CSV files with fixed,
documented headers (schema v1, see README) and a plain-text manifest.  All
randomness is pre-derived per instance from (master seed, kind, index), so
results are a pure function of the configuration and reruns are byte
identical regardless of the worker count.
"""

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .dynamics import EvolutionConfig, curve_to_csv, success_probability_curve
from .gsat import GsatParams, GsatResult, gsat_solve
from .hamiltonian import HamiltonianSchedule, degeneracy_histogram, h0_spectrum
from .satcore import (Formula, generate_random_3sat, generate_unique_solution_instance,
                      is_satisfiable)
from .spectra import FitError, fit_crossing, spectrum_sweep, sweep_to_csv

KINDS = ("degeneracy", "excited-scaling", "rarity", "spectrum", "lz-check",
         "gap-scaling", "gsat-compare")

_KIND_CODE = {kind: i + 1 for i, kind in enumerate(KINDS)}


class ExperimentError(RuntimeError):
    """Configuration problem or too many per-instance failures."""


@dataclass(frozen=True)
class ExpFit:
    """Parameters of y = amplitude * exp(rate * n) from a log-linear fit."""

    amplitude: float
    rate: float
    log_rms: float


def fit_exponential(n_values, y_values) -> ExpFit:
    """Least squares on (n, ln y); requires >= 3 strictly positive points."""
    n_values = np.asarray(n_values, dtype=float)
    y_values = np.asarray(y_values, dtype=float)
    if n_values.shape != y_values.shape or n_values.ndim != 1:
        raise ValueError("n and y must be 1-d arrays of equal length")
    if len(n_values) < 3:
        raise ValueError(f"need at least 3 points, got {len(n_values)}")
    if np.any(y_values <= 0):
        raise ValueError("exponential fit needs strictly positive y values")
    log_y = np.log(y_values)
    rate, intercept = np.polyfit(n_values, log_y, 1)
    resid = log_y - (intercept + rate * n_values)
    return ExpFit(amplitude=float(np.exp(intercept)), rate=float(rate),
                  log_rms=float(np.sqrt(np.mean(resid**2))))


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment run.  Unused knobs are ignored by other kinds."""

    kind: str
    out_dir: str
    seed: int = 0
    n_values: tuple[int, ...] = ()
    ratios: tuple[float, ...] = (3.0,)
    instances: int = 50
    threads: int = 1
    tol: float = 1e-8
    # spectrum / gap pipeline
    k: int = 18
    sweep_points: int = 64
    coarse_points: int = 32
    refine_tol: float = 1e-4
    # dynamics
    dt: float = 0.1
    series_tol: float = 1e-12
    t_points: int = 8
    t_span: tuple[float, float] = (0.2, 5.0)
    # gsat
    p_walk: float = 0.35
    max_flips: int | None = None
    max_restarts: int = 100
    r1_ratios: tuple[float, ...] = (3.0,)
    # generation
    max_trials: int = 1_000_000

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ExperimentError(f"unknown experiment kind {self.kind!r}; "
                                  f"choose from {', '.join(KINDS)}")
        if self.instances < 1:
            raise ExperimentError("instances must be >= 1")
        if not self.n_values:
            raise ExperimentError("need at least one n value")
        if any(r <= 0 for r in self.ratios):
            raise ExperimentError("ratios must be positive")
        if self.threads < 1:
            raise ExperimentError("threads must be >= 1")


@dataclass
class ExperimentResult:
    kind: str
    paths: dict[str, Path]
    fits: dict[str, ExpFit] = field(default_factory=dict)
    rows: list = field(default_factory=list)
    failures: int = 0
    wall_time_s: float = 0.0


def instance_seed(master: int, kind: str, index: int) -> int:
    """Stable per-instance seed: hash of (master, experiment code, index)."""
    ss = np.random.SeedSequence(entropy=(int(master), _KIND_CODE[kind], int(index)))
    return int(ss.generate_state(1, np.uint64)[0])


def lower_median(values) -> float:
    """Median that picks the lower middle element for even counts."""
    ordered = sorted(float(v) for v in values)
    if not ordered:
        raise ValueError("empty sequence")
    return ordered[(len(ordered) - 1) // 2]


def _write_csv(path: Path, header: str, rows) -> None:
    with open(path, "w") as f:
        f.write(header + "\n")
        for row in rows:
            f.write(",".join(_fmt(x) for x in row) + "\n")


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _run_tasks(worker, tasks, threads: int):
    """Map worker over tasks, preserving order; pool only when threads > 1."""
    if threads <= 1 or len(tasks) <= 1:
        return [worker(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, tasks, chunksize=1))


# ---------------------------------------------------------------------------
# per-instance workers (module level so they pickle for the process pool)

def _unique_instance(n: int, ratio: float, seed: int, max_trials: int):
    m = round(ratio * n)
    return generate_unique_solution_instance(n, m, seed, max_trials=max_trials)


def _histogram_task(args):
    n, ratio, seed, max_trials = args
    rec = _unique_instance(n, ratio, seed, max_trials)
    table = degeneracy_histogram(rec.formula)
    return table.counts


def _excited_task(args):
    n, ratio, seed, max_trials = args
    rec = _unique_instance(n, ratio, seed, max_trials)
    return degeneracy_histogram(rec.formula).count(1)


def _rarity_task(args):
    n, ratio, seed, max_trials = args
    return _unique_instance(n, ratio, seed, max_trials).trials


def _gap_task(args):
    n, ratio, seed, cfg = args
    rec = _unique_instance(n, ratio, seed, cfg["max_trials"])
    ham = HamiltonianSchedule(rec.formula)
    try:
        fit = fit_crossing(ham, coarse_points=cfg["coarse_points"],
                           refine_tol=cfg["refine_tol"], tol=cfg["tol"])
    except FitError as exc:
        return ("error", n, seed, str(exc))
    return ("ok", n, seed, rec.formula.m, fit.s_star, fit.delta, fit.slope,
            fit.tau_lz, fit.residual)


def _lz_task(args):
    index, n, ratio, seed, cfg = args
    rec = _unique_instance(n, ratio, seed, cfg["max_trials"])
    ham = HamiltonianSchedule(rec.formula)
    fit = fit_crossing(ham, coarse_points=cfg["coarse_points"],
                       refine_tol=cfg["refine_tol"], tol=cfg["tol"])
    lo, hi = cfg["t_span"]
    T_grid = np.linspace(lo * fit.tau_lz, hi * fit.tau_lz, cfg["t_points"])
    evo = EvolutionConfig(T=0.0, dt=cfg["dt"], series_tol=cfg["series_tol"])
    records = success_probability_curve(ham, rec.solution, T_grid, config=evo,
                                        tau_lz=fit.tau_lz)
    err = float(np.mean([abs(r.p_ground - (1.0 - r.lz_prediction)) for r in records]))
    return (index, n, seed, rec.formula.m, fit.delta, fit.slope, fit.tau_lz,
            err, records)


def _gsat_bank_task(args):
    """Generate one instance of the requested class and solve it."""
    n, ratio, seed, klass, p_walk, max_flips, max_restarts, max_trials = args
    m = round(ratio * n)
    rng = np.random.default_rng(seed)
    if klass == "r=1":
        rec = generate_unique_solution_instance(n, m, seed, max_trials=max_trials)
        formula = rec.formula
    else:
        while True:
            formula = generate_random_3sat(n, m, int(rng.integers(2**63)))
            if is_satisfiable(formula):
                break
    params = GsatParams(max_flips=max_flips, max_restarts=max_restarts,
                        p_walk=p_walk, seed=seed)
    result: GsatResult = gsat_solve(formula, params)
    budget = (max_flips if max_flips is not None else 10 * n * n) * (max_restarts + 1)
    return (result.flips if result.solved else budget, result.solved)


# ---------------------------------------------------------------------------
# experiment runners

def _seeds(config: ExperimentConfig, count: int, offset: int = 0):
    return [instance_seed(config.seed, config.kind, offset + i) for i in range(count)]


def _run_degeneracy(config: ExperimentConfig, out: Path) -> ExperimentResult:
    n = config.n_values[0]
    rows = []
    offset = 0
    for ratio in config.ratios:
        seeds = _seeds(config, config.instances, offset)
        offset += config.instances
        tasks = [(n, ratio, s, config.max_trials) for s in seeds]
        counts = _run_tasks(_histogram_task, tasks, config.threads)
        width = max(len(c) for c in counts)
        total = np.zeros(width)
        for c in counts:
            total[:len(c)] += c
        mean = total / len(counts)
        for e in range(width):
            rows.append((ratio, e, float(mean[e])))
    path = out / "degeneracy.csv"
    _write_csv(path, "m_over_n,energy,mean_count", rows)
    return ExperimentResult(kind=config.kind, paths={"degeneracy": path}, rows=rows)


def _run_excited(config: ExperimentConfig, out: Path) -> ExperimentResult:
    ratio = config.ratios[0]
    rows = []
    means = []
    for j, n in enumerate(config.n_values):
        seeds = _seeds(config, config.instances, j * config.instances)
        tasks = [(n, ratio, s, config.max_trials) for s in seeds]
        counts = _run_tasks(_excited_task, tasks, config.threads)
        mean = float(np.mean(counts))
        rows.append((n, ratio, mean))
        means.append(mean)
    path = out / "excited_degeneracy.csv"
    _write_csv(path, "n,m_over_n,mean_first_excited_count", rows)
    fits = {}
    if len(config.n_values) >= 3:
        fits["excited"] = fit_exponential(list(config.n_values), means)
    return ExperimentResult(kind=config.kind, paths={"excited_degeneracy": path},
                            fits=fits, rows=rows)


def _run_rarity(config: ExperimentConfig, out: Path) -> ExperimentResult:
    ratio = config.ratios[0]
    rows = []
    means = []
    for j, n in enumerate(config.n_values):
        seeds = _seeds(config, config.instances, j * config.instances)
        tasks = [(n, ratio, s, config.max_trials) for s in seeds]
        trials = _run_tasks(_rarity_task, tasks, config.threads)
        arr = np.array(trials, dtype=float)
        rows.append((n, float(arr.mean()), float(arr.std())))
        means.append(float(arr.mean()))
    path = out / "rarity.csv"
    _write_csv(path, "n,mean_trials,std_trials", rows)
    fits = {}
    if len(config.n_values) >= 3:
        fits["rarity"] = fit_exponential(list(config.n_values), means)
    return ExperimentResult(kind=config.kind, paths={"rarity": path}, fits=fits, rows=rows)


def _run_spectrum(config: ExperimentConfig, out: Path) -> ExperimentResult:
    n = config.n_values[0]
    seed = _seeds(config, 1)[0]
    rec = _unique_instance(n, config.ratios[0], seed, config.max_trials)
    ham = HamiltonianSchedule(rec.formula)
    grid = np.linspace(0.0, 1.0, config.sweep_points)
    samples = spectrum_sweep(ham, grid, k=min(config.k, ham.dim - 2), tol=config.tol)
    paths = {"spectrum": out / "spectrum.csv",
             "h0_degeneracy": out / "h0_degeneracy.csv",
             "h1_degeneracy": out / "h1_degeneracy.csv",
             "gap_fit": out / "gap_fit.json"}
    sweep_to_csv(samples, paths["spectrum"])
    h0_spectrum(n).to_csv(paths["h0_degeneracy"])
    degeneracy_histogram(rec.formula).to_csv(paths["h1_degeneracy"])
    fit = fit_crossing(ham, coarse_points=config.coarse_points,
                       refine_tol=config.refine_tol, tol=config.tol)
    with open(paths["gap_fit"], "w") as f:
        json.dump({"n": n, "m": rec.formula.m, "seed": seed, **fit.to_dict()}, f, indent=1)
    rows = [(float(s.s), *map(float, s.eigenvalues)) for s in samples]
    return ExperimentResult(kind=config.kind, paths=paths, rows=rows)


def _run_lz_check(config: ExperimentConfig, out: Path) -> ExperimentResult:
    ratio = config.ratios[0]
    cfg = {"max_trials": config.max_trials, "coarse_points": config.coarse_points,
           "refine_tol": config.refine_tol, "tol": config.tol, "dt": config.dt,
           "series_tol": config.series_tol, "t_points": config.t_points,
           "t_span": config.t_span}
    seeds = _seeds(config, config.instances)
    tasks = [(i, config.n_values[i % len(config.n_values)], ratio, seeds[i], cfg)
             for i in range(config.instances)]
    results = _run_tasks(_lz_task, tasks, config.threads)
    paths = {}
    summary = []
    for index, n, seed, m, delta, slope, tau, err, records in results:
        curve_path = out / f"lz_curve_{index:02d}.csv"
        curve_to_csv(records, curve_path)
        paths[f"lz_curve_{index:02d}"] = curve_path
        summary.append((index, n, seed, m, delta, slope, tau, err))
    paths["lz_summary"] = out / "lz_summary.csv"
    _write_csv(paths["lz_summary"],
               "index,n,seed,m,delta,slope,tau_lz,mean_abs_err", summary)
    return ExperimentResult(kind=config.kind, paths=paths, rows=summary)


def _run_gap_scaling(config: ExperimentConfig, out: Path) -> ExperimentResult:
    ratio = config.ratios[0]
    cfg = {"max_trials": config.max_trials, "coarse_points": config.coarse_points,
           "refine_tol": config.refine_tol, "tol": config.tol}
    rows = []
    failures = 0
    for j, n in enumerate(config.n_values):
        seeds = _seeds(config, config.instances, j * config.instances)
        tasks = [(n, ratio, s, cfg) for s in seeds]
        for res in _run_tasks(_gap_task, tasks, config.threads):
            if res[0] == "error":
                failures += 1
            else:
                rows.append(res[1:])
    total = config.instances * len(config.n_values)
    if failures > 0.1 * total:
        raise ExperimentError(f"{failures}/{total} instances failed the crossing fit")
    paths = {"gap_scaling": out / "gap_scaling.csv",
             "gap_scaling_summary": out / "gap_scaling_summary.csv"}
    _write_csv(paths["gap_scaling"],
               "n,seed,m,s_star,delta,slope,tau_lz,residual", rows)
    summary = []
    by_n: dict[int, list] = {}
    for row in rows:
        by_n.setdefault(row[0], []).append(row)
    for n in sorted(by_n):
        deltas = [r[4] for r in by_n[n]]
        taus = [r[6] for r in by_n[n]]
        summary.append((n,
                        float(np.mean(deltas)), float(np.min(deltas)),
                        float(np.max(deltas)), lower_median(deltas),
                        float(np.mean(taus)), float(np.min(taus)),
                        float(np.max(taus)), lower_median(taus)))
    _write_csv(paths["gap_scaling_summary"],
               "n,mean_delta,min_delta,max_delta,median_delta,"
               "mean_tau_lz,min_tau_lz,max_tau_lz,median_tau_lz", summary)
    ns = [row[0] for row in summary]
    fits = {}
    if len(ns) >= 3:
        fits = {
            "mean_delta": fit_exponential(ns, [row[1] for row in summary]),
            "min_delta": fit_exponential(ns, [row[2] for row in summary]),
            "mean_tau": fit_exponential(ns, [row[5] for row in summary]),
            "max_tau": fit_exponential(ns, [row[7] for row in summary]),
            "median_tau": fit_exponential(ns, [row[8] for row in summary]),
        }
    result = ExperimentResult(kind=config.kind, paths=paths, fits=fits, rows=rows)
    result.failures = failures
    return result


def _run_gsat_compare(config: ExperimentConfig, out: Path) -> ExperimentResult:
    n = config.n_values[0]
    rows = []
    offset = 0
    for klass, ratios in (("r>=1", config.ratios), ("r=1", config.r1_ratios)):
        for ratio in ratios:
            seeds = _seeds(config, config.instances, offset)
            offset += config.instances
            tasks = [(n, ratio, s, klass, config.p_walk, config.max_flips,
                      config.max_restarts, config.max_trials) for s in seeds]
            results = _run_tasks(_gsat_bank_task, tasks, config.threads)
            flips = np.array([r[0] for r in results], dtype=float)
            unsolved = sum(1 for r in results if not r[1])
            rows.append((ratio, n, klass, float(flips.mean()),
                         float(flips.std()), unsolved))
    path = out / "gsat.csv"
    _write_csv(path, "m_over_n,n,instance_class,mean_flips,std_flips,unsolved_count", rows)
    return ExperimentResult(kind=config.kind, paths={"gsat": path}, rows=rows)


_RUNNERS = {
    "degeneracy": _run_degeneracy,
    "excited-scaling": _run_excited,
    "rarity": _run_rarity,
    "spectrum": _run_spectrum,
    "lz-check": _run_lz_check,
    "gap-scaling": _run_gap_scaling,
    "gsat-compare": _run_gsat_compare,
}


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Execute one experiment kind and persist CSVs plus a manifest."""
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    result = _RUNNERS[config.kind](config, out)
    result.wall_time_s = time.perf_counter() - t0
    _write_manifest(config, result, out)
    result.paths["manifest"] = out / "manifest.txt"
    return result


def _write_manifest(config: ExperimentConfig, result: ExperimentResult, out: Path):
    import scipy

    from . import __version__

    lines = [f"experiment={config.kind}"]
    for f_ in fields(config):
        value = getattr(config, f_.name)
        if isinstance(value, tuple):
            value = ",".join(str(v) for v in value)
        lines.append(f"{f_.name}={value}")
    lines.append(f"adiasat_version={__version__}")
    lines.append(f"numpy_version={np.__version__}")
    lines.append(f"scipy_version={scipy.__version__}")
    lines.append(f"rows={len(result.rows)}")
    lines.append(f"failures={result.failures}")
    lines.append(f"wall_time_s={result.wall_time_s:.3f}")
    for name, fit in result.fits.items():
        lines.append(f"fit_{name}_amplitude={fit.amplitude!r}")
        lines.append(f"fit_{name}_rate={fit.rate!r}")
        lines.append(f"fit_{name}_log_rms={fit.log_rms!r}")
    with open(out / "manifest.txt", "w") as f:
        f.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# config files: plain "key = value" lines, # comments

_LIST_KEYS = {"n": "n_values", "ratio": "ratios", "ratios": "ratios",
              "r1_ratio": "r1_ratios", "r1_ratios": "r1_ratios"}
_INT_KEYS = {"instances", "seed", "threads", "k", "sweep_points", "coarse_points",
             "t_points", "max_restarts", "max_trials"}
_FLOAT_KEYS = {"tol", "tolerance", "refine_tol", "dt", "series_tol", "p_walk"}


def _parse_int_list(text: str) -> tuple[int, ...]:
    if ".." in text:
        lo, hi = text.split("..")
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(tok) for tok in text.split(",") if tok)


def parse_config_text(text: str, **overrides) -> ExperimentConfig:
    """Build an ExperimentConfig from key = value lines.

    ``n`` accepts a single value, a comma list, or an inclusive range like
    ``8..14``; ``ratio`` accepts a single value or comma list.
    """
    kwargs: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ExperimentError(f"config line {lineno}: expected key = value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in ("experiment", "kind"):
            kwargs["kind"] = value
        elif key in ("out", "out_dir"):
            kwargs["out_dir"] = value
        elif key in _LIST_KEYS:
            name = _LIST_KEYS[key]
            if name == "n_values":
                kwargs[name] = _parse_int_list(value)
            else:
                kwargs[name] = tuple(float(tok) for tok in value.split(",") if tok)
        elif key == "n":
            kwargs["n_values"] = _parse_int_list(value)
        elif key in _INT_KEYS:
            kwargs[key] = int(value)
        elif key in _FLOAT_KEYS:
            kwargs["tol" if key == "tolerance" else key] = float(value)
        elif key == "max_flips":
            kwargs[key] = None if value.lower() == "default" else int(value)
        elif key == "t_span":
            lo, hi = value.split(",")
            kwargs[key] = (float(lo), float(hi))
        else:
            raise ExperimentError(f"config line {lineno}: unknown key {key!r}")
    kwargs.update({k: v for k, v in overrides.items() if v is not None})
    if "kind" not in kwargs:
        raise ExperimentError("config must name an experiment kind")
    if "out_dir" not in kwargs:
        raise ExperimentError("config must name an output directory (out = ...)")
    if "n_values" not in kwargs:
        raise ExperimentError("config must give n")
    return ExperimentConfig(**kwargs)


def parse_config_file(path, **overrides) -> ExperimentConfig:
    return parse_config_text(Path(path).read_text(), **overrides)
