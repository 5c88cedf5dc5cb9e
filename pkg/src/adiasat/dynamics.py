"""Direct integration of the schedule-driven Schrodinger equation (hbar = 1).

The state is advanced with the one-step propagator exp(-i H dt), H frozen at
each step's midpoint s and the exponential expanded as a power series whose
truncation is controlled by the norm of the last term.  The truncated series
is not exactly unitary, so the norm drift of the state is measured and
reported rather than silently renormalized away: it is the integrator's
accuracy certificate.
"""

import math
from dataclasses import dataclass

import numpy as np

from .hamiltonian import HamiltonianSchedule, initial_ground_state

# dt * ||H|| beyond this makes the scalar exponential series ill-conditioned
# (huge intermediate terms cancel); refuse rather than quietly lose digits.
MAX_STEP_ANGLE = 20.0


class SeriesConvergenceError(RuntimeError):
    """Propagator series failed to reach tolerance; use a smaller dt."""


class NormDriftError(RuntimeError):
    """State norm drifted beyond the configured bound; tighten dt/series_tol."""

    def __init__(self, message: str, drift: float):
        super().__init__(message)
        self.drift = drift


@dataclass(frozen=True)
class EvolutionConfig:
    """Settings for one adiabatic run; T is the total running time."""

    T: float
    dt: float = 0.1
    series_tol: float = 1e-12
    j_max: int = 128
    norm_drift_limit: float = 1e-6

    def __post_init__(self):
        if self.T < 0:
            raise ValueError("T must be >= 0")
        if self.T > 0 and not 0 < self.dt <= self.T:
            raise ValueError("need 0 < dt <= T")
        if self.series_tol <= 0:
            raise ValueError("series_tol must be positive")


@dataclass(frozen=True)
class SuccessRecord:
    """Outcome of one run: overlap with the solution state at t = T."""

    T: float
    p_ground: float
    lz_prediction: float  # exp(-T / tau_LZ); NaN when no tau was supplied
    norm_drift: float


def propagate_step(ham: HamiltonianSchedule, s_mid: float, psi: np.ndarray,
                   dt: float, series_tol: float = 1e-12,
                   j_max: int = 128) -> np.ndarray:
    """One step of exp(-i H(s_mid) dt) applied to psi via the power series.

    Terms are added until the last one's norm falls below series_tol.
    """
    psi = np.asarray(psi, dtype=np.complex128)
    if dt == 0.0:
        return psi.copy()
    if dt < 0.0:
        raise ValueError("dt must be >= 0")
    if dt * (ham.formula.m + ham.n) > MAX_STEP_ANGLE:
        raise SeriesConvergenceError(
            f"dt={dt} too large: dt*(m+n)={dt * (ham.formula.m + ham.n):.1f} "
            f"exceeds {MAX_STEP_ANGLE}; reduce dt")
    out = psi.copy()
    term = psi
    for j in range(1, j_max + 1):
        term = (-1j * dt / j) * ham.apply(s_mid, term)
        out += term
        if np.linalg.norm(term) <= series_tol:
            return out
    raise SeriesConvergenceError(
        f"propagator series did not reach tol={series_tol} in {j_max} terms "
        f"(dt={dt}); reduce dt or raise j_max")


def run_adiabatic(ham: HamiltonianSchedule, solution: int,
                  config: EvolutionConfig, tau_lz: float | None = None) -> SuccessRecord:
    """Evolve the uniform state from s=0 to s=1 and read off p(ground).

    The schedule is split into ceil(T / dt) equal steps; H is frozen at each
    step's midpoint.  ``solution`` is the basis index of the unique
    satisfying assignment (the s=1 ground state).
    """
    if not 0 <= solution < ham.dim:
        raise ValueError(f"solution index {solution} out of range")
    psi = initial_ground_state(ham.n).astype(np.complex128)
    if config.T > 0:
        n_steps = max(1, math.ceil(config.T / config.dt - 1e-12))
        dt_eff = config.T / n_steps
        for k in range(n_steps):
            s_mid = (k + 0.5) / n_steps
            psi = propagate_step(ham, s_mid, psi, dt_eff,
                                 series_tol=config.series_tol, j_max=config.j_max)
    drift = abs(1.0 - float(np.linalg.norm(psi)))
    if drift > config.norm_drift_limit:
        raise NormDriftError(
            f"norm drift {drift:.3e} exceeds {config.norm_drift_limit:.1e}; "
            f"reduce dt or tighten series_tol", drift=drift)
    p_ground = float(abs(psi[solution]) ** 2)
    prediction = math.exp(-config.T / tau_lz) if tau_lz else math.nan
    return SuccessRecord(T=config.T, p_ground=p_ground,
                         lz_prediction=prediction, norm_drift=drift)


def success_probability_curve(ham: HamiltonianSchedule, solution: int,
                              T_list, config: EvolutionConfig | None = None,
                              tau_lz: float | None = None) -> list[SuccessRecord]:
    """One run per T, e.g. for the p(ground) vs T comparison with the
    Landau-Zener prediction."""
    base = config or EvolutionConfig(T=0.0)
    records = []
    for T in T_list:
        cfg = EvolutionConfig(T=float(T), dt=base.dt, series_tol=base.series_tol,
                              j_max=base.j_max, norm_drift_limit=base.norm_drift_limit)
        try:
            records.append(run_adiabatic(ham, solution, cfg, tau_lz=tau_lz))
        except (SeriesConvergenceError, NormDriftError) as exc:
            raise type(exc)(f"run at T={T} failed: {exc}", *(
                (exc.drift,) if isinstance(exc, NormDriftError) else ())) from exc
    return records


def curve_to_csv(records, path) -> None:
    with open(path, "w") as f:
        f.write("T,p_ground,lz_prediction,norm_drift\n")
        for r in records:
            f.write(f"{r.T!r},{r.p_ground!r},{r.lz_prediction!r},{r.norm_drift!r}\n")
