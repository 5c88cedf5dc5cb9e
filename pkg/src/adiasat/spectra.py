"""Low-lying spectra along the schedule and the avoided-crossing analysis.

The eigensolver is ARPACK's implicitly restarted Lanczos iteration driven
through the implicit matvec, so only k Ritz vectors of length 2^n are ever
held.  The minimum of the gap gamma(s) = E_1(s) - E_0(s) is located by a
coarse scan plus golden-section refinement; the crossing is then fitted in
the two-level form gamma^2 = delta^2 + slope^2 (s - s*)^2, whose parameters
feed the Landau-Zener running-time estimate tau = 2 * slope / (pi * delta^2).
"""

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .hamiltonian import HamiltonianSchedule

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

# deterministic Lanczos start vector so repeated runs are bit-identical
_V0_SEED = 0x51B3


class EigensolverError(RuntimeError):
    """Krylov iteration failed to converge; partial results attached."""

    def __init__(self, message: str, eigenvalues=None, residuals=None):
        super().__init__(message)
        self.eigenvalues = eigenvalues
        self.residuals = residuals


class FitError(RuntimeError):
    """Avoided-crossing fit failed (non-convex or negative gap squared)."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class SpectrumSample:
    """The k lowest eigenvalues of H(s) at one schedule point."""

    s: float
    eigenvalues: np.ndarray  # ascending
    vectors: np.ndarray | None = None  # (2^n, k) Ritz vectors when requested

    @property
    def gap(self) -> float:
        return float(self.eigenvalues[1] - self.eigenvalues[0])


@dataclass(frozen=True)
class MinGapResult:
    s_star: float
    gamma_min: float
    boundary: bool  # True when no interior minimum was bracketed
    local_minima: int  # interior local minima seen in the coarse scan
    coarse_s: np.ndarray
    coarse_gaps: np.ndarray


@dataclass(frozen=True)
class GapFit:
    """Two-level crossing parameters and the derived Landau-Zener time."""

    s_star: float
    delta: float
    slope: float
    tau_lz: float
    fit_window: tuple[float, float]
    residual: float

    def to_dict(self) -> dict:
        return {
            "s_star": self.s_star,
            "delta": self.delta,
            "slope": self.slope,
            "tau_lz": self.tau_lz,
            "residual": self.residual,
            "window": list(self.fit_window),
        }


def _default_v0(dim: int) -> np.ndarray:
    return np.random.default_rng(_V0_SEED).standard_normal(dim)


def _endpoint_sample(ham: HamiltonianSchedule, s: float, k: int,
                     return_vectors: bool) -> SpectrumSample:
    """Exact spectrum at s=0 or s=1, where H is known in closed form.

    Both endpoints carry exact integer multiplicities (binomial at s=0, the
    violated-clause census at s=1); Lanczos tends to return k converged
    pairs from inside a cluster there and can skip an isolated extremal
    level entirely, so these points are never sent to ARPACK.
    """
    dim = ham.dim
    if s == 1.0:
        order = np.lexsort((np.arange(dim), ham.diagonal))[:k]
        vals = ham.diagonal[order].astype(float)
        vecs = None
        if return_vectors:
            vecs = np.zeros((dim, k))
            vecs[order, np.arange(k)] = 1.0
        return SpectrumSample(s=1.0, eigenvalues=vals, vectors=vecs)
    n = ham.n
    masks = sorted(range(dim), key=lambda m: (m.bit_count(), m))[:k]
    vals = np.array([float(m.bit_count()) for m in masks])
    vecs = None
    if return_vectors:
        # eigenvectors of the mixing term are the parity (Walsh) vectors
        a = np.arange(dim)
        vecs = np.empty((dim, k))
        for j, m in enumerate(masks):
            signs = 1.0 - 2.0 * (np.bitwise_count(a & m) & 1)
            vecs[:, j] = signs / math.sqrt(dim)
    return SpectrumSample(s=0.0, eigenvalues=vals, vectors=vecs)


def lowest_eigenvalues(ham: HamiltonianSchedule, s: float, k: int,
                       tol: float = 1e-9, v0: np.ndarray | None = None,
                       return_vectors: bool = False, extra: int = 2,
                       ncv: int | None = None) -> SpectrumSample:
    """k lowest eigenvalues of H(s), each converged to ||Hv - lam v|| <= tol.

    ``extra`` additional Ritz pairs are requested beyond k; the low spectrum
    carries n-fold degeneracies at s=0 and Lanczos resolves clusters far more
    reliably with headroom.
    """
    dim = ham.dim
    if not 1 <= k <= dim - 2:
        raise ValueError(f"need 1 <= k <= dim-2 = {dim - 2}, got k={k}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if s == 0.0 or s == 1.0:
        return _endpoint_sample(ham, s, k, return_vectors)
    k_eff = min(k + max(extra, 0), dim - 1)
    if ncv is None:
        ncv = max(2 * k_eff + 1, 20)
    ncv = min(dim, max(ncv, k_eff + 2))
    if v0 is None:
        v0 = _default_v0(dim)
    op = ham.aslinearoperator(s)
    try:
        vals, vecs = eigsh(op, k=k_eff, which="SA", tol=tol * 1e-2, v0=v0,
                           ncv=ncv, maxiter=max(100 * dim, 10000))
    except ArpackNoConvergence as exc:
        raise EigensolverError(
            f"Lanczos did not converge at s={s} (k={k_eff}, dim={dim})",
            eigenvalues=exc.eigenvalues,
        ) from exc
    order = np.argsort(vals)
    vals = vals[order][:k]
    vecs = vecs[:, order][:, :k]
    residuals = np.array([
        np.linalg.norm(ham.apply(s, vecs[:, i]) - vals[i] * vecs[:, i])
        for i in range(k)
    ])
    if residuals.max() > tol:
        raise EigensolverError(
            f"residuals up to {residuals.max():.3e} exceed tol={tol:.3e} at s={s}",
            eigenvalues=vals, residuals=residuals,
        )
    return SpectrumSample(s=float(s), eigenvalues=vals,
                          vectors=vecs if return_vectors else None)


def spectrum_sweep(ham: HamiltonianSchedule, s_grid: Sequence[float], k: int,
                   tol: float = 1e-9) -> list[SpectrumSample]:
    """One SpectrumSample per grid point, warm-starting each solve from the
    previous ground vector."""
    s_grid = np.asarray(s_grid, dtype=float)
    if s_grid.ndim != 1 or len(s_grid) == 0:
        raise ValueError("s_grid must be a non-empty 1-d sequence")
    if np.any(np.diff(s_grid) < 0) or s_grid[0] < 0.0 or s_grid[-1] > 1.0:
        raise ValueError("s_grid must be ascending within [0, 1]")
    samples = []
    v0 = None
    for s in s_grid:
        try:
            sample = lowest_eigenvalues(ham, float(s), k, tol=tol, v0=v0,
                                        return_vectors=True)
        except EigensolverError as exc:
            raise EigensolverError(f"sweep failed at s={s}: {exc}",
                                   eigenvalues=exc.eigenvalues) from exc
        v0 = sample.vectors[:, 0]
        samples.append(SpectrumSample(s=sample.s, eigenvalues=sample.eigenvalues))
    return samples


def sweep_to_csv(samples: Sequence[SpectrumSample], path) -> None:
    k = len(samples[0].eigenvalues)
    with open(path, "w") as f:
        f.write("s," + ",".join(f"E_{i}" for i in range(k)) + "\n")
        for smp in samples:
            f.write(repr(smp.s) + "," + ",".join(repr(float(e)) for e in smp.eigenvalues) + "\n")


class _GapEvaluator:
    """Cached gamma(s) evaluations with ground-vector warm starts.

    A lean Lanczos configuration (one spare Ritz pair, small subspace) is
    enough here: away from s=0 the low levels are generically simple, and
    the scan only needs the gap to well below the fit tolerances.
    """

    def __init__(self, ham: HamiltonianSchedule, tol: float):
        self.ham = ham
        self.tol = tol
        self.cache: dict[float, float] = {}
        self.v0: np.ndarray | None = None

    def __call__(self, s: float) -> float:
        s = float(s)
        if s not in self.cache:
            sample = lowest_eigenvalues(self.ham, s, k=2, tol=self.tol,
                                        v0=self.v0, return_vectors=True,
                                        extra=1, ncv=16)
            self.v0 = sample.vectors[:, 0]
            self.cache[s] = sample.gap
        return self.cache[s]


def _golden_section(fn: Callable[[float], float], a: float, m: float, b: float,
                    xtol: float) -> tuple[float, float]:
    """Refine the bracketed minimum fn(m) < fn(a), fn(b) down to width xtol."""
    best_x, best_f = m, fn(m)
    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1, f2 = fn(x1), fn(x2)
    while (b - a) > xtol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - GOLDEN * (b - a)
            f1 = fn(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + GOLDEN * (b - a)
            f2 = fn(x2)
        for xx, ff in ((x1, f1), (x2, f2)):
            if ff < best_f:
                best_x, best_f = xx, ff
    return best_x, best_f


def _minimize_gap(gap_fn: Callable[[float], float], coarse_points: int,
                  refine_tol: float,
                  on_refine: Callable[[], None] = lambda: None) -> MinGapResult:
    if coarse_points < 8:
        raise ValueError("need at least 8 coarse points")
    grid = np.linspace(0.0, 1.0, coarse_points)
    gaps = np.array([gap_fn(float(s)) for s in grid])
    interior = [i for i in range(1, coarse_points - 1)
                if gaps[i] < gaps[i - 1] and gaps[i] <= gaps[i + 1]]
    if not interior:
        edge = int(np.argmin(gaps))
        return MinGapResult(s_star=float(grid[edge]), gamma_min=float(gaps[edge]),
                            boundary=True, local_minima=0,
                            coarse_s=grid, coarse_gaps=gaps)
    i = min(interior, key=lambda j: gaps[j])
    on_refine()
    s_star, gamma_min = _golden_section(gap_fn, float(grid[i - 1]), float(grid[i]),
                                        float(grid[i + 1]), refine_tol)
    return MinGapResult(s_star=s_star, gamma_min=gamma_min, boundary=False,
                        local_minima=len(interior), coarse_s=grid, coarse_gaps=gaps)


def find_min_gap(ham: "HamiltonianSchedule | Callable[[float], float]",
                 coarse_points: int = 32, refine_tol: float = 1e-4,
                 tol: float = 1e-8, scan_tol: float = 1e-4) -> MinGapResult:
    """Locate the minimum of gamma(s) on [0, 1].

    Accepts either a HamiltonianSchedule (gap from the eigensolver) or a
    plain callable s -> gamma(s) for synthetic models.  A minimum sitting on
    the boundary of the coarse scan is reported with ``boundary=True`` and
    not refined.

    The coarse scan runs at ``scan_tol`` (it only brackets the minimum,
    and the near-endpoint clusters converge slowly); golden-section probes
    switch to ``tol`` since they compare nearly equal gaps.
    """
    if callable(ham):
        return _minimize_gap(ham, coarse_points, refine_tol)
    gap_fn = _GapEvaluator(ham, max(tol, scan_tol))

    def tighten():
        gap_fn.tol = tol

    return _minimize_gap(gap_fn, coarse_points, refine_tol, on_refine=tighten)


def gap_window_samples(ham: "HamiltonianSchedule | Callable[[float], float]",
                       s_star: float, gamma_min: float, n_points: int = 15,
                       tol: float = 1e-8) -> tuple[np.ndarray, np.ndarray]:
    """Sample gamma(s) across the crossing out to roughly gamma = 2 gamma_min.

    Doubles a trial half-width until the gap exceeds twice its minimum on
    each side (clamped to [0, 1]), lays ``n_points`` uniformly over the
    window, and keeps the samples with gamma <= 2 gamma_min.
    """
    gap_fn = ham if callable(ham) else _GapEvaluator(ham, tol)
    target = 2.0 * gamma_min

    def edge(direction: float) -> float:
        w = max(1e-3, gamma_min * 1e-2)
        while True:
            probe = s_star + direction * w
            if probe <= 0.0 or probe >= 1.0:
                return min(w, (1.0 - s_star) if direction > 0 else s_star)
            if gap_fn(probe) >= target:
                return w
            w *= 2.0

    w_left, w_right = edge(-1.0), edge(+1.0)
    for _ in range(4):
        grid = np.linspace(s_star - w_left, s_star + w_right, n_points)
        gam = np.array([gap_fn(float(s)) for s in grid])
        keep = gam <= target * (1.0 + 1e-9)
        if keep.sum() >= 7:
            return grid[keep], gam[keep]
        w_left *= 0.5
        w_right *= 0.5
    order = np.argsort(np.abs(grid - s_star))[:7]
    order.sort()
    return grid[order], gam[order]


def fit_avoided_crossing(s: Sequence[float], gamma: Sequence[float]) -> GapFit:
    """Least-squares fit of gamma^2 to delta^2 + slope^2 (s - s*)^2.

    Fitting the squared gap makes the problem linear: the two-level form is
    an exact upward parabola in s.  Requires >= 7 samples spanning the
    minimum.
    """
    s = np.asarray(s, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    if s.shape != gamma.shape or s.ndim != 1:
        raise ValueError("s and gamma must be 1-d arrays of equal length")
    if len(s) < 7:
        raise ValueError(f"need at least 7 samples, got {len(s)}")
    imin = int(np.argmin(gamma))
    if imin in (0, len(s) - 1):
        raise FitError("samples do not span the gap minimum")
    c2, c1, c0 = np.polyfit(s, gamma**2, 2)
    if c2 <= 0:
        raise FitError(f"fitted gap^2 is not convex (curvature {c2:.3e})")
    s_star = -c1 / (2.0 * c2)
    delta_sq = c0 - c1 * c1 / (4.0 * c2)
    model = np.sqrt(np.maximum(c0 + c1 * s + c2 * s**2, 0.0))
    residual = float(np.sqrt(np.mean((model - gamma) ** 2)))
    if delta_sq <= 0:
        raise FitError(f"fitted minimum gap^2 is {delta_sq:.3e} <= 0", residual=residual)
    delta = math.sqrt(delta_sq)
    slope = math.sqrt(c2)
    return GapFit(s_star=float(s_star), delta=delta, slope=slope,
                  tau_lz=landau_zener_time(delta, slope),
                  fit_window=(float(s[0]), float(s[-1])), residual=residual)


def fit_crossing(ham: HamiltonianSchedule, coarse_points: int = 32,
                 refine_tol: float = 1e-4, n_points: int = 15,
                 tol: float = 1e-8) -> GapFit:
    """Full per-instance pipeline: locate the minimum gap, sample a window
    around it, and fit the two-level crossing."""
    res = find_min_gap(ham, coarse_points=coarse_points, refine_tol=refine_tol, tol=tol)
    if res.boundary:
        raise FitError(f"gap minimum sits on the schedule boundary at s={res.s_star}")
    s, gam = gap_window_samples(ham, res.s_star, res.gamma_min,
                                n_points=n_points, tol=tol)
    return fit_avoided_crossing(s, gam)


def landau_zener_time(delta: float, slope: float) -> float:
    """tau = 2 * slope / (pi * delta^2), with hbar = 1."""
    if delta <= 0 or slope <= 0:
        raise ValueError("delta and slope must be positive")
    return 2.0 * slope / (math.pi * delta * delta)


def lz_transition_probability(tau_lz: float, T: float) -> float:
    """Probability of leaving the ground state: exp(-T / tau)."""
    if tau_lz <= 0 or T < 0:
        raise ValueError("need tau_lz > 0 and T >= 0")
    return math.exp(-T / tau_lz)


def lz_success_probability(tau_lz: float, T: float) -> float:
    """Predicted probability of finishing in the ground state: 1 - exp(-T / tau)."""
    return 1.0 - lz_transition_probability(tau_lz, T)


def adiabatic_time_bound(ham: HamiltonianSchedule | None, s_grid: Sequence[float],
                         gaps: Sequence[float] | None = None,
                         norm_bound: float | None = None,
                         tol: float = 1e-9) -> float:
    """Trapezoid quadrature of ||dH/ds|| / gamma(s)^2 over the grid.

    Diagnostic only: the adiabatic theorem demands running times well above
    this number.  ``gaps`` and ``norm_bound`` may be supplied directly for
    synthetic checks.
    """
    s_grid = np.asarray(s_grid, dtype=float)
    if gaps is None:
        if ham is None:
            raise ValueError("need either a Hamiltonian or explicit gaps")
        gaps = np.array([smp.gap for smp in spectrum_sweep(ham, s_grid, k=2, tol=tol)])
    else:
        gaps = np.asarray(gaps, dtype=float)
    if norm_bound is None:
        if ham is None:
            raise ValueError("need either a Hamiltonian or an explicit norm_bound")
        norm_bound = ham.dh_ds_norm_bound()
    if np.any(gaps <= 0):
        bad = float(s_grid[int(np.argmin(gaps))])
        raise ValueError(f"gap vanishes near s={bad}: adiabatic bound diverges")
    return float(np.trapezoid(norm_bound / gaps**2, s_grid))
