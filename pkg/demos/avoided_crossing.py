#!/usr/bin/env python3
"""Low spectrum along the schedule and the avoided-crossing fit.

Sweeps the lowest levels of H(s), locates the minimum of the gap, fits the
two-level form gamma^2 = delta^2 + slope^2 (s - s*)^2 around it, and turns
the fit into the Landau-Zener running-time estimate.
"""

import numpy as np

from adiasat import (HamiltonianSchedule, find_min_gap, fit_crossing,
                     generate_unique_solution_instance, spectrum_sweep)
from adiasat.spectra import sweep_to_csv


def main():
    n, m = 12, 36
    rec = generate_unique_solution_instance(n, m, seed=5)
    schedule = HamiltonianSchedule(rec.formula)

    samples = spectrum_sweep(schedule, np.linspace(0, 1, 33), k=8)
    sweep_to_csv(samples, "spectrum.csv")
    print(f"swept lowest 8 of {schedule.dim} levels; wrote spectrum.csv")

    res = find_min_gap(schedule)
    print(f"gap minimum: gamma = {res.gamma_min:.4f} at s = {res.s_star:.4f} "
          f"({res.local_minima} local minimum/minima in the coarse scan)")

    fit = fit_crossing(schedule)
    print(f"two-level fit: delta = {fit.delta:.4f}, slope = {fit.slope:.3f}, "
          f"s* = {fit.s_star:.4f}, residual {fit.residual:.1e}")
    print(f"Landau-Zener time tau = 2*slope/(pi*delta^2) = {fit.tau_lz:.1f}")


if __name__ == "__main__":
    main()
