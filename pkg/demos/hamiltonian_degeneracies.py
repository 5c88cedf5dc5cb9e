#!/usr/bin/env python3
"""Degeneracy structure of the two endpoint Hamiltonians.

The mixing operator's spectrum is fixed: integer energies with binomial
multiplicities.  The diagonal problem operator depends on the instance; for
unique-solution formulas at low m/n the first excited level (assignments
violating exactly one clause) is heavily populated, which is what eventually
squeezes the minimum gap.
"""

import numpy as np

from adiasat import (HamiltonianSchedule, degeneracy_histogram, h0_spectrum,
                     generate_unique_solution_instance, initial_ground_state)


def main():
    n, m = 12, 36
    rec = generate_unique_solution_instance(n, m, seed=7)
    f = rec.formula

    t0 = h0_spectrum(n)
    print(f"mixing Hamiltonian spectrum for n={n} (energy: count):")
    print(" ", {e: c for e, c in t0.items()})

    t1 = degeneracy_histogram(f)
    print(f"problem Hamiltonian spectrum for the instance (m={m}, one solution):")
    print(" ", {e: c for e, c in t1.items() if c})
    print(f"  states violating exactly one clause: {t1.count(1)}")

    t0.to_csv("h0_degeneracy.csv")
    t1.to_csv("h1_degeneracy.csv")
    print("wrote h0_degeneracy.csv and h1_degeneracy.csv")

    schedule = HamiltonianSchedule(f)
    psi0 = initial_ground_state(n)
    print(f"uniform state has energy {abs(np.vdot(psi0, schedule.apply(0.0, psi0))):.2e} "
          f"at s=0 (exact ground state)")


if __name__ == "__main__":
    main()
