"""Quantum adiabatic algorithm simulator for random 3-SAT.

Implicit 2^n Hamiltonians, Krylov spectra along the interpolation schedule,
Landau-Zener crossing analysis, direct Schrodinger propagation, a GSAT
baseline, and seeded experiment pipelines writing CSV.
"""

__version__ = "0.1.0"

from .satcore import (
    Clause,
    Formula,
    InstanceRecord,
    Literal,
    clause,
    count_solutions,
    generate_random_3sat,
    generate_unique_solution_instance,
    is_satisfiable,
    parse_dimacs,
    parse_dimacs_record,
    satisfying_assignments,
    serialize_dimacs,
    violated_clauses,
)
from .hamiltonian import (
    DegeneracyTable,
    HamiltonianSchedule,
    apply_h,
    degeneracy_histogram,
    dense_hamiltonian,
    dh_ds_norm_bound,
    diagonal_energy,
    h0_spectrum,
    initial_ground_state,
)
from .spectra import (
    GapFit,
    MinGapResult,
    SpectrumSample,
    adiabatic_time_bound,
    find_min_gap,
    fit_avoided_crossing,
    fit_crossing,
    landau_zener_time,
    lowest_eigenvalues,
    lz_success_probability,
    lz_transition_probability,
    spectrum_sweep,
)
from .dynamics import (
    EvolutionConfig,
    SuccessRecord,
    propagate_step,
    run_adiabatic,
    success_probability_curve,
)
from .gsat import GsatParams, GsatResult, GsatStats, gsat_solve, gsat_statistics
from .harness import (
    ExperimentConfig,
    ExperimentResult,
    ExpFit,
    fit_exponential,
    parse_config_file,
    parse_config_text,
    run_experiment,
)
