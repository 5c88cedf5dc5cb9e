import math

import numpy as np
import pytest

from adiasat import hamiltonian as ham
from adiasat import satcore as sc


@pytest.fixture
def example_formula():
    return sc.Formula(4, (sc.clause(2, -3, 4), sc.clause(1, 2, -3)))


def random_formula(n, m, seed):
    return sc.generate_random_3sat(n, m, seed)


def test_initial_ground_state_n2():
    psi = ham.initial_ground_state(2)
    assert np.allclose(psi, [0.5, 0.5, 0.5, 0.5])
    assert abs(np.linalg.norm(psi) - 1.0) < 1e-12


def test_initial_state_is_zero_mode_of_h0(example_formula):
    h = ham.HamiltonianSchedule(example_formula)
    psi = ham.initial_ground_state(4)
    assert np.max(np.abs(h.apply(0.0, psi))) < 1e-14


def test_initial_state_overlaps():
    n = 6
    psi = ham.initial_ground_state(n)
    assert np.allclose(psi, 2.0 ** (-n / 2))


def test_initial_state_capacity():
    with pytest.raises(sc.CapacityError):
        ham.initial_ground_state(ham.MAX_STATE_VARS + 1)


def test_h0_spectrum_small():
    t = ham.h0_spectrum(3)
    assert t.items() == [(0, 1), (1, 3), (2, 3), (3, 1)]


def test_h0_spectrum_first_excited_is_n():
    assert ham.h0_spectrum(14).count(1) == 14


def test_h0_spectrum_totals():
    for n in range(1, 21):
        assert ham.h0_spectrum(n).total == 1 << n


def test_h0_degeneracies_match_dense_diagonalization():
    f = random_formula(6, 18, seed=2)
    evals = np.linalg.eigvalsh(ham.dense_hamiltonian(f, 0.0))
    rounded = np.round(evals).astype(int)
    assert np.max(np.abs(evals - rounded)) < 1e-9
    table = ham.h0_spectrum(6)
    for e in range(7):
        assert int((rounded == e).sum()) == table.count(e)


def test_degeneracy_histogram_example(example_formula):
    t = ham.degeneracy_histogram(example_formula)
    assert t.items()[:3] == [(0, 13), (1, 2), (2, 1)]
    assert t.total == 16


def test_degeneracy_histogram_matches_naive():
    rng = np.random.default_rng(5)
    for _ in range(5):
        f = random_formula(8, 24, int(rng.integers(2**32)))
        t = ham.degeneracy_histogram(f)
        naive = np.zeros(f.m + 1, dtype=int)
        for a in range(1 << 8):
            naive[sc.violated_clauses(f, a)] += 1
        assert np.array_equal(t.counts, naive)
        assert t.total == 1 << 8


def test_diagonal_energy(example_formula):
    assert ham.diagonal_energy(example_formula, 0b1101) == 0
    assert ham.diagonal_energy(example_formula, 0b0100) == 2


def test_apply_at_final_time(example_formula):
    h = ham.HamiltonianSchedule(example_formula)
    v = np.zeros(16)
    v[0b1101] = 1.0
    assert np.max(np.abs(h.apply(1.0, v))) == 0.0
    v = np.zeros(16)
    v[0b0100] = 1.0
    assert np.allclose(h.apply(1.0, v), 2.0 * v)


def test_apply_matches_dense_oracle():
    rng = np.random.default_rng(9)
    for n in (3, 4):
        f = random_formula(n, min(3 * n, sc.max_clauses(n)), int(rng.integers(2**32)))
        h = ham.HamiltonianSchedule(f)
        for s in (0.0, 0.3, 0.5, 1.0):
            dense = ham.dense_hamiltonian(f, s)
            v = rng.standard_normal(1 << n)
            assert np.max(np.abs(h.apply(s, v) - dense @ v)) < 1e-12
            vc = v + 1j * rng.standard_normal(1 << n)
            assert np.max(np.abs(h.apply(s, vc) - dense @ vc)) < 1e-12


def test_schedule_linearity():
    f = random_formula(7, 21, seed=3)
    h = ham.HamiltonianSchedule(f)
    rng = np.random.default_rng(1)
    v = rng.standard_normal(1 << 7)
    h0v = h.apply(0.0, v)
    h1v = h.apply(1.0, v)
    for s in (0.0, 0.25, 0.5, 0.75, 1.0):
        expect = (1 - s) * h0v + s * h1v
        assert np.max(np.abs(h.apply(s, v) - expect)) < 1e-12


def test_symmetry():
    f = random_formula(6, 18, seed=8)
    h = ham.HamiltonianSchedule(f)
    rng = np.random.default_rng(2)
    u = rng.standard_normal(1 << 6)
    v = rng.standard_normal(1 << 6)
    for s in (0.2, 0.7):
        assert abs(np.dot(u, h.apply(s, v)) - np.dot(h.apply(s, u), v)) < 1e-12


def test_basis_states_are_h1_eigenvectors():
    f = random_formula(5, 15, seed=4)
    h = ham.HamiltonianSchedule(f)
    for a in range(1 << 5):
        v = np.zeros(1 << 5)
        v[a] = 1.0
        hv = h.apply(1.0, v)
        lam = hv[a]
        assert lam == int(lam) and 0 <= lam <= f.m
        assert np.allclose(hv, lam * v)


def test_apply_dimension_mismatch(example_formula):
    h = ham.HamiltonianSchedule(example_formula)
    with pytest.raises(ValueError):
        h.apply(0.5, np.zeros(8))


def test_norm_bound_triangle(example_formula):
    h = ham.HamiltonianSchedule(example_formula)
    assert h.dh_ds_norm_bound() == 6.0


def test_norm_bound_sharpened():
    rng = np.random.default_rng(17)
    for n in (3, 4):
        f = random_formula(n, min(3 * n, sc.max_clauses(n)), int(rng.integers(2**32)))
        h = ham.HamiltonianSchedule(f)
        diff = ham.dense_hamiltonian(f, 1.0) - ham.dense_hamiltonian(f, 0.0)
        exact = float(np.max(np.abs(np.linalg.eigvalsh(diff))))
        sharp = h.dh_ds_norm_bound(sharpen=True)
        assert sharp <= h.dh_ds_norm_bound() + 1e-12
        assert abs(sharp - exact) < 1e-10


def test_dense_oracle_cap():
    f = random_formula(6, 10, seed=0)
    object.__setattr__(f, "n", ham.DENSE_ORACLE_MAX + 1)
    with pytest.raises(sc.CapacityError):
        ham.dense_hamiltonian(f, 0.5)


def test_degeneracy_table_csv(tmp_path):
    t = ham.h0_spectrum(4)
    path = tmp_path / "deg.csv"
    t.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "energy,count"
    assert lines[1] == "0,1"
    assert len(lines) == 6


def test_apply_h_accepts_formula(example_formula):
    v = np.zeros(16)
    v[0b1101] = 1.0
    assert np.max(np.abs(ham.apply_h(1.0, example_formula, v))) == 0.0
