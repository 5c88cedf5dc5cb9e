import math

import numpy as np
import pytest

from adiasat import satcore as sc


# --- independent oracle: per-assignment clause evaluation, no shared code ---

def naive_violated(formula: sc.Formula, a: int) -> int:
    count = 0
    for c in formula.clauses:
        sat = False
        for lit in c.literals:
            bit = (a >> lit.variable) & 1
            if bool(bit) != lit.negated:
                sat = True
                break
        if not sat:
            count += 1
    return count


def naive_count(formula: sc.Formula) -> int:
    return sum(1 for a in range(1 << formula.n) if naive_violated(formula, a) == 0)


@pytest.fixture
def example_formula():
    # (b2 or not b3 or b4) and (b1 or b2 or not b3), n=4
    return sc.Formula(4, (sc.clause(2, -3, 4), sc.clause(1, 2, -3)))


def test_violated_clauses_known_solution(example_formula):
    assert sc.violated_clauses(example_formula, 0b1101) == 0


def test_violated_clauses_double_violation(example_formula):
    a = 0b0100  # b3 true, everything else false
    assert naive_violated(example_formula, a) == 2
    assert sc.violated_clauses(example_formula, a) == 2


def test_violated_clauses_empty_formula():
    f = sc.Formula(4, ())
    assert sc.violated_clauses(f, 7) == 0
    assert sc.count_solutions(f) == 16


def test_violated_range_random():
    rng = np.random.default_rng(11)
    for _ in range(20):
        f = sc.generate_random_3sat(8, 20, int(rng.integers(2**32)))
        for a in rng.integers(0, 1 << 8, size=10):
            v = sc.violated_clauses(f, int(a))
            assert 0 <= v <= f.m
            assert v == naive_violated(f, int(a))


def test_count_solutions_example(example_formula):
    assert naive_count(example_formula) == 13
    assert sc.count_solutions(example_formula) == 13


def test_count_solutions_complementary_pair():
    f = sc.Formula(3, (sc.clause(1, 2, 3), sc.clause(-1, -2, -3)))
    assert naive_count(f) == 6
    assert sc.count_solutions(f) == 6


def test_count_matches_naive_random():
    rng = np.random.default_rng(7)
    for n, m in [(3, 5), (6, 10), (9, 27), (12, 36)]:
        for _ in range(5):
            f = sc.generate_random_3sat(n, m, int(rng.integers(2**32)))
            assert sc.count_solutions(f) == naive_count(f)


def test_count_solutions_capacity():
    f = sc.Formula(4, (sc.clause(1, 2, 3),))
    object.__setattr__(f, "n", sc.MAX_ENUM_VARS + 1)
    with pytest.raises(sc.CapacityError):
        sc.count_solutions(f)


def test_satisfying_assignments(example_formula):
    sols = sc.satisfying_assignments(example_formula)
    assert len(sols) == 13
    assert sols == sorted(sols)
    assert all(naive_violated(example_formula, a) == 0 for a in sols)
    assert sc.satisfying_assignments(example_formula, limit=4) == sols[:4]


def test_generate_rejects_impossible_m():
    assert sc.max_clauses(3) == 8
    with pytest.raises(sc.GenerationError):
        sc.generate_random_3sat(3, 9, seed=0)


def test_generate_postconditions():
    f = sc.generate_random_3sat(10, 30, seed=42)
    assert f.n == 10 and f.m == 30
    for c in f.clauses:
        assert len({l.variable for l in c.literals}) == 3
    assert len(set(f.clauses)) == 30


def test_generate_deterministic():
    a = sc.generate_random_3sat(10, 30, seed=7)
    b = sc.generate_random_3sat(10, 30, seed=7)
    c = sc.generate_random_3sat(10, 30, seed=8)
    assert a == b
    assert a != c


def test_generate_saturated():
    # all 8 clauses over 3 variables; the redraw loop must still terminate
    f = sc.generate_random_3sat(3, 8, seed=1)
    assert len(set(f.clauses)) == 8
    assert sc.count_solutions(f) == 0


def test_unique_instance_postconditions():
    rec = sc.generate_unique_solution_instance(8, 24, seed=5)
    assert rec.solution_count == 1
    assert rec.trials >= 1
    assert sc.count_solutions(rec.formula) == 1
    assert sc.violated_clauses(rec.formula, rec.solution) == 0
    again = sc.generate_unique_solution_instance(8, 24, seed=5)
    assert again.formula == rec.formula and again.trials == rec.trials


def test_unique_instance_gives_up():
    with pytest.raises(sc.UniqueInstanceNotFound) as exc:
        sc.generate_unique_solution_instance(10, 30, seed=3, max_trials=2)
    assert exc.value.trials == 2


def test_unique_instance_rarity_near_paper_rate():
    # at m/n=3 the acceptance frequency is roughly 2.3 * e^{0.4 n} trials
    trials = [sc.generate_unique_solution_instance(10, 30, seed=s).trials
              for s in range(100)]
    mean = float(np.mean(trials))
    expected = 2.3 * math.exp(0.4 * 10)
    assert expected / 3 < mean < expected * 3


def test_unique_instance_rarity_grows_with_n():
    t8 = np.mean([sc.generate_unique_solution_instance(8, 24, seed=s).trials
                  for s in range(100)])
    t12 = np.mean([sc.generate_unique_solution_instance(12, 36, seed=s).trials
                   for s in range(100)])
    assert t12 > t8


def test_dimacs_example_roundtrip(example_formula):
    text = "p cnf 4 2\n2 -3 4 0\n1 2 -3 0\n"
    assert sc.parse_dimacs(text) == example_formula
    assert sc.parse_dimacs(sc.serialize_dimacs(example_formula)) == example_formula


def test_dimacs_roundtrip_random():
    rng = np.random.default_rng(3)
    for _ in range(100):
        n = int(rng.integers(4, 14))
        m = int(rng.integers(1, 3 * n))
        f = sc.generate_random_3sat(n, m, int(rng.integers(2**32)))
        assert sc.parse_dimacs(sc.serialize_dimacs(f)) == f


def test_dimacs_record_roundtrip():
    rec = sc.generate_unique_solution_instance(8, 24, seed=9)
    text = sc.serialize_dimacs(rec.formula, rec)
    assert "c seed 9" in text
    assert "c solutions 1" in text
    assert f"c solution {sc.assignment_to_bitstring(rec.solution, 8)}" in text
    back = sc.parse_dimacs_record(text)
    assert back.formula == rec.formula
    assert back.solution == rec.solution
    assert back.solution_count == 1
    assert back.seed == 9


def test_dimacs_arity_error():
    with pytest.raises(sc.DimacsParseError) as exc:
        sc.parse_dimacs("p cnf 4 1\n1 2 0\n")
    assert exc.value.line == 2


def test_dimacs_header_errors():
    with pytest.raises(sc.DimacsParseError):
        sc.parse_dimacs("p dnf 4 1\n1 2 3 0\n")
    with pytest.raises(sc.DimacsParseError):
        sc.parse_dimacs("1 2 3 0\n")
    with pytest.raises(sc.DimacsParseError):
        sc.parse_dimacs("p cnf 4 2\n1 2 3 0\n")  # clause count mismatch


def test_dimacs_variable_range_error():
    with pytest.raises(sc.DimacsParseError) as exc:
        sc.parse_dimacs("p cnf 4 1\n1 2 5 0\n")
    assert exc.value.line == 2


def test_clause_validation():
    with pytest.raises(ValueError):
        sc.clause(1, 1, 2)
    with pytest.raises(ValueError):
        sc.clause(1, -1, 2)
    with pytest.raises(ValueError):
        sc.Formula(4, (sc.clause(1, 2, 3), sc.clause(1, 2, 3)))
    with pytest.raises(ValueError):
        sc.Formula(3, (sc.clause(1, 2, 4),))  # variable out of range


def test_bitstring_helpers():
    assert sc.assignment_to_bitstring(0b1101, 4) == "1101"
    assert sc.bitstring_to_assignment("1101") == 13
