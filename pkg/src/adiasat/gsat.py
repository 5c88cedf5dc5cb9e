"""GSAT local search with the random-walk extension.

Each step flips one variable: with probability ``p_walk`` a random variable
from a random unsatisfied clause, otherwise a variable whose flip maximizes
the number of satisfied clauses (ties broken uniformly; sideways and
downhill moves are taken when they are the best available).  The search
restarts from a fresh random assignment after ``max_flips`` flips.

Incomplete by construction: an unsolved result is a valid outcome, never an
error, and says nothing about unsatisfiability.
"""

from dataclasses import dataclass

import numpy as np

from .satcore import Formula, violated_clauses


@dataclass(frozen=True)
class GsatParams:
    """Search budgets and randomness.  ``max_flips=None`` means 10 n^2."""

    max_flips: int | None = None
    max_restarts: int = 100
    p_walk: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.max_flips is not None and self.max_flips < 1:
            raise ValueError("max_flips must be >= 1")
        if self.max_restarts < 0:
            raise ValueError("max_restarts must be >= 0")
        if not 0.0 <= self.p_walk <= 1.0:
            raise ValueError("p_walk must lie in [0, 1]")


@dataclass(frozen=True)
class GsatResult:
    solved: bool
    flips: int  # total assignment mutations across all restarts
    restarts: int  # restarts actually used
    assignment: int  # final assignment (satisfying iff solved)


@dataclass(frozen=True)
class GsatStats:
    mean_flips: float
    std_flips: float
    unsolved: int
    instances: int


class _Search:
    """Incremental satisfied-count bookkeeping for one assignment.

    Maintains per-clause true-literal counts, the critical variable of each
    singly-satisfied clause, and per-variable make/break counters, so a flip
    costs O(occurrences of the variable).
    """

    def __init__(self, formula: Formula):
        self.n = formula.n
        self.m = formula.m
        self.cv = formula._vars
        self.neg = formula._negs
        flat = self.cv.ravel()
        order = np.argsort(flat, kind="stable")
        self.occ_clause = (order // 3).astype(np.int64)
        self.occ_slot = (order % 3).astype(np.int64)
        self.occ_ptr = np.searchsorted(flat[order], np.arange(self.n + 1))

    def reset(self, bits: np.ndarray):
        self.bits = bits
        lit_true = bits[self.cv] != self.neg  # (m, 3)
        self.true_count = lit_true.sum(axis=1).astype(np.int64)
        self.crit = np.zeros(self.m, dtype=np.int64)
        ones = self.true_count == 1
        if ones.any():
            slot = np.argmax(lit_true[ones], axis=1)
            self.crit[ones] = self.cv[ones, slot]
        self.make = np.zeros(self.n, dtype=np.int64)
        self.break_ = np.bincount(self.crit[ones], minlength=self.n).astype(np.int64)
        self.unsat = list(np.flatnonzero(self.true_count == 0))
        self.unsat_pos = {c: i for i, c in enumerate(self.unsat)}
        for c in self.unsat:
            for u in self.cv[c]:
                self.make[u] += 1

    def _unsat_add(self, c: int):
        self.unsat_pos[c] = len(self.unsat)
        self.unsat.append(c)

    def _unsat_remove(self, c: int):
        i = self.unsat_pos.pop(c)
        last = self.unsat.pop()
        if last != c:
            self.unsat[i] = last
            self.unsat_pos[last] = i

    def flip(self, v: int):
        self.bits[v] ^= 1
        val = self.bits[v]
        cv, neg, tc = self.cv, self.neg, self.true_count
        for idx in range(self.occ_ptr[v], self.occ_ptr[v + 1]):
            c = self.occ_clause[idx]
            slot = self.occ_slot[idx]
            if val != neg[c, slot]:  # literal of v became true
                if tc[c] == 0:
                    self._unsat_remove(c)
                    for u in cv[c]:
                        self.make[u] -= 1
                    self.crit[c] = v
                    self.break_[v] += 1
                elif tc[c] == 1:
                    self.break_[self.crit[c]] -= 1
                tc[c] += 1
            else:  # literal of v became false
                if tc[c] == 1:
                    self._unsat_add(c)
                    for u in cv[c]:
                        self.make[u] += 1
                    self.break_[v] -= 1
                elif tc[c] == 2:
                    for j in range(3):
                        u = cv[c, j]
                        if u != v and self.bits[u] != neg[c, j]:
                            self.crit[c] = u
                            self.break_[u] += 1
                            break
                tc[c] -= 1

    def assignment_int(self) -> int:
        out = 0
        for v in range(self.n - 1, -1, -1):
            out = (out << 1) | int(self.bits[v])
        return out


def _assert_greedy_optimal(formula: Formula, state: _Search, chosen: int):
    base = violated_clauses(formula, state.assignment_int())
    bits = state.bits.copy()

    def satisfied_after(v):
        bits[v] ^= 1
        a = 0
        for u in range(formula.n - 1, -1, -1):
            a = (a << 1) | int(bits[u])
        bits[v] ^= 1
        return formula.m - violated_clauses(formula, a)

    best = max(satisfied_after(v) for v in range(formula.n))
    got = satisfied_after(chosen)
    assert got == best, f"greedy flip {chosen} gives {got}, best is {best} (base={base})"


def gsat_solve(formula: Formula, params: GsatParams,
               initial: int | None = None, check_greedy: bool = False) -> GsatResult:
    """Run GSAT on a formula.  Deterministic given (params, initial).

    ``initial`` pins the first try's starting assignment (testing hook);
    restarts always draw fresh random assignments.  ``check_greedy``
    exhaustively verifies every greedy choice (slow; tests only).
    """
    rng = np.random.default_rng(params.seed)
    max_flips = params.max_flips if params.max_flips is not None else 10 * formula.n**2
    state = _Search(formula)
    flips = 0
    for attempt in range(params.max_restarts + 1):
        if attempt == 0 and initial is not None:
            bits = np.array([(initial >> v) & 1 for v in range(formula.n)], dtype=np.int64)
        else:
            bits = rng.integers(0, 2, size=formula.n, dtype=np.int64)
        state.reset(bits)
        for _ in range(max_flips):
            if not state.unsat:
                return GsatResult(solved=True, flips=flips, restarts=attempt,
                                  assignment=state.assignment_int())
            if params.p_walk > 0.0 and rng.random() < params.p_walk:
                c = state.unsat[rng.integers(len(state.unsat))]
                v = int(state.cv[c, rng.integers(3)])
            else:
                delta = state.make - state.break_
                ties = np.flatnonzero(delta == delta.max())
                v = int(ties[rng.integers(len(ties))])
                if check_greedy:
                    _assert_greedy_optimal(formula, state, v)
            state.flip(v)
            flips += 1
        if not state.unsat:
            return GsatResult(solved=True, flips=flips, restarts=attempt,
                              assignment=state.assignment_int())
    return GsatResult(solved=False, flips=flips, restarts=params.max_restarts,
                      assignment=state.assignment_int())


def instance_seed(base_seed: int, index: int) -> int:
    """Per-instance stream derived from the base seed (stable, documented)."""
    return int(np.random.SeedSequence(entropy=(base_seed, index)).generate_state(1)[0])


def gsat_statistics(formulas, params: GsatParams) -> GsatStats:
    """Aggregate gsat_solve over an instance set.

    Unsolved instances contribute their full flip budget to the statistics
    and are counted in ``unsolved``.
    """
    flips = []
    unsolved = 0
    for i, f in enumerate(formulas):
        p = GsatParams(max_flips=params.max_flips, max_restarts=params.max_restarts,
                       p_walk=params.p_walk, seed=instance_seed(params.seed, i))
        result = gsat_solve(f, p)
        flips.append(result.flips)
        if not result.solved:
            unsolved += 1
    arr = np.array(flips, dtype=float)
    return GsatStats(mean_flips=float(arr.mean()), std_flips=float(arr.std()),
                     unsolved=unsolved, instances=len(arr))
