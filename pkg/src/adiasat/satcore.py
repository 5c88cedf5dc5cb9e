"""Random 3-SAT instances: representation, generation, counting, DIMACS I/O.

Conventions used throughout the package:

* Variables are indexed 0..n-1 internally (1..n in DIMACS files).
* An assignment is a plain integer in [0, 2^n); bit i holds the value of
  variable i.  Bitstrings are printed most-significant-variable first,
  so variable 0 is the rightmost character.
* Randomness comes from ``numpy.random.Generator`` (PCG64).  Draw order is
  part of the reproducibility contract and is documented on each generator.
  Streams are stable for a fixed numpy version.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional accelerator
    _HAVE_NUMBA = False

# Exhaustive enumeration works on bit-packed arrays of all 2^n assignments;
# n = 26 keeps the packed table at 8 MiB and a count under ~50 ms.
MAX_ENUM_VARS = 26

_WORD_BITS = 64

# _LOW_PATTERN[v][t] marks the in-word bit positions p (0..63) with
# ((p >> v) & 1) == t, for variables v < 6 that live inside one word.
_LOW_PATTERN = np.zeros((6, 2), dtype=np.uint64)
for _v in range(6):
    _p = np.arange(_WORD_BITS, dtype=np.uint64)
    _hit = ((_p >> _v) & 1).astype(bool)
    _LOW_PATTERN[_v, 1] = np.bitwise_or.reduce((np.uint64(1) << _p)[_hit])
    _LOW_PATTERN[_v, 0] = ~_LOW_PATTERN[_v, 1]
del _v, _p, _hit


class CapacityError(ValueError):
    """Requested n exceeds the exhaustive-enumeration cap."""


class GenerationError(ValueError):
    """Impossible generation request (e.g. more clauses than exist)."""


class UniqueInstanceNotFound(RuntimeError):
    """Rejection sampling exhausted its trial budget.

    The number of formulas drawn and rejected is available as ``trials``.
    """

    def __init__(self, message: str, trials: int):
        super().__init__(message)
        self.trials = trials


class DimacsParseError(ValueError):
    """Malformed DIMACS input; ``line`` is the 1-based offending line."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True, order=True)
class Literal:
    """A variable or its negation."""

    variable: int
    negated: bool = False

    def __post_init__(self):
        if self.variable < 0:
            raise ValueError(f"negative variable index {self.variable}")

    def evaluate(self, assignment: int) -> bool:
        return bool((assignment >> self.variable) & 1) != self.negated


@dataclass(frozen=True)
class Clause:
    """Disjunction of exactly 3 literals over pairwise-distinct variables."""

    literals: tuple[Literal, Literal, Literal]

    def __post_init__(self):
        if len(self.literals) != 3:
            raise ValueError(f"clause needs exactly 3 literals, got {len(self.literals)}")
        ordered = tuple(sorted(self.literals, key=lambda l: l.variable))
        if len({l.variable for l in ordered}) != 3:
            raise ValueError(f"clause variables must be distinct: {self.literals}")
        object.__setattr__(self, "literals", ordered)

    def satisfied_by(self, assignment: int) -> bool:
        return any(l.evaluate(assignment) for l in self.literals)


def clause(*signed_vars: int) -> Clause:
    """Build a clause from DIMACS-style signed 1-based variables, e.g. clause(2, -3, 4)."""
    lits = tuple(Literal(abs(x) - 1, x < 0) for x in signed_vars)
    return Clause(lits)  # type: ignore[arg-type]


@dataclass(frozen=True)
class Formula:
    """A 3-CNF formula: conjunction of ``m`` pairwise-distinct clauses over ``n`` variables."""

    n: int
    clauses: tuple[Clause, ...]

    def __post_init__(self):
        if self.n < 3:
            raise ValueError(f"need n >= 3 variables, got {self.n}")
        object.__setattr__(self, "clauses", tuple(self.clauses))
        for c in self.clauses:
            for l in c.literals:
                if l.variable >= self.n:
                    raise ValueError(f"variable {l.variable} out of range for n={self.n}")
        if len(set(self.clauses)) != len(self.clauses):
            raise ValueError("clauses must be pairwise distinct")

    @property
    def m(self) -> int:
        return len(self.clauses)

    @cached_property
    def _vars(self) -> np.ndarray:
        """(m, 3) variable indices, sorted within each clause."""
        return np.array([[l.variable for l in c.literals] for c in self.clauses],
                        dtype=np.int64).reshape(self.m, 3)

    @cached_property
    def _negs(self) -> np.ndarray:
        """(m, 3) negation flags matching ``_vars``."""
        return np.array([[l.negated for l in c.literals] for c in self.clauses],
                        dtype=bool).reshape(self.m, 3)


@dataclass(frozen=True)
class InstanceRecord:
    """A generated formula together with its solution census.

    ``trials`` counts rejection-sampling attempts and ``solution_count`` is
    the exact number of solutions r; either may be None for records read
    back from disk without the corresponding comment.
    """

    formula: Formula
    solution_count: int | None
    solution: int | None
    seed: int | None
    trials: int | None

    def __post_init__(self):
        if self.solution_count is not None and self.solution_count < 0:
            raise ValueError("solution_count must be >= 0")
        if self.solution is not None:
            if self.solution_count != 1:
                raise ValueError("solution stored but solution_count != 1")
            if violated_clauses(self.formula, self.solution) != 0:
                raise ValueError("stored solution does not satisfy the formula")


def assignment_to_bitstring(assignment: int, n: int) -> str:
    """Render an assignment with variable n-1 leftmost, variable 0 rightmost."""
    return format(assignment, f"0{n}b")


def bitstring_to_assignment(bits: str) -> int:
    return int(bits, 2)


def violated_clauses(formula: Formula, assignment: int) -> int:
    """Number of clauses of ``formula`` unsatisfied by ``assignment``."""
    if not 0 <= assignment < (1 << formula.n):
        raise ValueError(f"assignment {assignment} out of range for n={formula.n}")
    if formula.m == 0:
        return 0
    bits = (assignment >> formula._vars) & 1
    # A clause is violated iff every literal is false, i.e. each bit equals
    # its negation flag.
    return int(np.all(bits == formula._negs, axis=1).sum())


def max_clauses(n: int) -> int:
    """Distinct 3-clauses over n variables: 8 * C(n, 3)."""
    return 8 * math.comb(n, 3)


def _check_enum_cap(n: int):
    if n > MAX_ENUM_VARS:
        raise CapacityError(f"n={n} exceeds enumeration cap of {MAX_ENUM_VARS}")


def _satisfying_words(n: int, vars_: np.ndarray, negs: np.ndarray) -> np.ndarray:
    """Bit-packed mask over all 2^n assignments; bit set iff assignment satisfies all clauses.

    Assignment ``a`` lives at bit (a & 63) of word (a >> 6).  Each clause
    clears its violating subcube: an in-word pattern for variables < 6 and a
    strided word slice for variables >= 6.
    """
    if n <= 6:
        word = np.uint64((1 << (1 << n)) - 1) if n < 6 else np.uint64(0xFFFFFFFFFFFFFFFF)
        words = np.array([word], dtype=np.uint64)
    else:
        words = np.full(1 << (n - 6), np.uint64(0xFFFFFFFFFFFFFFFF), dtype=np.uint64)

    n_high = max(n - 6, 0)
    for k in range(vars_.shape[0]):
        mask = np.uint64(0xFFFFFFFFFFFFFFFF)
        fixed: list[tuple[int, int]] = []  # (word bit, violating value), descending
        for v, t in zip(vars_[k], negs[k]):
            v = int(v)
            t = int(t)  # violating bit value: the literal evaluates false there
            if v < 6:
                mask &= _LOW_PATTERN[v, t]
            else:
                fixed.append((v - 6, t))
        if not fixed:
            words &= ~mask
            continue
        # carve the selected word subcube out with a compact reshape: one
        # (free, 2, free, ...) axis pair per fixed word bit
        fixed.sort(reverse=True)
        dims: list[int] = []
        index: list = []
        top = n_high
        for q, t in fixed:
            dims.append(1 << (top - 1 - q))
            index.append(slice(None))
            dims.append(2)
            index.append(t)
            top = q
        dims.append(1 << top)
        index.append(slice(None))
        words.reshape(dims)[tuple(index)] &= ~mask
    return words


def _count_from_words(words: np.ndarray) -> int:
    return int(np.bitwise_count(words).sum())


if _HAVE_NUMBA:

    @njit(cache=True)
    def _census_kernel(vars_, negs, n, low_pattern):  # pragma: no cover - jitted
        """Count solutions with early bail-out at 2; returns (min(count, 2), solution).

        Scans the assignment space in blocks of at most 256 words so that the
        common case (many solutions) stops after a tiny fraction of the work.
        """
        full = np.uint64(0xFFFFFFFFFFFFFFFF)
        m = vars_.shape[0]
        nh = n - 6 if n > 6 else 0
        inv = np.empty(m, np.uint64)
        fbits = np.empty(m, np.int64)
        fvals = np.empty(m, np.int64)
        for k in range(m):
            msk = full
            fb = np.int64(0)
            fv = np.int64(0)
            for j in range(3):
                v = vars_[k, j]
                t = negs[k, j]
                if v < 6:
                    msk = msk & low_pattern[v, t]
                else:
                    fb |= np.int64(1) << (v - 6)
                    if t:
                        fv |= np.int64(1) << (v - 6)
            inv[k] = ~msk
            fbits[k] = fb
            fvals[k] = fv

        wb = nh if nh < 8 else 8  # log2 words per block
        bbits = nh - wb  # log2 number of blocks
        wpb = np.int64(1) << wb
        init = full if n >= 6 else np.uint64((1 << (1 << n)) - 1)
        block = np.empty(wpb, np.uint64)
        total = 0
        sol = np.int64(-1)
        for b in range(np.int64(1) << bbits):
            for i in range(wpb):
                block[i] = init
            for k in range(m):
                hi_f = fbits[k] >> wb
                if (fvals[k] >> wb) & hi_f != np.int64(b) & hi_f:
                    continue  # clause's subcube misses this block entirely
                lo_f = fbits[k] & (wpb - 1)
                base = fvals[k] & (wpb - 1)
                free = (wpb - 1) ^ lo_f
                x = inv[k]
                s = free
                while True:
                    block[base | s] &= x
                    if s == 0:
                        break
                    s = (s - 1) & free
            for i in range(wpb):
                w = block[i]
                while w != np.uint64(0):
                    lsb = w & (~w + np.uint64(1))
                    total += 1
                    if total >= 2:
                        return 2, np.int64(-1)
                    p = np.int64(0)
                    q = lsb
                    while q > np.uint64(1):
                        q >>= np.uint64(1)
                        p += 1
                    sol = ((np.int64(b) << wb | np.int64(i)) << 6) | p
                    w ^= lsb
        return total, sol


def _solution_census(n: int, vars_: np.ndarray, negs: np.ndarray) -> tuple[int, int]:
    """(min(count, 2), solution index) for raw clause arrays; solution is -1
    unless the count is exactly 1."""
    if _HAVE_NUMBA:
        return _census_kernel(np.ascontiguousarray(vars_),
                              np.ascontiguousarray(negs.astype(np.int64)),
                              n, _LOW_PATTERN)
    words = _satisfying_words(n, vars_, negs)
    count = _count_from_words(words)
    if count != 1:
        return min(count, 2), -1
    w = int(np.flatnonzero(words)[0])
    return 1, (w << 6) + (int(words[w]).bit_length() - 1)


def count_solutions(formula: Formula) -> int:
    """Exact number of satisfying assignments, by enumeration of all 2^n."""
    _check_enum_cap(formula.n)
    if formula.m == 0:
        return 1 << formula.n
    words = _satisfying_words(formula.n, formula._vars, formula._negs)
    return _count_from_words(words)


def is_satisfiable(formula: Formula) -> bool:
    """Whether at least one satisfying assignment exists (early-exit scan)."""
    _check_enum_cap(formula.n)
    if formula.m == 0:
        return True
    count, _ = _solution_census(formula.n, formula._vars, formula._negs)
    return count > 0


def satisfying_assignments(formula: Formula, limit: int | None = None) -> list[int]:
    """All satisfying assignments in increasing order (at most ``limit``)."""
    _check_enum_cap(formula.n)
    if formula.m == 0:
        stop = (1 << formula.n) if limit is None else min(limit, 1 << formula.n)
        return list(range(stop))
    words = _satisfying_words(formula.n, formula._vars, formula._negs)
    out: list[int] = []
    for w in np.flatnonzero(words):
        word = int(words[w])
        base = int(w) << 6
        while word:
            lsb = word & -word
            out.append(base + lsb.bit_length() - 1)
            word ^= lsb
            if limit is not None and len(out) >= limit:
                return out
    return out


def _draw_formula_arrays(n: int, m: int, rng: np.random.Generator):
    """Draw m distinct random 3-clauses as (vars, negs) arrays.

    Per clause: 3 i.i.d. uniform variables, redrawn until distinct, then
    sorted; each literal negated with probability 1/2.  Clauses duplicating
    an earlier one (same literal set) are redrawn wholesale.  Draws are
    vectorized over the rows still needing a (re)draw.
    """
    vars_ = np.zeros((m, 3), dtype=np.int64)
    negs = np.zeros((m, 3), dtype=np.int64)
    todo = np.arange(m)
    while todo.size:
        v = rng.integers(0, n, size=(todo.size, 3))
        s = rng.integers(0, 2, size=(todo.size, 3))
        v.sort(axis=1)
        ok = (v[:, 0] != v[:, 1]) & (v[:, 1] != v[:, 2])
        rows = todo[ok]
        vars_[rows] = v[ok]
        negs[rows] = s[ok]
        todo = todo[~ok]
        if todo.size:
            continue
        # dedupe: encode each clause as one integer key and redraw collisions
        key = (((vars_[:, 0] * n + vars_[:, 1]) * n + vars_[:, 2]) * 8
               + negs[:, 0] + 2 * negs[:, 1] + 4 * negs[:, 2])
        _, first = np.unique(key, return_index=True)
        if first.size < m:
            dup = np.ones(m, dtype=bool)
            dup[first] = False
            todo = np.flatnonzero(dup)
    return vars_, negs.astype(bool)


def _formula_from_arrays(n: int, vars_: np.ndarray, negs: np.ndarray) -> Formula:
    cls = tuple(
        Clause(tuple(Literal(int(v), bool(t)) for v, t in zip(vr, nr)))  # type: ignore[arg-type]
        for vr, nr in zip(vars_, negs)
    )
    return Formula(n, cls)


def generate_random_3sat(n: int, m: int, seed: int) -> Formula:
    """Random 3-SAT formula: m distinct clauses, 3 distinct variables each,
    each literal negated with probability 1/2.  Deterministic in ``seed``."""
    if m < 1:
        raise GenerationError(f"need at least one clause, got m={m}")
    if m > max_clauses(n):
        raise GenerationError(f"m={m} exceeds the {max_clauses(n)} distinct clauses over n={n}")
    rng = np.random.default_rng(seed)
    vars_, negs = _draw_formula_arrays(n, m, rng)
    return _formula_from_arrays(n, vars_, negs)


def generate_unique_solution_instance(n: int, m: int, seed: int,
                                      max_trials: int = 1_000_000) -> InstanceRecord:
    """Rejection-sample random formulas until one has exactly one solution.

    Uniquely-solvable instances are exponentially rare at low m/n, so
    ``trials`` in the returned record grows roughly like e^{0.4 n} at m/n=3.
    """
    if m < 1:
        raise GenerationError(f"need at least one clause, got m={m}")
    if m > max_clauses(n):
        raise GenerationError(f"m={m} exceeds the {max_clauses(n)} distinct clauses over n={n}")
    _check_enum_cap(n)
    rng = np.random.default_rng(seed)
    for trial in range(1, max_trials + 1):
        vars_, negs = _draw_formula_arrays(n, m, rng)
        count, solution = _solution_census(n, vars_, negs)
        if count != 1:
            continue
        return InstanceRecord(
            formula=_formula_from_arrays(n, vars_, negs),
            solution_count=1,
            solution=solution,
            seed=seed,
            trials=trial,
        )
    raise UniqueInstanceNotFound(
        f"no unique-solution instance in {max_trials} trials (n={n}, m={m}, seed={seed})",
        trials=max_trials,
    )


def serialize_dimacs(formula: Formula, record: InstanceRecord | None = None) -> str:
    """DIMACS CNF text; known seed / solution count / solution go into comments."""
    lines = []
    if record is not None:
        if record.seed is not None:
            lines.append(f"c seed {record.seed}")
        if record.solution_count is not None:
            lines.append(f"c solutions {record.solution_count}")
        if record.solution is not None:
            lines.append(f"c solution {assignment_to_bitstring(record.solution, formula.n)}")
    lines.append(f"p cnf {formula.n} {formula.m}")
    for c in formula.clauses:
        toks = [str(-(l.variable + 1) if l.negated else (l.variable + 1)) for l in c.literals]
        lines.append(" ".join(toks) + " 0")
    return "\n".join(lines) + "\n"


def _parse_dimacs_lines(text: str):
    n = m = None
    clauses: list[Clause] = []
    seen: set[Clause] = set()
    meta: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            parts = line.split()
            if len(parts) >= 3 and parts[1] in ("seed", "solutions", "solution"):
                meta[parts[1]] = parts[2]
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsParseError(f"malformed header {line!r}", lineno)
            try:
                n, m = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsParseError(f"non-integer header fields in {line!r}", lineno) from None
            continue
        if n is None:
            raise DimacsParseError("clause before 'p cnf' header", lineno)
        try:
            toks = [int(t) for t in line.split()]
        except ValueError:
            raise DimacsParseError(f"non-integer token in clause {line!r}", lineno) from None
        if not toks or toks[-1] != 0:
            raise DimacsParseError("clause line must end with 0", lineno)
        lits = toks[:-1]
        if len(lits) != 3:
            raise DimacsParseError(f"expected 3 literals per clause, got {len(lits)}", lineno)
        if any(abs(v) < 1 or abs(v) > n for v in lits):
            raise DimacsParseError(f"variable out of range 1..{n} in {line!r}", lineno)
        try:
            cl = clause(*lits)
        except ValueError as exc:
            raise DimacsParseError(str(exc), lineno) from None
        if cl in seen:
            raise DimacsParseError("duplicate clause", lineno)
        seen.add(cl)
        clauses.append(cl)
    if n is None or m is None:
        raise DimacsParseError("missing 'p cnf' header", 1)
    if len(clauses) != m:
        raise DimacsParseError(f"header announces {m} clauses, found {len(clauses)}",
                               len(text.splitlines()))
    return Formula(n, tuple(clauses)), meta


def parse_dimacs(text: str) -> Formula:
    """Parse DIMACS CNF text (clauses of exactly 3 literals)."""
    formula, _ = _parse_dimacs_lines(text)
    return formula


def parse_dimacs_record(text: str) -> InstanceRecord:
    """Parse DIMACS text and recover seed / solution metadata from comments."""
    formula, meta = _parse_dimacs_lines(text)
    seed = int(meta["seed"]) if "seed" in meta else None
    count = int(meta["solutions"]) if "solutions" in meta else None
    solution = bitstring_to_assignment(meta["solution"]) if "solution" in meta else None
    if count is None and solution is not None:
        count = 1
    return InstanceRecord(formula=formula, solution_count=count, solution=solution,
                          seed=seed, trials=None)
