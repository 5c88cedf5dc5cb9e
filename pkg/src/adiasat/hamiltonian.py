"""Implicit Hamiltonians for the adiabatic interpolation over 2^n basis states.

The initial operator mixes every variable with its flipped partner and has
integer spectrum 0..n with binomial degeneracies; its ground state is the
uniform superposition.  The final operator is diagonal, charging each basis
assignment one unit of energy per violated clause.  The schedule is the
linear interpolation between the two.

Matrix-vector products are implicit: n strided bit-flip passes plus one
diagonal scale, O((n+1) 2^n) per apply.  Nothing of size 2^n x 2^n is ever
materialized except by :func:`dense_hamiltonian`, the small-n test oracle.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import LinearOperator

from .satcore import MAX_ENUM_VARS, CapacityError, Formula, violated_clauses

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional accelerator
    _HAVE_NUMBA = False

# State vectors take 2^n * 16 bytes as complex128; 24 variables = 256 MiB.
MAX_STATE_VARS = 24

# Dense 2^n x 2^n construction is for cross-validation only.
DENSE_ORACLE_MAX = 12


@dataclass(frozen=True)
class DegeneracyTable:
    """How many of the 2^n basis states sit at each integer energy."""

    n: int
    counts: np.ndarray  # counts[e] = number of states with energy e

    def count(self, energy: int) -> int:
        return int(self.counts[energy]) if 0 <= energy < len(self.counts) else 0

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def items(self) -> list[tuple[int, int]]:
        return [(e, int(c)) for e, c in enumerate(self.counts)]

    def to_csv(self, path) -> None:
        with open(path, "w") as f:
            f.write("energy,count\n")
            for e, c in self.items():
                f.write(f"{e},{c}\n")


def h0_spectrum(n: int) -> DegeneracyTable:
    """Spectrum of the mixing Hamiltonian: energy i has multiplicity C(n, i)."""
    if n < 1:
        raise ValueError("need n >= 1")
    counts = np.array([math.comb(n, i) for i in range(n + 1)], dtype=np.int64)
    return DegeneracyTable(n=n, counts=counts)


def initial_ground_state(n: int) -> np.ndarray:
    """Uniform superposition over all 2^n basis states (energy 0 at s=0)."""
    if n < 1:
        raise ValueError("need n >= 1")
    if n > MAX_STATE_VARS:
        raise CapacityError(f"n={n} exceeds the state-vector cap of {MAX_STATE_VARS}")
    return np.full(1 << n, 1.0 / math.sqrt(1 << n))


def diagonal_energy(formula: Formula, assignment: int) -> int:
    """Final-Hamiltonian energy of a basis state: its violated-clause count."""
    return violated_clauses(formula, assignment)


def violations_table(formula: Formula) -> np.ndarray:
    """Violated-clause count for every assignment, as the smallest integer dtype.

    Each clause adds 1 on its violating subcube through a strided view, so
    the table costs O(m 2^{n-3}) despite the 2^n entries.
    """
    n = formula.n
    if n > MAX_ENUM_VARS:
        raise CapacityError(f"n={n} exceeds enumeration cap of {MAX_ENUM_VARS}")
    table = np.zeros(1 << n, dtype=np.uint8 if formula.m < 256 else np.uint16)
    vars_, negs = formula._vars, formula._negs
    for k in range(formula.m):
        pairs = sorted(((int(v), int(t)) for v, t in zip(vars_[k], negs[k])),
                       reverse=True)
        dims: list[int] = []
        index: list = []
        top = n
        for v, t in pairs:
            dims.append(1 << (top - 1 - v))
            index.append(slice(None))
            dims.append(2)
            index.append(t)
            top = v
        dims.append(1 << top)
        index.append(slice(None))
        table.reshape(dims)[tuple(index)] += 1
    return table


def degeneracy_histogram(formula: Formula) -> DegeneracyTable:
    """Energy histogram of the final Hamiltonian over all 2^n states."""
    table = violations_table(formula)
    counts = np.bincount(table, minlength=formula.m + 1).astype(np.int64)
    return DegeneracyTable(n=formula.n, counts=counts)


if _HAVE_NUMBA:

    @njit(cache=True)
    def _apply_kernel(v, out, diag, s, n):  # pragma: no cover - jitted
        dim = v.shape[0]
        base = (1.0 - s) * 0.5 * n
        half = 0.5 * (1.0 - s)
        for a in range(dim):
            acc = v[a ^ 1]
            for i in range(1, n):
                acc += v[a ^ (1 << i)]
            out[a] = (base + s * diag[a]) * v[a] - half * acc


class HamiltonianSchedule:
    """The interpolating operator family H(s) for one formula.

    The violated-clause diagonal is computed once at construction; after
    that every ``apply`` is a streaming pass over the state vector.  The
    object is immutable and safe to share across threads.
    """

    def __init__(self, formula: Formula):
        if formula.n > MAX_STATE_VARS:
            raise CapacityError(
                f"n={formula.n} exceeds the state-vector cap of {MAX_STATE_VARS}")
        self.formula = formula
        self.n = formula.n
        self.dim = 1 << formula.n
        self.diagonal = violations_table(formula)
        self._diag_f = self.diagonal.astype(np.float64)

    def apply(self, s: float, v: np.ndarray) -> np.ndarray:
        """H(s) v.  ``s`` may sit slightly outside [0, 1] for fitting probes."""
        v = np.asarray(v)
        if v.shape != (self.dim,):
            raise ValueError(f"state vector must have shape ({self.dim},), got {v.shape}")
        if _HAVE_NUMBA and v.dtype in (np.float64, np.complex128) and v.flags.c_contiguous:
            out = np.empty_like(v)
            _apply_kernel(v, out, self._diag_f, float(s), self.n)
            return out
        return self._apply_numpy(s, v)

    def _apply_numpy(self, s: float, v: np.ndarray) -> np.ndarray:
        out = ((1.0 - s) * (0.5 * self.n) + s * self.diagonal) * v
        half = 0.5 * (1.0 - s)
        if half == 0.0:
            return out
        for i in range(self.n):
            v3 = v.reshape(-1, 2, 1 << i)
            o3 = out.reshape(-1, 2, 1 << i)
            o3[:, 0, :] -= half * v3[:, 1, :]
            o3[:, 1, :] -= half * v3[:, 0, :]
        return out

    def aslinearoperator(self, s: float) -> LinearOperator:
        return LinearOperator(shape=(self.dim, self.dim),
                              matvec=lambda v: self.apply(s, v),
                              dtype=np.float64)

    def dense(self, s: float) -> np.ndarray:
        return dense_hamiltonian(self.formula, s)

    def dh_ds_norm_bound(self, sharpen: bool = False) -> float:
        """Upper bound on the 2-norm of dH/ds = H(1) - H(0).

        Default is the triangle bound m + n; ``sharpen=True`` runs an
        extremal-eigenvalue iteration on the difference operator instead.
        """
        if not sharpen:
            return float(self.formula.m + self.n)
        from scipy.sparse.linalg import eigsh

        op = LinearOperator(
            shape=(self.dim, self.dim),
            matvec=lambda v: self.apply(1.0, v) - self.apply(0.0, v),
            dtype=np.float64,
        )
        rng = np.random.default_rng(0x5EED)
        v0 = rng.standard_normal(self.dim)
        ncv = min(self.dim, 24)
        lo = eigsh(op, k=1, which="SA", v0=v0, ncv=ncv, tol=1e-12,
                   return_eigenvectors=False)
        hi = eigsh(op, k=1, which="LA", v0=v0, ncv=ncv, tol=1e-12,
                   return_eigenvectors=False)
        return float(max(abs(lo[0]), abs(hi[0])))


def apply_h(s: float, ham: "HamiltonianSchedule | Formula", v: np.ndarray) -> np.ndarray:
    """H(s) v.  Accepts a Formula for one-off use; hold a HamiltonianSchedule
    when applying repeatedly (the diagonal is precomputed there)."""
    if isinstance(ham, Formula):
        ham = HamiltonianSchedule(ham)
    return ham.apply(s, v)


def dh_ds_norm_bound(formula: Formula, sharpen: bool = False) -> float:
    return HamiltonianSchedule(formula).dh_ds_norm_bound(sharpen=sharpen)


def dense_hamiltonian(formula: Formula, s: float) -> np.ndarray:
    """Dense H(s) built by explicit tensor products; test oracle for small n.

    Deliberately independent of the implicit matvec: the mixing part comes
    from Kronecker products of the one-variable matrix, the diagonal from
    per-assignment clause evaluation.
    """
    n = formula.n
    if n > DENSE_ORACLE_MAX:
        raise CapacityError(f"dense oracle capped at n={DENSE_ORACLE_MAX}, got {n}")
    dim = 1 << n
    one_qubit = 0.5 * np.array([[1.0, -1.0], [-1.0, 1.0]])
    h0 = np.zeros((dim, dim))
    for i in range(n):
        ops = [np.eye(2)] * n
        ops[n - 1 - i] = one_qubit  # first kron factor owns the high bit
        term = ops[0]
        for op in ops[1:]:
            term = np.kron(term, op)
        h0 += term
    h1 = np.diag([float(violated_clauses(formula, a)) for a in range(dim)])
    return (1.0 - s) * h0 + s * h1
