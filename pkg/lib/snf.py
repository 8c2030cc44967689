"""Exact integer linear algebra: Smith normal form, p-adic elementary divisors,
ranks and kernels over F_p, and the ν-vectors of evaluated commutator matrices.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy
from sympy.matrices import normalforms

from .exceptions import InvalidArgs, PairingViolation
from .lattice import CommutatorMatrix, evaluate_matrix

logger = logging.getLogger(__name__)

INFINITY = float("inf")

Valuation = Union[int, float]


@dataclass(frozen=True)
class SnfResult:
    diagonal: Tuple[int, ...]
    rank: int

    @property
    def nonzero(self) -> Tuple[int, ...]:
        return self.diagonal[: self.rank]


@dataclass(frozen=True)
class NuVector:
    """Paired elementary-divisor valuations capped at `level`, one entry per pair."""

    entries: Tuple[int, ...]
    level: int

    def __post_init__(self):
        if any(b < a for a, b in zip(self.entries, self.entries[1:])):
            raise InvalidArgs(f"ν no es creciente: {self.entries}")
        if any(not 0 <= e <= self.level for e in self.entries):
            raise InvalidArgs(f"ν fuera de [0, {self.level}]: {self.entries}")


@dataclass(frozen=True)
class CanonicalB:
    """The i×j matrix with an identity k-block in the top-left corner and zeros elsewhere."""

    i: int
    j: int
    k: int

    def __post_init__(self):
        if self.k > min(self.i, self.j) or min(self.i, self.j, self.k) < 0:
            raise InvalidArgs(f"B_{self.i}x{self.j}^{self.k} no existe")

    def matrix(self) -> np.ndarray:
        out = np.zeros((self.i, self.j), dtype=np.int64)
        for t in range(self.k):
            out[t, t] = 1
        return out


def _rows(M) -> List[List[int]]:
    array = np.asarray(M, dtype=object)
    if array.ndim != 2:
        if array.size == 0:
            return []
        raise InvalidArgs("Se esperaba una matriz")
    return [[int(x) for x in row] for row in array]


def _column_reduce(M) -> Tuple[int, List[List[int]]]:
    """Rank and a unimodular V with U·M·V diagonal, for kernel bases."""
    A = _rows(M)
    nr = len(A)
    nc = len(A[0]) if A else (np.asarray(M).shape[1] if np.asarray(M).ndim == 2 else 0)
    V = [[int(i == j) for j in range(nc)] for i in range(nc)]

    def swap_cols(a: int, b: int) -> None:
        for row in A:
            row[a], row[b] = row[b], row[a]
        for row in V:
            row[a], row[b] = row[b], row[a]

    def add_col(dst: int, src: int, factor: int) -> None:
        # column dst -= factor * column src
        for row in A:
            row[dst] -= factor * row[src]
        for row in V:
            row[dst] -= factor * row[src]

    t = 0
    while t < min(nr, nc):
        pivot = None
        for i in range(t, nr):
            for j in range(t, nc):
                value = A[i][j]
                if value and (pivot is None or abs(value) < abs(A[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        A[t], A[pivot[0]] = A[pivot[0]], A[t]
        if pivot[1] != t:
            swap_cols(t, pivot[1])
        while True:
            clean = True
            pv = A[t][t]
            for i in range(t + 1, nr):
                if A[i][t]:
                    factor = A[i][t] // pv
                    A[i] = [a - factor * b for a, b in zip(A[i], A[t])]
                    if A[i][t]:
                        clean = False
            for j in range(t + 1, nc):
                if A[t][j]:
                    add_col(j, t, A[t][j] // pv)
                    if A[t][j]:
                        clean = False
            if not clean:
                # move the smallest leftover of row/column t into the pivot
                best = (abs(A[t][t]), "keep", t)
                for i in range(t + 1, nr):
                    if A[i][t] and abs(A[i][t]) < best[0]:
                        best = (abs(A[i][t]), "row", i)
                for j in range(t + 1, nc):
                    if A[t][j] and abs(A[t][j]) < best[0]:
                        best = (abs(A[t][j]), "col", j)
                if best[1] == "row":
                    A[t], A[best[2]] = A[best[2]], A[t]
                elif best[1] == "col":
                    swap_cols(t, best[2])
                continue
            offender = None
            for i in range(t + 1, nr):
                for j in range(t + 1, nc):
                    if A[i][j] % pv:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            A[t] = [a + b for a, b in zip(A[t], A[offender])]
        t += 1
    return sum(1 for i in range(min(nr, nc)) if A[i][i]), V


def _invariant_factors(M) -> Tuple[int, ...]:
    """SNF diagonal over ZZ: nonzero factors ascending by divisibility, then zeros."""
    array = np.asarray(M, dtype=object)
    if array.ndim != 2:
        if array.size == 0:
            return ()
        raise InvalidArgs("Se esperaba una matriz")
    size = min(array.shape)
    if size == 0:
        return ()
    D = normalforms.smith_normal_form(sympy.Matrix(_rows(array)), domain=sympy.ZZ)
    nonzero = sorted(abs(int(D[i, i])) for i in range(size) if D[i, i] != 0)
    return tuple(nonzero) + (0,) * (size - len(nonzero))


def smith_normal_form(M) -> SnfResult:
    """Smith normal form over the integers; zeros come last."""
    diagonal = _invariant_factors(M)
    return SnfResult(diagonal, sum(1 for x in diagonal if x))


def integer_kernel_basis(M) -> List[Tuple[int, ...]]:
    """A saturated Z-basis of {x : M x = 0}."""
    array = np.asarray(M, dtype=object)
    nc = array.shape[1] if array.ndim == 2 else 0
    if array.ndim != 2 or array.shape[0] == 0:
        return [tuple(int(i == j) for j in range(nc)) for i in range(nc)]
    rank, V = _column_reduce(array)
    return [tuple(V[i][j] for i in range(nc)) for j in range(rank, nc)]


def p_valuation(n: int, p: int) -> Valuation:
    if n == 0:
        return INFINITY
    n = abs(int(n))
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def elementary_divisor_valuations(M, p: int) -> List[Valuation]:
    """p-adic valuations of the SNF diagonal, ascending; zero divisors give INFINITY."""
    return sorted(p_valuation(x, p) for x in _invariant_factors(M))


def _reduce(M, p: int) -> np.ndarray:
    dtype = np.int64 if p < 2 ** 31 else object
    array = np.array(np.asarray(M, dtype=object) % p, dtype=dtype)
    if array.ndim != 2:
        array = array.reshape(0, 0)
    return array


def _rref_mod_p(A: np.ndarray, p: int) -> Tuple[np.ndarray, List[int]]:
    A = A.copy()
    nr, nc = A.shape
    pivots: List[int] = []
    r = 0
    for c in range(nc):
        pivot = None
        for i in range(r, nr):
            if A[i, c] % p != 0:
                pivot = i
                break
        if pivot is None:
            continue
        if pivot != r:
            A[[r, pivot], :] = A[[pivot, r], :]
        inv = pow(int(A[r, c]) % p, -1, p)
        A[r, :] = (A[r, :] * inv) % p
        for i in range(nr):
            if i != r and A[i, c] % p != 0:
                f = A[i, c] % p
                A[i, :] = (A[i, :] - f * A[r, :]) % p
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return A, pivots


def rank_mod_p(M, p: int) -> int:
    """Rank of M reduced modulo p."""
    A = _reduce(M, p)
    if A.size == 0:
        return 0
    _, pivots = _rref_mod_p(A, p)
    return len(pivots)


def kernel_mod_p(M, p: int) -> List[Tuple[int, ...]]:
    """Echelonized basis of the null space of M over F_p, one vector per free column."""
    A = _reduce(M, p)
    nc = A.shape[1]
    if A.shape[0] == 0:
        return [tuple(int(i == j) for j in range(nc)) for i in range(nc)]
    R, pivots = _rref_mod_p(A, p)
    basis = []
    for free in (c for c in range(nc) if c not in pivots):
        vec = [0] * nc
        vec[free] = 1
        for row, c in enumerate(pivots):
            vec[c] = int(-R[row, free]) % p
        basis.append(tuple(vec))
    return basis


def span_basis_mod_p(vectors, p: int, width: int) -> List[Tuple[int, ...]]:
    """Reduced echelon basis of the span of `vectors` in F_p^width."""
    A = _reduce(np.asarray(vectors, dtype=object).reshape(-1, width), p)
    if A.shape[0] == 0:
        return []
    R, pivots = _rref_mod_p(A, p)
    return [tuple(int(x) for x in R[row]) for row in range(len(pivots))]


def solve_mod_p(A, b: Sequence[int], p: int) -> Optional[Tuple[int, ...]]:
    """One solution x of A x = b over F_p, or None."""
    A = _reduce(A, p)
    nr, nc = A.shape
    augmented = np.concatenate([A, _reduce(np.asarray(b, dtype=object).reshape(nr, 1), p)], axis=1)
    R, pivots = _rref_mod_p(augmented, p)
    if nc in pivots:
        return None
    x = [0] * nc
    for row, c in enumerate(pivots):
        x[c] = int(R[row, nc]) % p
    return tuple(x)


def nu_vector(Cm: CommutatorMatrix, w: Sequence[int], r: int, p: int) -> NuVector:
    """ν_r(w): the h smallest paired valuations of R(w), each capped at r.

    w is reduced to its canonical lift in [0, p^r) before evaluation.
    """
    modulus = p ** r
    lift = [int(x) % modulus for x in w]
    h = Cm.size // 2
    valuations = elementary_divisor_valuations(evaluate_matrix(Cm, lift), p)
    capped = [min(v, r) for v in valuations[: 2 * h]]
    for a, b in zip(capped[0::2], capped[1::2]):
        if a != b:
            raise PairingViolation(f"Valuaciones sin aparear {capped} en w={lift}")
    return NuVector(tuple(int(v) for v in capped[0::2]), r)


def snf_equals_B(M, B: CanonicalB, p: int) -> bool:
    """True iff the SNF of M over Z_(p) is B: rational rank k and all k divisors p-units."""
    array = np.asarray(M, dtype=object)
    if array.ndim != 2 or array.shape != (B.i, B.j):
        return False
    snf = smith_normal_form(array)
    if snf.rank != B.k:
        return False
    return all(x % p for x in snf.nonzero)
