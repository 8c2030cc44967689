"""2-nilpotent Lie lattices over the integers on an adapted basis.

A `LieLattice` of rank d and derived rank d' stores structure constants
λ[i][j][k] (0-based) with [e_i, e_j] = Σ_k λ[i][j][k] e_{d-d'+k}; the last d'
basis elements span the derived sublattice.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import simplejson
import sympy

from .exceptions import InvalidArgs, LengthMismatch, NotAdapted, NotUnimodular

logger = logging.getLogger(__name__)

Structure = Tuple[Tuple[Tuple[int, ...], ...], ...]


def _freeze(array) -> Structure:
    return tuple(tuple(tuple(int(v) for v in row) for row in plane) for plane in array)


def _coefficient_array(values: Structure, shape: Tuple[int, int, int]) -> np.ndarray:
    """int64 when every coefficient is below 2**62 in absolute value, Python ints otherwise."""
    exact = np.array(values, dtype=object).reshape(shape)
    if exact.size and max(abs(int(x)) for x in exact.flat) >= 2 ** 62:
        return exact
    return exact.astype(np.int64)


@dataclass(frozen=True)
class LieLattice:
    """Integer structure constants of a class-2 Lie lattice.

    `structure` is a dense d×d×d' tuple; it is not forced to be antisymmetric
    so that defective input can be represented and reported by `validate`.
    """

    name: str
    d: int
    d_prime: int
    structure: Structure
    labels: Optional[Tuple[str, ...]] = field(default=None, compare=False)

    def __post_init__(self):
        if self.d < 0 or self.d_prime < 0 or self.d_prime > self.d:
            raise InvalidArgs(f"Rangos inválidos: d={self.d}, d'={self.d_prime}")
        if len(self.structure) != self.d or any(len(row) != self.d for row in self.structure):
            raise InvalidArgs(f"Las constantes de estructura no son {self.d}x{self.d}")
        for row in self.structure:
            for coeffs in row:
                if len(coeffs) != self.d_prime:
                    raise LengthMismatch(f"Cada corchete necesita {self.d_prime} coordenadas, llegaron {len(coeffs)}")
        if self.labels is not None and len(self.labels) != self.d:
            raise InvalidArgs(f"Se esperaban {self.d} etiquetas, llegaron {len(self.labels)}")

    # ------------------------------------------------------------------
    # Constructores
    # ------------------------------------------------------------------
    @classmethod
    def from_brackets(
        cls,
        d: int,
        d_prime: int,
        brackets: Mapping[Tuple[int, int], Sequence[int]],
        name: str = "lattice",
        labels: Optional[Sequence[str]] = None,
    ) -> "LieLattice":
        """Build from 1-based (i, j) -> coordinates, i < j; antisymmetry is implied."""
        array = np.zeros((d, d, d_prime), dtype=object)
        array[...] = 0
        for (i, j), coeffs in brackets.items():
            if not (1 <= i < j <= d):
                raise InvalidArgs(f"Par de índices inválido ({i}, {j}); se necesita 1 <= i < j <= {d}")
            if len(coeffs) != d_prime:
                raise LengthMismatch(f"El corchete ({i}, {j}) necesita {d_prime} coordenadas, tiene {len(coeffs)}")
            for k, c in enumerate(coeffs):
                array[i - 1, j - 1, k] = int(c)
                array[j - 1, i - 1, k] = -int(c)
        return cls(name, d, d_prime, _freeze(array), tuple(labels) if labels else None)

    @classmethod
    def from_array(cls, array, name: str = "lattice", labels: Optional[Sequence[str]] = None) -> "LieLattice":
        array = np.asarray(array, dtype=object)
        if array.ndim != 3:
            raise InvalidArgs("Se esperaba un arreglo d×d×d'")
        d, _, d_prime = array.shape
        return cls(name, d, d_prime, _freeze(array), tuple(labels) if labels else None)

    # ------------------------------------------------------------------
    # Vistas
    # ------------------------------------------------------------------
    @property
    def m(self) -> int:
        """Number of basis elements outside the derived sublattice."""
        return self.d - self.d_prime

    @cached_property
    def tensor(self) -> np.ndarray:
        return _coefficient_array(self.structure, (self.d, self.d, self.d_prime))

    def bracket(self, u: Sequence[int], v: Sequence[int]) -> np.ndarray:
        """Derived coordinates of [u, v] for coordinate vectors u, v of length d."""
        lam = self.tensor
        left = np.tensordot(np.asarray(u, dtype=lam.dtype), lam, axes=1)
        return np.tensordot(np.asarray(v, dtype=lam.dtype), left, axes=1)

    def brackets(self) -> Dict[Tuple[int, int], Tuple[int, ...]]:
        """Nonzero brackets as 1-based (i, j) with i < j."""
        out: Dict[Tuple[int, int], Tuple[int, ...]] = {}
        for i in range(self.d):
            for j in range(i + 1, self.d):
                coeffs = self.structure[i][j]
                if any(coeffs):
                    out[(i + 1, j + 1)] = coeffs
        return out

    def is_abelian(self) -> bool:
        return not self.tensor.any()

    def to_document(self) -> dict:
        doc = {
            "name": self.name,
            "d": self.d,
            "d_prime": self.d_prime,
            "brackets": [{"i": i, "j": j, "coeffs": list(c)} for (i, j), c in self.brackets().items()],
        }
        if self.labels:
            doc["labels"] = list(self.labels)
        return doc

    @cached_property
    def digest(self) -> str:
        """sha256 of the canonical structure (name and labels excluded)."""
        payload = simplejson.dumps(
            {"d": self.d, "d_prime": self.d_prime, "structure": self.structure}, sort_keys=True, separators=(",", ":")
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass
class ValidationReport:
    """Invariant violations found by `validate`."""

    lattice: str
    violations: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {"lattice": self.lattice, "valid": self.ok, "violations": list(self.violations)}


def validate(L: LieLattice) -> ValidationReport:
    """Check antisymmetry, 2-nilpotency, derived-rank tightness and the Jacobi identity."""
    report = ValidationReport(L.name)
    lam = L.tensor
    m = L.m
    for i in range(L.d):
        if lam[i, i].any():
            report.violations.append(f"antisimetría: [e{i + 1}, e{i + 1}] != 0")
        for j in range(i + 1, L.d):
            if (lam[i, j] != -lam[j, i]).any():
                report.violations.append(f"antisimetría: [e{i + 1}, e{j + 1}] != -[e{j + 1}, e{i + 1}]")
    for i in range(L.d):
        for j in range(L.d):
            if (i >= m or j >= m) and lam[i, j].any():
                report.violations.append(
                    f"2-nilpotencia: [e{i + 1}, e{j + 1}] != 0 con un índice en el subretículo derivado"
                )
    if L.d_prime:
        rows = [list(L.structure[i][j]) for i in range(L.d) for j in range(i + 1, L.d)]
        rank = sympy.Matrix(rows).rank() if rows else 0
        if rank != L.d_prime:
            report.violations.append(
                f"rango derivado: los corchetes generan rango {rank} sobre Q y d' = {L.d_prime}"
            )
    if L.d_prime and L.d >= 3:
        # [[e_a, e_b], e_c] with [e_a, e_b] expanded on the derived block
        double = np.tensordot(lam, lam[m:, :, :], axes=([2], [0]))
        jacobi = double + np.transpose(double, (1, 2, 0, 3)) + np.transpose(double, (2, 0, 1, 3))
        if jacobi.any():
            a, b, c, _ = (int(x) for x in np.argwhere(jacobi)[0])
            report.violations.append(f"Jacobi: falla en (e{a + 1}, e{b + 1}, e{c + 1})")
    if report.violations:
        logger.debug(f"{L.name}: {len(report.violations)} violaciones")
    return report


def make_G_mn(m: int, n: int) -> LieLattice:
    """The lattice G_{m×n}: generators c_1..c_{m+n}, z_11..z_mn, [c_i, c_{m+j}] = z_ij."""
    if m < 1 or n < 1:
        raise InvalidArgs(f"m y n tienen que ser al menos 1 (m={m}, n={n})")
    d_prime = m * n
    d = m + n + d_prime
    brackets = {}
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            coeffs = [0] * d_prime
            coeffs[(i - 1) * n + (j - 1)] = 1
            brackets[(i, m + j)] = coeffs
    labels = [f"c{i}" for i in range(1, m + n + 1)] + [f"z{i}{j}" for i in range(1, m + 1) for j in range(1, n + 1)]
    return LieLattice.from_brackets(d, d_prime, brackets, name=f"G_{m}x{n}", labels=labels)


def abelian(d: int) -> LieLattice:
    if d < 0:
        raise InvalidArgs(f"Rango negativo: {d}")
    return LieLattice.from_brackets(d, 0, {}, name=f"Z^{d}", labels=[f"a{i}" for i in range(1, d + 1)])


def direct_sum_abelian(L: LieLattice, k: int) -> LieLattice:
    """L ⊕ Z^k, with the new central generators placed before the derived block."""
    if k < 0:
        raise InvalidArgs(f"k tiene que ser natural (recibí {k})")
    m = L.m
    shift = lambda idx: idx if idx <= m else idx + k  # noqa: E731
    brackets = {(shift(i), shift(j)): c for (i, j), c in L.brackets().items()}
    labels = None
    if L.labels:
        labels = list(L.labels[:m]) + [f"a{i}" for i in range(1, k + 1)] + list(L.labels[m:])
    return LieLattice.from_brackets(L.d + k, L.d_prime, brackets, name=f"{L.name}+Z^{k}", labels=labels)


def rescaled_heisenberg(p: int) -> LieLattice:
    """Heisenberg lattice with [c1, c2] = p·z."""
    return LieLattice.from_brackets(3, 1, {(1, 2): [p]}, name=f"heisenberg_x{p}", labels=["c1", "c2", "z"])


@dataclass(frozen=True)
class CommutatorMatrix:
    """Matrix of linear forms Σ_k λ_ij^k X_k; `size` is d (full) or d - d' (trimmed)."""

    size: int
    d_prime: int
    forms: Structure
    trimmed: bool

    @cached_property
    def tensor(self) -> np.ndarray:
        return _coefficient_array(self.forms, (self.size, self.size, self.d_prime))

    @property
    def h(self) -> int:
        return self.size // 2

    def entry(self, i: int, j: int) -> Tuple[int, ...]:
        return self.forms[i][j]

    def __str__(self) -> str:
        def form(coeffs):
            parts = []
            for k, c in enumerate(coeffs, start=1):
                if c:
                    term = f"X{k}" if abs(c) == 1 else f"{abs(c)}*X{k}"
                    parts.append(("-" if c < 0 else "+") + term)
            if not parts:
                return "0"
            text = "".join(parts)
            return text[1:] if text.startswith("+") else text
        return "\n".join("[" + ", ".join(form(c) for c in row) + "]" for row in self.forms)


def commutator_matrix(L: LieLattice, trimmed: bool = True) -> CommutatorMatrix:
    size = L.m if trimmed else L.d
    forms = tuple(tuple(L.structure[i][j] for j in range(size)) for i in range(size))
    return CommutatorMatrix(size, L.d_prime, forms, trimmed)


def evaluate_matrix(Cm: CommutatorMatrix, w: Sequence[int]) -> np.ndarray:
    """The integer matrix Σ_k w_k·(coefficient matrix of X_k)."""
    if len(w) != Cm.d_prime:
        raise LengthMismatch(f"El vector tiene longitud {len(w)} y d' = {Cm.d_prime}")
    if Cm.d_prime == 0:
        return np.zeros((Cm.size, Cm.size), dtype=np.int64)
    bound = max((abs(int(x)) for x in w), default=0) * (int(np.abs(Cm.tensor).max()) if Cm.size else 0) * Cm.d_prime
    if bound < 2 ** 62:
        return Cm.tensor @ np.asarray([int(x) for x in w], dtype=np.int64)
    return np.asarray(Cm.tensor, dtype=object) @ np.asarray([int(x) for x in w], dtype=object)


def base_change(L: LieLattice, U) -> LieLattice:
    """Rewrite L in the basis whose vectors are the columns of U.

    U must be unimodular and keep the derived span: its block in the rows
    outside the derived sublattice and the derived columns must vanish.
    """
    U = sympy.Matrix(U)
    if U.shape != (L.d, L.d):
        raise InvalidArgs(f"La matriz de cambio de base tiene que ser {L.d}x{L.d}")
    if any(not x.is_integer for x in U):
        raise NotUnimodular("El cambio de base tiene entradas no enteras")
    det = U.det()
    if det not in (1, -1):
        raise NotUnimodular(f"det(U) = {det}; se necesita ±1")
    m = L.m
    if any(U[i, a] != 0 for i in range(m) for a in range(m, L.d)):
        raise NotAdapted("El cambio de base no preserva el subretículo derivado")
    W_inv = U[m:, m:].inv() if L.d_prime else sympy.zeros(0, 0)
    rows = [[int(x) for x in U.row(i)] for i in range(L.d)]
    winv = [[int(W_inv[l, k]) for k in range(L.d_prime)] for l in range(L.d_prime)]
    lam = L.structure
    out = np.zeros((L.d, L.d, L.d_prime), dtype=object)
    out[...] = 0
    for a in range(m):
        for b in range(m):
            old = [0] * L.d_prime
            for i in range(m):
                if not rows[i][a]:
                    continue
                for j in range(m):
                    if not rows[j][b]:
                        continue
                    coeff = rows[i][a] * rows[j][b]
                    for k in range(L.d_prime):
                        old[k] += coeff * lam[i][j][k]
            for l in range(L.d_prime):
                out[a, b, l] = sum(winv[l][k] * old[k] for k in range(L.d_prime))
    labels = tuple(f"f{i}" for i in range(1, L.d + 1))
    return LieLattice(L.name, L.d, L.d_prime, _freeze(out), labels)


def adapted_unimodular(d: int, d_prime: int, entries: Iterable[Tuple[str, int, int, int]]) -> List[List[int]]:
    """Compose elementary adapted operations into a unimodular d×d matrix.

    Each entry is ``("swap", i, j, 0)``, ``("neg", i, 0, 0)`` or
    ``("add", i, j, c)`` (column i += c·column j), 0-based; operations that
    would leave the adapted shape are rejected.
    """
    m = d - d_prime
    U = sympy.eye(d)
    for op, i, j, c in entries:
        E = sympy.eye(d)
        if op == "swap":
            if (i < m) != (j < m):
                raise NotAdapted(f"No se puede intercambiar e{i + 1} con e{j + 1}")
            E[i, i] = E[j, j] = 0
            E[i, j] = E[j, i] = 1
        elif op == "neg":
            E[i, i] = -1
        elif op == "add":
            if i >= m and j < m:
                raise NotAdapted(f"e{j + 1} no puede sumarse a un generador derivado")
            E[j, i] = c
        else:
            raise InvalidArgs(f"Operación desconocida {op!r}")
        U = U * E
    return [[int(x) for x in U.row(r)] for r in range(d)]
