"""Poincaré series of commutator matrices.

Brute-force enumeration over primitive vectors, the classification of
F_p^{d'} by kernel dimensions, the chain counts |F_S| and the kernel-class
formula built from them, the geometric-smoothness probe and the α invariant.
All enumerations use the trimmed commutator matrix with h = floor((d - d')/2);
kernel dimensions are reported for the full matrix (d_c = dim ker S̄ + d').
"""

from __future__ import annotations

import itertools
import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from config import Settings, settings as default_settings

from .enums import ProbeStatus
from .exactalg import ONE, DirichletTrunc, MultiPoly, RationalFn, sum_with_denominator
from .exceptions import InvalidArgs, NoAdmissibleOmega, NotASequence
from .lattice import CommutatorMatrix, LieLattice, commutator_matrix, evaluate_matrix
from .lattice_registry import lattice_registry
from .snf import (
    CanonicalB,
    NuVector,
    integer_kernel_basis,
    kernel_mod_p,
    nu_vector,
    rank_mod_p,
    smith_normal_form,
    snf_equals_B,
    solve_mod_p,
    span_basis_mod_p,
)

logger = logging.getLogger(__name__)

Point = Tuple[int, ...]
ClassKey = Tuple[int, int]


# ----------------------------------------------------------------------
# Patrones (I, r)
# ----------------------------------------------------------------------
@dataclass(frozen=True, order=True)
class PatternKey:
    """Ordered subset I of [h-1]_0 with positive multiplicities r, |r| = |I|."""

    I: Tuple[int, ...]
    r: Tuple[int, ...]
    h: int

    def __post_init__(self):
        if len(self.I) != len(self.r):
            raise InvalidArgs(f"I={self.I} y r={self.r} tienen longitudes distintas")
        if any(b <= a for a, b in zip(self.I, self.I[1:])):
            raise InvalidArgs(f"I={self.I} no es estrictamente creciente")
        if self.I and (self.I[0] < 0 or self.I[-1] > self.h - 1):
            raise InvalidArgs(f"I={self.I} no está contenido en [{self.h - 1}]_0")
        if any(x < 1 for x in self.r):
            raise InvalidArgs(f"r={self.r} tiene entradas no positivas")

    @property
    def N(self) -> int:
        return sum(self.r)

    @property
    def mu(self) -> Tuple[int, ...]:
        """(μ_0, ..., μ_l) with μ_j = i_{j+1} - i_j, i_0 = 0 and i_{l+1} = h."""
        bounds = (0,) + self.I + (self.h,)
        return tuple(b - a for a, b in zip(bounds, bounds[1:]))

    @property
    def weight(self) -> int:
        return sum(r * (self.h - i) for i, r in zip(self.I, self.r))

    def target(self) -> NuVector:
        """(0^{μ_l}, r_l^{μ_{l-1}}, (r_l + r_{l-1})^{μ_{l-2}}, ..., N^{μ_0}) at level N."""
        mu = self.mu
        ell = len(self.I)
        entries: List[int] = []
        partial = 0
        for step in range(ell + 1):
            if step:
                partial += self.r[ell - step]
            entries.extend([partial] * mu[ell - step])
        return NuVector(tuple(entries), self.N)

    @classmethod
    def from_nu(cls, nu: NuVector, h: int) -> Optional["PatternKey"]:
        """The unique pattern at level `nu.level` whose target is `nu`, or None when ν_1 > 0."""
        if not nu.entries or nu.entries[0] != 0 or nu.level < 1:
            return None
        blocks = [(value, len(list(group))) for value, group in itertools.groupby(nu.entries)]
        if blocks[-1][0] != nu.level:
            blocks.append((nu.level, 0))
        ell = len(blocks) - 1
        counts = [c for _, c in blocks]
        # μ_{l-t} is the size of block t
        mu = [counts[ell - j] for j in range(ell + 1)]
        I = []
        i = mu[0]
        for j in range(1, ell + 1):
            I.append(i)
            i += mu[j]
        values = [v for v, _ in blocks]
        r = [0] * ell
        for t in range(1, ell + 1):
            r[ell - t] = values[t] - values[t - 1]
        return cls(tuple(I), tuple(r), h)

    def __str__(self) -> str:
        return f"I={list(self.I)} r={list(self.r)}"


def enumerate_patterns(h: int, K: int) -> List[PatternKey]:
    """All nonempty patterns for h with weight <= K, ordered by weight."""
    out: List[PatternKey] = []

    def extend(I: Tuple[int, ...], r: Tuple[int, ...], budget: int, start: int) -> None:
        for i in range(start, h):
            cost = h - i
            for ri in range(1, budget // cost + 1):
                key = PatternKey(I + (i,), r + (ri,), h)
                out.append(key)
                extend(key.I, key.r, budget - ri * cost, i + 1)

    extend((), (), K, 0)
    return sorted(out, key=lambda key: (key.weight, key.I, key.r))


# ----------------------------------------------------------------------
# Fuerza bruta
# ----------------------------------------------------------------------
def _level_points(P: int, d_prime: int, first: Iterable[int]) -> Iterator[Point]:
    for head in first:
        for tail in itertools.product(range(P), repeat=d_prime - 1):
            yield (head,) + tail


def _count_level_chunk(Cm: CommutatorMatrix, p: int, N: int, K: int, lo: int, hi: int) -> Dict[PatternKey, int]:
    counts: Counter = Counter()
    h = Cm.size // 2
    for w in _level_points(p ** N, Cm.d_prime, range(lo, hi)):
        if not any(x % p for x in w):
            continue
        key = PatternKey.from_nu(nu_vector(Cm, w, N, p), h)
        if key is not None and key.weight <= K:
            counts[key] += 1
    return dict(counts)


def pattern_counts(
    L: LieLattice, p: int, K: int, config: Optional[Settings] = None, workers: Optional[int] = None
) -> Dict[PatternKey, int]:
    """|N^I_{r}| for every pattern of weight <= K, by enumerating W_N for N = 1..K."""
    cfg = config or default_settings
    Cm = commutator_matrix(L, trimmed=True)
    h = Cm.size // 2
    if K < 0:
        raise InvalidArgs(f"K tiene que ser natural (recibí {K})")
    if h == 0 or L.d_prime == 0 or K == 0:
        return {}
    cfg.guard("enumeration", p ** (K * L.d_prime), f"W_{K} de {L.name} con p={p}")
    workers = workers or cfg.workers
    totals: Counter = Counter()
    for N in range(1, K + 1):
        P = p ** N
        if workers > 1 and P > 1:
            step = max(1, P // (workers * 4))
            bounds = [(lo, min(P, lo + step)) for lo in range(0, P, step)]
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures = [pool.submit(_count_level_chunk, Cm, p, N, K, lo, hi) for lo, hi in bounds]
                for future in futures:
                    totals.update(future.result())
        else:
            totals.update(_count_level_chunk(Cm, p, N, K, 0, P))
        logger.debug(f"{L.name}: nivel {N} enumerado (p={p})")
    return dict(totals)


def brute_poincare(
    L: LieLattice, p: int, K: int, config: Optional[Settings] = None, workers: Optional[int] = None
) -> DirichletTrunc:
    """Poincaré series up to t^K by direct enumeration, with q = p."""
    coeffs = [Fraction(0)] * (K + 1)
    coeffs[0] = Fraction(1)
    for key, count in pattern_counts(L, p, K, config, workers).items():
        coeffs[key.weight] += count
    logger.info(f"Serie de Poincaré de {L.name} en p={p} hasta t^{K} calculada")
    return DirichletTrunc(K, tuple(coeffs), p)


# ----------------------------------------------------------------------
# Clases de núcleo
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class KernelClass:
    """Points x̄ of F_p^{d'} with dim ker R̄(x̄) = d_c and dim (ker R̄(x̄))' = d'_c."""

    d_c: int
    d_prime_c: int
    members: int
    representatives: Tuple[Point, ...] = ()

    @property
    def key(self) -> ClassKey:
        return (self.d_c, self.d_prime_c)

    def as_dict(self) -> dict:
        return {
            "d_c": self.d_c,
            "d_prime_c": self.d_prime_c,
            "members": self.members,
            "representatives": [list(x) for x in self.representatives],
        }


@dataclass
class Classification:
    lattice: str
    p: int
    d: int
    d_prime: int
    classes: List[KernelClass]
    point_class: Dict[Point, ClassKey] = field(repr=False)
    derived_kernel: Dict[Point, Tuple[Point, ...]] = field(repr=False)

    def by_key(self, key: ClassKey) -> KernelClass:
        for c in self.classes:
            if c.key == key:
                return c
        raise InvalidArgs(f"No hay una clase con (d_c, d'_c) = {key}")


def _kernel_data(L: LieLattice, Cm: CommutatorMatrix, x: Point, p: int) -> Tuple[int, Tuple[Point, ...]]:
    """dim ker S̄(x̄) and a basis of the span of brackets of kernel vectors."""
    kernel = kernel_mod_p(evaluate_matrix(Cm, x), p)
    if len(kernel) < 2 or L.d_prime == 0:
        return len(kernel), ()
    K = np.array(kernel, dtype=np.int64)
    block = np.asarray(L.tensor[: Cm.size, : Cm.size, :] % p, dtype=np.int64)
    brackets = np.einsum("ai,ijk,bj->abk", K, block, K) % p
    basis = span_basis_mod_p(brackets.reshape(-1, L.d_prime), p, L.d_prime)
    return len(kernel), tuple(basis)


def classification(L: LieLattice, p: int, config: Optional[Settings] = None) -> Classification:
    """Classification of F_p^{d'} by (d_c, d'_c), memoised in the lattice registry."""
    cached = lattice_registry.get_classification(L.digest, p)
    if cached is not None:
        return cached
    cfg = config or default_settings
    cfg.guard("classification", p ** L.d_prime, f"F_{p}^{L.d_prime} de {L.name}")
    Cm = commutator_matrix(L, trimmed=True)
    point_class: Dict[Point, ClassKey] = {}
    derived_kernel: Dict[Point, Tuple[Point, ...]] = {}
    members: Counter = Counter()
    reps: Dict[ClassKey, List[Point]] = {}
    for x in itertools.product(range(p), repeat=L.d_prime):
        kernel_dim, derived = _kernel_data(L, Cm, x, p)
        key = (kernel_dim + L.d_prime, len(derived))
        point_class[x] = key
        derived_kernel[x] = derived
        members[key] += 1
        bucket = reps.setdefault(key, [])
        if len(bucket) < 5:
            bucket.append(x)
    classes = [
        KernelClass(d_c, dpc, members[(d_c, dpc)], tuple(reps[(d_c, dpc)]))
        for d_c, dpc in sorted(members, key=lambda k: (-k[0], -k[1]))
    ]
    result = Classification(L.name, p, L.d, L.d_prime, classes, point_class, derived_kernel)
    lattice_registry.store_classification(L.digest, p, result)
    logger.info(f"{L.name}: {len(classes)} clases de núcleo en p={p}")
    return result


def classify_kernels(L: LieLattice, p: int, config: Optional[Settings] = None) -> List[KernelClass]:
    return list(classification(L, p, config).classes)


def _span_points(basis: Tuple[Point, ...], p: int, width: int) -> Iterator[Point]:
    if not basis:
        yield (0,) * width
        return
    B = np.array(basis, dtype=np.int64)
    for coeffs in itertools.product(range(p), repeat=len(basis)):
        yield tuple(int(v) for v in (np.asarray(coeffs, dtype=np.int64) @ B) % p)


def _jump_count(L: LieLattice, p: int, data: Classification, z: Point, jump: int) -> int:
    """Increments u ∈ (ker R̄(z))' whose own form R̄(u) has rank `jump`."""
    total = 0
    for u in _span_points(data.derived_kernel[z], p, L.d_prime):
        if L.d - data.point_class[u][0] == jump:
            total += 1
    return total


def enumerate_F_S(
    L: LieLattice, p: int, S: Sequence[KernelClass], config: Optional[Settings] = None
) -> Union[int, Fraction]:
    """|F_S| counted by rank jumps.

    S is ordered by strictly decreasing d_c, so the chain starts in the class
    with the largest kernel. Each later class c_{j+1} contributes the number of
    u ∈ (ker R̄(z))', z ∈ c_j, with rank R̄(u) = d_{c_j} - d_{c_{j+1}},
    averaged over the members of c_j. The average is an integer whenever the
    count does not depend on z.
    """
    if not S:
        return 1
    keys = [c.key if isinstance(c, KernelClass) else tuple(c) for c in S]
    if any(b[0] >= a[0] for a, b in zip(keys, keys[1:])):
        raise NotASequence(f"Las clases {keys} no son estrictamente decrecientes en d_c")
    data = classification(L, p, config)
    points: Dict[ClassKey, List[Point]] = {}
    for x, key in data.point_class.items():
        points.setdefault(key, []).append(x)

    count = Fraction(len(points.get(keys[0], [])))
    for here, there in zip(keys, keys[1:]):
        members = points.get(here, [])
        if not members or not count:
            return 0
        jump = here[0] - there[0]
        counts = Counter(_jump_count(L, p, data, z, jump) for z in members)
        if len(counts) > 1:
            logger.warning(
                f"{L.name}: la cuenta de saltos {here} -> {there} depende del punto en p={p}: {dict(counts)}"
            )
        count *= Fraction(sum(k * v for k, v in counts.items()), len(members))
    return int(count) if count.denominator == 1 else count


# ----------------------------------------------------------------------
# Fórmula por clases de núcleo
# ----------------------------------------------------------------------
@dataclass
class TechResult:
    """Rational function in t (q = p) with the smoothness verdict it was computed under."""

    lattice: str
    p: int
    value: RationalFn
    probe: ProbeStatus
    sequences: List[dict] = field(default_factory=list)


def thm_tech_eval(
    L: LieLattice, p: int, probe: bool = True, config: Optional[Settings] = None
) -> TechResult:
    """Σ_S |F_S| p^{-(d'-d'_{c_l})} Π_{c∈S} x_c / (1 - x_c), x_c = p^{d'-d'_c} t^{(d-d_c)/2}.

    S runs over sets of nonzero-rank classes with distinct d_c, ordered by
    decreasing d_c; c_l is the class with the smallest kernel.
    """
    data = classification(L, p, config)
    nonzero = [c for c in data.classes if c.d_c < L.d]

    def x_of(c: KernelClass) -> MultiPoly:
        return MultiPoly.monomial(p ** (L.d_prime - c.d_prime_c), t=(L.d - c.d_c) // 2)

    common = ONE
    for c in nonzero:
        common = common * (1 - x_of(c))
    terms = [RationalFn(ONE)]
    sequences = [{"classes": [], "count": 1}]
    for size in range(1, len(nonzero) + 1):
        for combo in itertools.combinations(nonzero, size):
            if len({c.d_c for c in combo}) != size:
                continue
            chain = sorted(combo, key=lambda c: -c.d_c)
            count = enumerate_F_S(L, p, chain, config)
            shown = count if isinstance(count, int) else str(count)
            sequences.append({"classes": [list(c.key) for c in chain], "count": shown})
            if not count:
                continue
            num = MultiPoly.const(Fraction(count, p ** (L.d_prime - chain[-1].d_prime_c)))
            den = ONE
            for c in chain:
                num = num * x_of(c)
                den = den * (1 - x_of(c))
            terms.append(RationalFn(num, den))
    value = sum_with_denominator(terms, common)
    status = smoothness_probe(L, p, config).status if probe else ProbeStatus.NOT_RUN
    if status in (ProbeStatus.FAIL, ProbeStatus.INCONCLUSIVE):
        logger.warning(f"{L.name}: la fórmula por clases se evaluó con sondeo de suavidad {status.value}")
    return TechResult(L.name, p, value, status, sequences)


# ----------------------------------------------------------------------
# Suavidad geométrica
# ----------------------------------------------------------------------
@dataclass
class ProbeReport:
    lattice: str
    p: int
    status: ProbeStatus
    points: int = 0
    inconclusive: List[Point] = field(default_factory=list)
    witness: Optional[dict] = None

    def as_dict(self) -> dict:
        return {
            "lattice": self.lattice,
            "p": self.p,
            "status": self.status.value,
            "points": self.points,
            "inconclusive_points": [list(x) for x in self.inconclusive],
            "witness": self.witness,
        }


def _kernel_lift(L: LieLattice, Cm: CommutatorMatrix, x: Point, p: int) -> Optional[Tuple[int, ...]]:
    """An integer x ≡ x̄ (mod p) with S(x)·K = 0 for a lifted F_p-kernel basis K of S̄(x̄)."""
    kernel = kernel_mod_p(evaluate_matrix(Cm, x), p)
    if not kernel:
        return None
    K = np.array(kernel, dtype=object)
    block = np.asarray(L.tensor[: Cm.size, : Cm.size, :], dtype=object)
    # rows indexed by (row of S, kernel vector), columns by the coordinates of x
    system = np.tensordot(block, K, axes=([1], [1])).transpose(0, 2, 1).reshape(-1, L.d_prime)
    basis = integer_kernel_basis(system)
    if not basis:
        return None
    B = np.array(basis, dtype=object).T
    coeffs = solve_mod_p(B, x, p)
    if coeffs is None:
        return None
    lift = B @ np.array(coeffs, dtype=object)
    return tuple(int(v) for v in lift)


def _isolation_violation(L: LieLattice, Cm: CommutatorMatrix, lift: Tuple[int, ...], p: int) -> Optional[List]:
    kernel = integer_kernel_basis(evaluate_matrix(Cm, lift))
    if len(kernel) < 2:
        return None
    K = np.array(kernel, dtype=object)
    block = np.asarray(L.tensor[: Cm.size, : Cm.size, :], dtype=object)
    rows = []
    for a in range(len(kernel)):
        for b in range(a + 1, len(kernel)):
            rows.append([sum(K[a, i] * block[i, j, k] * K[b, j] for i in range(Cm.size) for j in range(Cm.size))
                         for k in range(L.d_prime)])
    snf = smith_normal_form(rows)
    bad = [v for v in snf.nonzero if v % p == 0]
    return list(snf.nonzero) if bad else None


def smoothness_probe(L: LieLattice, p: int, config: Optional[Settings] = None) -> ProbeReport:
    """Finite check of geometric smoothness of the rank loci at p.

    (1) every x̄ needs a lift x with S(x) in B-form; the canonical lift is
    tried first, then a lift through a lifted kernel basis. (2) for lifts of
    nonzero x̄, the derived sublattice of ker S(x) must be isolated.
    """
    cfg = config or default_settings
    cfg.guard("classification", p ** L.d_prime, f"F_{p}^{L.d_prime} de {L.name}")
    Cm = commutator_matrix(L, trimmed=True)
    report = ProbeReport(L.name, p, ProbeStatus.PASS)
    for x in itertools.product(range(p), repeat=L.d_prime):
        report.points += 1
        k = rank_mod_p(evaluate_matrix(Cm, x), p)
        B = CanonicalB(Cm.size, Cm.size, k)
        lift: Optional[Tuple[int, ...]] = x
        if not snf_equals_B(evaluate_matrix(Cm, x), B, p):
            lift = _kernel_lift(L, Cm, x, p)
            if lift is None or not snf_equals_B(evaluate_matrix(Cm, lift), B, p):
                report.inconclusive.append(x)
                continue
        if not any(x):
            continue
        divisors = _isolation_violation(L, Cm, lift, p)
        if divisors is not None:
            report.status = ProbeStatus.FAIL
            report.witness = {"point": list(x), "lift": list(lift), "elementary_divisors": divisors}
            logger.warning(f"{L.name}: suavidad falla en x̄={list(x)} (p={p})")
            return report
    if report.inconclusive:
        report.status = ProbeStatus.INCONCLUSIVE
        logger.warning(f"{L.name}: condición de levantamiento sin certificar en {len(report.inconclusive)} puntos")
    else:
        logger.info(f"{L.name}: sondeo de suavidad PASS en p={p}")
    return report


# ----------------------------------------------------------------------
# α
# ----------------------------------------------------------------------
@dataclass
class AlphaReport:
    lattice: str
    p: int
    alpha: Fraction
    witness: Point
    table: List[dict]

    def as_dict(self) -> dict:
        return {
            "lattice": self.lattice,
            "p": self.p,
            "alpha": str(self.alpha),
            "witness": list(self.witness),
            "strata": self.table,
        }


def alpha(L: LieLattice, p: int, config: Optional[Settings] = None) -> AlphaReport:
    """max over nondegenerate ω of the root 2(d' - dim rad') / (d - dim rad)."""
    data = classification(L, p, config)
    best: Optional[Fraction] = None
    witness: Optional[Point] = None
    strata: Dict[ClassKey, dict] = {}
    for x, (d_c, dpc) in data.point_class.items():
        if not any(x) or d_c == L.d:
            continue
        root = Fraction(2 * (L.d_prime - dpc), L.d - d_c)
        row = strata.setdefault(
            (d_c, dpc), {"dim_rad": d_c, "dim_rad_derived": dpc, "root": str(root), "count": 0}
        )
        row["count"] += 1
        if best is None or root > best:
            best, witness = root, x
    if best is None:
        raise NoAdmissibleOmega(f"{L.name}: todas las formas ω son degeneradas")
    table = [strata[key] for key in sorted(strata, key=lambda k: (-k[0], -k[1]))]
    logger.info(f"{L.name}: α = {best} en p={p}")
    return AlphaReport(L.name, p, best, witness, table)

