"""q-analogue combinatorics: Gauss polynomials, Pochhammer symbols, X-multinomials,
matrix rank counts over finite fields and the two q-series lemmas used by the
family formulas.

Pochhammer symbols use k factors: (a; r)_k = Π_{i=0}^{k-1} (1 - a·r^i).
"""

from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from config import Settings, settings as default_settings

from .exactalg import ONE, MultiPoly, RationalFn, ratfn_eq, sum_with_denominator, var
from .exceptions import InvalidArgs, SpecializationPole, TooLarge

logger = logging.getLogger(__name__)

Value = Union[MultiPoly, RationalFn, Fraction, int]


@dataclass(frozen=True)
class OrderedSubset:
    """Strictly increasing subset of [j-1]_0 = {0, ..., j-1}."""

    elements: Tuple[int, ...]
    bound: int

    def __post_init__(self):
        elements = tuple(self.elements)
        object.__setattr__(self, "elements", elements)
        if self.bound < 0:
            raise InvalidArgs(f"Cota negativa para un subconjunto ordenado: {self.bound}")
        if any(b <= a for a, b in zip(elements, elements[1:])):
            raise InvalidArgs(f"{list(elements)} no es estrictamente creciente")
        if elements and (elements[0] < 0 or elements[-1] > self.bound - 1):
            raise InvalidArgs(f"{list(elements)} no está contenido en [{self.bound - 1}]_0")

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def first(self) -> int:
        """i_1, read as the bound when the subset is empty."""
        return self.elements[0] if self.elements else self.bound

    def shifted(self, a: int) -> "OrderedSubset":
        return OrderedSubset(tuple(i + a for i in self.elements), self.bound + a)


def ordered_subsets(j: int) -> Iterator[OrderedSubset]:
    """All subsets of [j-1]_0, by size then lexicographically."""
    for size in range(j + 1):
        for combo in itertools.combinations(range(j), size):
            yield OrderedSubset(combo, j)


def _subset(I: Union[OrderedSubset, Sequence[int]], j: int) -> OrderedSubset:
    if isinstance(I, OrderedSubset):
        if I.bound != j:
            return OrderedSubset(I.elements, j)
        return I
    return OrderedSubset(tuple(I), j)


def _unit_like(value: Value):
    if isinstance(value, MultiPoly):
        return ONE
    if isinstance(value, RationalFn):
        return RationalFn(ONE)
    return Fraction(1)


def q_bracket_factorial(N: int, variable: str = "X") -> MultiPoly:
    """(1 - X)(1 - X^2)...(1 - X^N); 1 for N = 0."""
    if N < 0:
        raise InvalidArgs(f"N tiene que ser natural (recibí {N})")
    result = ONE
    for i in range(1, N + 1):
        result = result * (1 - var(variable, i))
    return result


@lru_cache(maxsize=None)
def _gauss(a: int, b: int, variable: str) -> MultiPoly:
    if b == 0 or b == a:
        return ONE
    # q-Pascal: C(a, b) = C(a-1, b-1) + X^b C(a-1, b)
    return _gauss(a - 1, b - 1, variable) + var(variable, b) * _gauss(a - 1, b, variable)


def gauss_binomial(a: int, b: int, variable: str = "X") -> MultiPoly:
    """The Gauss polynomial (a choose b)_X."""
    if a < 0 or b < 0:
        raise InvalidArgs(f"Argumentos negativos en gauss_binomial({a}, {b})")
    if b > a:
        raise InvalidArgs(f"gauss_binomial necesita b <= a (a={a}, b={b})")
    return _gauss(a, b, variable)


def pochhammer(base: Value, ratio: Value, k: int):
    """(base; ratio)_k = Π_{i=0}^{k-1} (1 - base·ratio^i).

    The result has the type of the inputs: polynomial, rational function or
    exact scalar.
    """
    if k < 0:
        raise InvalidArgs(f"k tiene que ser natural (recibí {k})")
    result = _unit_like(base)
    power = _unit_like(ratio)
    for _ in range(k):
        result = result * (1 - base * power)
        power = power * ratio
    return result


def x_multinomial(j: int, I: Union[OrderedSubset, Sequence[int]], variable: str = "X") -> MultiPoly:
    """(j choose I)_X = (j choose i_l)(i_l choose i_{l-1})...(i_2 choose i_1)."""
    subset = _subset(I, j)
    chain = list(subset.elements) + [j]
    result = ONE
    for lower, upper in zip(chain, chain[1:]):
        result = result * gauss_binomial(upper, lower, variable)
    return result


def gp(W):
    """W / (1 - W)."""
    denominator = 1 - W
    if isinstance(denominator, (int, Fraction)) and denominator == 0:
        raise SpecializationPole(f"gp({W}) tiene un polo")
    return W / denominator


def rank_count(i: int, j: int, r: int, q: Union[MultiPoly, int, None] = None):
    """Number of i×j matrices of rank r over F_q.

    Built from (j choose j-i+k)_{q^{-1}} (q^{-k-1}; q^{-1})_{i-k} q^{(i-k)(j+k)}
    with k = i - r. A prime `q` returns an `int`; otherwise a polynomial in q.
    """
    if min(i, j, r) < 0:
        raise InvalidArgs("rank_count necesita argumentos naturales")
    if i > j:
        raise InvalidArgs(f"rank_count necesita i <= j (i={i}, j={j})")
    if r > i:
        raise InvalidArgs(f"El rango {r} excede la cantidad de filas {i}")
    k = i - r
    q_inv = RationalFn(ONE, var("q"))
    binomial = gauss_binomial(j, j - i + k).substitute(X=q_inv)
    symbol = pochhammer(q_inv ** (k + 1), q_inv, i - k)
    value = (binomial * symbol * var("q", (i - k) * (j + k))).as_poly()
    if isinstance(q, int):
        count = value.evaluate(q=q)
        return int(count)
    if isinstance(q, MultiPoly) and q != var("q"):
        return value.substitute(q=q).as_poly()
    return value


def brute_rank_count(i: int, j: int, r: int, p: int, config: Optional[Settings] = None) -> int:
    """Exhaustive count of i×j matrices over F_p with rank r."""
    from .snf import rank_mod_p

    cfg = config or default_settings
    cfg.guard("rank_brute", p ** (i * j), f"matrices {i}x{j} sobre F_{p}")
    count = 0
    for entries in itertools.product(range(p), repeat=i * j):
        matrix = np.array(entries, dtype=np.int64).reshape(i, j) if i * j else np.zeros((i, j), dtype=np.int64)
        if rank_mod_p(matrix, p) == r:
            count += 1
    return count


def verify_translation_lemma(a: int, j: int, I: Union[OrderedSubset, Sequence[int]]) -> bool:
    """(j+a choose I+a)_X = (j choose I)_X (X^{i_1+1+a}; X)_{j-i_1} / (X^{i_1+1}; X)_{j-i_1}."""
    if a < 0:
        raise InvalidArgs(f"a tiene que ser natural (recibí {a})")
    subset = _subset(I, j)
    X = var("X")
    i1 = subset.first
    lhs = x_multinomial(j + a, subset.shifted(a))
    numerator = x_multinomial(j, subset) * pochhammer(var("X", i1 + 1 + a), X, j - i1)
    denominator = pochhammer(var("X", i1 + 1), X, j - i1)
    holds = lhs * denominator == numerator
    logger.debug(f"Lema de traslación a={a} j={j} I={list(subset)}: {holds}")
    return holds


def _at_inverse_x(poly: MultiPoly, X_inv):
    if isinstance(X_inv, RationalFn):
        return poly.substitute(X=X_inv)
    return poly.evaluate(X=X_inv)


def sv_sides(j: int, X, Y, Z) -> Tuple[List, object]:
    """Summands of the left side, indexed like `ordered_subsets(j)`, and the right side.

    X, Y, Z are either `RationalFn` indeterminates or exact scalars.
    """
    if isinstance(X, (int, Fraction)) and X == 0:
        raise SpecializationPole("X = 0 anula X^{-1}")
    X_inv = 1 / X
    terms = []
    for subset in ordered_subsets(j):
        i1 = subset.first
        term = _at_inverse_x(x_multinomial(j, subset), X_inv)
        term = term * pochhammer(Y * X_inv ** (i1 + 1), X_inv, j - i1)
        for i in subset:
            term = term * gp((X ** i * Z) ** (j - i))
        terms.append(term)
    denominator = pochhammer(Z, X, j)
    if isinstance(denominator, (int, Fraction)) and denominator == 0:
        raise SpecializationPole("(Z; X)_j se anula")
    rhs = pochhammer(X ** (-j) * Y * Z, X, j) / denominator
    return terms, rhs


def verify_sv_identity(
    j: int,
    mode: str = "symbolic",
    values: Optional[Tuple[Fraction, Fraction, Fraction]] = None,
    config: Optional[Settings] = None,
) -> bool:
    """Check Σ_I (j choose I)_{X^{-1}} (Y X^{-i_1-1}; X^{-1})_{j-i_1} Π_{i∈I} gp((X^i Z)^{j-i})
    = (X^{-j} Y Z; X)_j / (Z; X)_j.

    `mode` is ``symbolic`` or ``specialized`` (with `values` = (X, Y, Z)).
    """
    if j < 1:
        raise InvalidArgs(f"j tiene que ser al menos 1 (recibí {j})")
    cfg = config or default_settings
    if mode == "symbolic":
        if j > cfg.sv_symbolic_bound and not cfg.unsafe_limits:
            raise TooLarge(
                f"La verificación simbólica está limitada a j <= {cfg.sv_symbolic_bound} "
                "(REPZETA_SV_SYMBOLIC_BOUND o --unsafe-limits)"
            )
        X, Y, Z = (RationalFn(var(name)) for name in ("X", "Y", "Z"))
        terms, rhs = sv_sides(j, X, Y, Z)
        x_power = max(term.den.monomial_content()[2] for term in terms)
        common = var("X", x_power)
        for i in range(j):
            common = common * (1 - var("X", i * (j - i)) * var("Z", j - i))
        lhs = sum_with_denominator(terms, common)
        return ratfn_eq(lhs, rhs)
    if mode == "specialized":
        if values is None or len(values) != 3:
            raise InvalidArgs("El modo specialized necesita valores (X, Y, Z)")
        X, Y, Z = (Fraction(v) for v in values)
        try:
            terms, rhs = sv_sides(j, X, Y, Z)
        except ZeroDivisionError as exc:
            raise SpecializationPole(f"(X, Y, Z) = {tuple(map(str, (X, Y, Z)))} es un polo") from exc
        return sum(terms, Fraction(0)) == rhs
    raise InvalidArgs(f"Modo desconocido {mode!r} (usar symbolic o specialized)")


def random_rational(rng: random.Random, span: int = 9) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.randint(1, span))


def sv_random_trials(j: int, trials: int, seed: int) -> Tuple[bool, List[Tuple[Fraction, Fraction, Fraction]]]:
    """Run `trials` pole-free random specializations; returns (all held, triples used)."""
    if trials < 1:
        raise InvalidArgs("trials tiene que ser positivo")
    rng = random.Random(seed)
    used: List[Tuple[Fraction, Fraction, Fraction]] = []
    ok = True
    while len(used) < trials:
        triple = (random_rational(rng), random_rational(rng), random_rational(rng))
        try:
            holds = verify_sv_identity(j, "specialized", triple)
        except SpecializationPole:
            logger.debug(f"Descarto el polo {tuple(map(str, triple))}")
            continue
        used.append(triple)
        if not holds:
            logger.warning(f"La identidad falla en (X, Y, Z) = {tuple(map(str, triple))}")
            ok = False
    return ok, used
