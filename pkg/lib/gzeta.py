"""Closed-form zeta functions of the family G_{m×n}.

Local factors in additive, multiplicative and product shape, Euler products
over finite sets of places, Dirichlet coefficients, topological zeta functions,
abscissae of convergence and k-fold central products. Throughout t = q^{-s}.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import mpmath
import sympy

from config import Settings, settings as default_settings

from .exactalg import ONE, DirichletTrunc, MultiPoly, RationalFn, series_of_ratfn, sum_with_denominator, var
from .exceptions import DivergentRegion, EntireFunction, InvalidArgs, UnbalancedDegrees
from .qcomb import OrderedSubset, ordered_subsets, pochhammer, x_multinomial

logger = logging.getLogger(__name__)

Factor = Tuple[int, int, int]


def _check_mn(m: int, n: int) -> Tuple[int, int]:
    if m < 1 or n < 1:
        raise InvalidArgs(f"m y n tienen que ser al menos 1 (m={m}, n={n})")
    return (m, n) if m <= n else (n, m)


def _specialize(f: RationalFn, q: Optional[int]) -> RationalFn:
    return f if q is None else f.substitute(q=q)


def _qt_text(a: int, b: int) -> str:
    pieces = [name if e == 1 else f"{name}^{e}" for name, e in (("q", a), ("t", b)) if e]
    return "*".join(pieces) or "1"


# ----------------------------------------------------------------------
# Factorizaciones ciclotómicas
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class CycloFactorization:
    """q^α t^β · Π (1 - q^a t^b)^e with distinct (a, b), b >= 1 and e != 0."""

    factors: Tuple[Factor, ...]
    prefactor: Tuple[int, int] = (0, 0)

    def __post_init__(self):
        merged: Dict[Tuple[int, int], int] = {}
        for a, b, e in self.factors:
            if b < 1:
                raise InvalidArgs(f"Factor (1 - q^{a} t^{b}) con b < 1")
            merged[(a, b)] = merged.get((a, b), 0) + e
        canonical = tuple(sorted((a, b, e) for (a, b), e in merged.items() if e))
        object.__setattr__(self, "factors", canonical)

    @property
    def numerator(self) -> Tuple[Factor, ...]:
        return tuple(f for f in self.factors if f[2] > 0)

    @property
    def denominator(self) -> Tuple[Factor, ...]:
        return tuple(f for f in self.factors if f[2] < 0)

    def to_ratfn(self) -> RationalFn:
        num, den = ONE, ONE
        for a, b, e in self.factors:
            if a >= 0:
                base_num, base_den = 1 - MultiPoly.monomial(1, q=a, t=b), ONE
            else:
                # 1 - q^a t^b = (q^{-a} - t^b) / q^{-a}
                base_num, base_den = var("q", -a) - var("t", b), var("q", -a)
            if e > 0:
                num, den = num * base_num ** e, den * base_den ** e
            else:
                num, den = num * base_den ** (-e), den * base_num ** (-e)
        alpha, beta = self.prefactor
        num = num * MultiPoly.monomial(1, q=max(alpha, 0), t=beta)
        den = den * var("q", max(-alpha, 0))
        return RationalFn(num, den)

    def __str__(self) -> str:
        pieces = []
        alpha, beta = self.prefactor
        if alpha or beta:
            pieces.append(_qt_text(alpha, beta))
        for a, b, e in self.factors:
            pieces.append(f"(1 - {_qt_text(a, b)})" + ("" if e == 1 else f"^{e}"))
        return " * ".join(pieces) if pieces else "1"

    def as_dict(self) -> dict:
        return {"factors": [list(f) for f in self.factors], "prefactor": list(self.prefactor)}


@dataclass(frozen=True)
class SplittingData:
    """Residue-field cardinalities q_P of the places in a truncated Euler product."""

    cardinalities: Tuple[int, ...]

    def __post_init__(self):
        for q in self.cardinalities:
            if q < 2 or len(sympy.factorint(q)) != 1:
                raise InvalidArgs(f"{q} no es una potencia de primo")

    @classmethod
    def rationals(cls, limit: int) -> "SplittingData":
        """Primes below `limit`: the places of Q."""
        return cls(tuple(int(p) for p in sympy.primerange(2, limit)))

    def __len__(self) -> int:
        return len(self.cardinalities)


# ----------------------------------------------------------------------
# Factores locales
# ----------------------------------------------------------------------
def f_I(m: int, n: int, I: Union[OrderedSubset, Sequence[int]]) -> MultiPoly:
    """(n choose I + n - m)_X · (X^{i_1+1}; X)_{m-i_1}; 1 for I = ∅."""
    if m < 1 or m > n:
        raise InvalidArgs(f"f_I necesita 1 <= m <= n (m={m}, n={n})")
    subset = I if isinstance(I, OrderedSubset) else OrderedSubset(tuple(I), m)
    if subset.bound != m:
        subset = OrderedSubset(subset.elements, m)
    if not subset.elements:
        return ONE
    i1 = subset.first
    return x_multinomial(n, subset.shifted(n - m)) * pochhammer(var("X", i1 + 1), var("X"), m - i1)


def _geometric_base(m: int, n: int, i: int) -> MultiPoly:
    return MultiPoly.monomial(1, q=(m - i) * (n + i), t=m - i)


def local_additive(m: int, n: int, q: Optional[int] = None) -> RationalFn:
    """Σ_{I ⊆ [m-1]_0} f^I(q^{-1}) Π_{i∈I} x_i / (1 - x_i), x_i = q^{(m-i)(n+i)} t^{m-i}."""
    m, n = _check_mn(m, n)
    q_inv = RationalFn(ONE, var("q"))
    terms = []
    q_power = 0
    for subset in ordered_subsets(m):
        value = f_I(m, n, subset).substitute(X=q_inv)
        num, den = value.num, value.den
        for i in subset:
            x = _geometric_base(m, n, i)
            num, den = num * x, den * (1 - x)
        term = RationalFn(num, den)
        q_power = max(q_power, term.den.monomial_content()[0])
        terms.append(term)
    common = var("q", q_power)
    for i in range(m):
        common = common * (1 - _geometric_base(m, n, i))
    return _specialize(sum_with_denominator(terms, common), q)


def local_multiplicative(m: int, n: int, q: Optional[int] = None) -> RationalFn:
    """(t; q)_m / (q^n t; q)_m."""
    m, n = _check_mn(m, n)
    t = var("t")
    num = pochhammer(t, var("q"), m)
    den = pochhammer(var("q", n) * t, var("q"), m)
    return _specialize(RationalFn(num, den), q)


def local_product_form(m: int, n: int) -> CycloFactorization:
    """Π_{i<m} (1 - q^i t) / (1 - q^{n+i} t), with shared factors cancelled."""
    if m < 1 or n < 1:
        raise InvalidArgs(f"m y n tienen que ser al menos 1 (m={m}, n={n})")
    factors = [(i, 1, 1) for i in range(m)] + [(n + i, 1, -1) for i in range(m)]
    return CycloFactorization(tuple(factors))


def local_series(m: int, n: int, K: int, p: Optional[int] = None) -> DirichletTrunc:
    """Coefficients ã_{p^k}, k <= K, of the local factor."""
    return series_of_ratfn(local_multiplicative(m, n), K, p)


def functional_equation_holds(m: int, n: int) -> bool:
    """Z(q^{-1}, t^{-1}) = q^{mn} Z(q, t) for the local factor."""
    m, n = _check_mn(m, n)
    Z = local_multiplicative(m, n)
    return Z.invert_variables(["q", "t"]) == Z * var("q", m * n)


# ----------------------------------------------------------------------
# Producto de Euler
# ----------------------------------------------------------------------
@dataclass
class EulerResult:
    m: int
    n: int
    s: Fraction
    places: int
    approx: mpmath.mpf
    exact_parts: Optional[Tuple[int, int]] = None
    error_bound: mpmath.mpf = field(default_factory=lambda: mpmath.mpf(0))

    @property
    def exact(self) -> Optional[Fraction]:
        """The partial product as a reduced fraction (the gcd is only taken here)."""
        if self.exact_parts is None:
            return None
        return Fraction(*self.exact_parts)

    def exact_is_small(self, bits: int = 4096) -> bool:
        return self.exact_parts is not None and max(x.bit_length() for x in self.exact_parts) <= bits

    def as_dict(self, digits: int = 20) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "s": str(self.s),
            "places": self.places,
            "value": mpmath.nstr(self.approx, digits),
            "exact": str(self.exact) if self.exact_is_small() else None,
            "error_bound": mpmath.nstr(self.error_bound, 3),
        }


def _product_tree(values: List[int]) -> int:
    if not values:
        return 1
    while len(values) > 1:
        paired = [values[i] * values[i + 1] for i in range(0, len(values) - 1, 2)]
        if len(values) % 2:
            paired.append(values[-1])
        values = paired
    return values[0]


def global_euler(
    m: int,
    n: int,
    s: Union[int, Fraction, str],
    places: Optional[SplittingData] = None,
    limit: int = 1000,
    config: Optional[Settings] = None,
) -> EulerResult:
    """Π over places of the local factor at q = q_P, t = q_P^{-s}.

    Integer s gives an exact rational; otherwise the product is taken with
    mpmath at `euler_digits` decimal digits.
    """
    m, n = _check_mn(m, n)
    s = Fraction(s)
    if s <= m + n:
        raise DivergentRegion(f"s = {s} no está a la derecha de la abscisa {m + n}")
    cfg = config or default_settings
    places = places if places is not None else SplittingData.rationals(limit)
    cards = places.cardinalities
    if s.denominator == 1:
        e = s.numerator
        nums, dens = [], []
        for Q in cards:
            Qs = Q ** e
            for i in range(m):
                nums.append(Qs - Q ** i)
                dens.append(Qs - Q ** (n + i))
        numerator, denominator = _product_tree(nums), _product_tree(dens)
        with mpmath.workdps(cfg.euler_digits):
            approx = mpmath.mpf(numerator) / mpmath.mpf(denominator)
            bound = mpmath.mpf(10) ** (-cfg.euler_digits + 1) * abs(approx)
        logger.info(f"Producto de Euler exacto sobre {len(cards)} lugares en s={s}")
        return EulerResult(m, n, s, len(cards), approx, (numerator, denominator), bound)
    with mpmath.workdps(cfg.euler_digits):
        s_mp = mpmath.mpf(s.numerator) / s.denominator
        approx = mpmath.mpf(1)
        for Q in cards:
            t = mpmath.power(Q, -s_mp)
            for i in range(m):
                approx *= (1 - mpmath.power(Q, i) * t) / (1 - mpmath.power(Q, n + i) * t)
        # 2m roundings per place, each of relative size 10^{-dps}
        bound = abs(approx) * 2 * m * max(len(cards), 1) * mpmath.mpf(10) ** (-cfg.euler_digits + 1)
    logger.info(f"Producto de Euler numérico sobre {len(cards)} lugares en s={s}")
    return EulerResult(m, n, s, len(cards), approx, None, bound)


def global_dirichlet_coeffs(m: int, n: int, K: int, places: Optional[SplittingData] = None) -> List[int]:
    """ã_1, ..., ã_K.

    Over Q (no `places`) coefficients are multiplicative in the factorisation
    of i; with splitting data, local series are convolved as Dirichlet series
    indexed by ideal norms.
    """
    m, n = _check_mn(m, n)
    if K < 1:
        raise InvalidArgs(f"K tiene que ser positivo (recibí {K})")
    local_cache: Dict[int, DirichletTrunc] = {}

    def local(q: int) -> DirichletTrunc:
        if q not in local_cache:
            depth = 0
            while q ** (depth + 1) <= K:
                depth += 1
            local_cache[q] = local_series(m, n, depth, q)
        return local_cache[q]

    if places is None:
        out = []
        for i in range(1, K + 1):
            value = Fraction(1)
            for prime, k in sympy.factorint(i).items():
                value *= local(int(prime))[k]
            out.append(value)
    else:
        coeffs = [Fraction(0)] * (K + 1)
        coeffs[1] = Fraction(1)
        for q in places.cardinalities:
            if q > K:
                continue
            series = local(q)
            updated = list(coeffs)
            for N in range(1, K + 1):
                if not coeffs[N]:
                    continue
                norm, k = N * q, 1
                while norm <= K:
                    updated[norm] += coeffs[N] * series[k]
                    norm, k = norm * q, k + 1
            coeffs = updated
        out = coeffs[1:]
    if any(c.denominator != 1 for c in out):
        raise InvalidArgs("Aparecieron coeficientes no enteros")
    return [int(c) for c in out]


# ----------------------------------------------------------------------
# Zeta topológica, abscisas y productos centrales
# ----------------------------------------------------------------------
def topological(m: int, n: int) -> RationalFn:
    """Π_{i<m} (s - i) / (s - n - i)."""
    m, n = _check_mn(m, n)
    s = var("s")
    num, den = ONE, ONE
    for i in range(m):
        num = num * (s - i)
        den = den * (s - n - i)
    return RationalFn(num, den)


def topo_of_factorization(F: CycloFactorization) -> RationalFn:
    """Leading term in (q - 1): each (1 - q^{a-bs})^e becomes (bs - a)^e."""
    up = sum(e for _, _, e in F.numerator)
    down = -sum(e for _, _, e in F.denominator)
    if up != down:
        raise UnbalancedDegrees(f"El numerador tiene {up} factores y el denominador {down}")
    s = var("s")
    num, den = ONE, ONE
    for a, b, e in F.factors:
        linear = b * s - a
        if e > 0:
            num = num * linear ** e
        else:
            den = den * linear ** (-e)
    return RationalFn(num, den)


def abscissa_from_factorization(F: CycloFactorization) -> Fraction:
    """max a/b over the denominator factors (1 - q^a t^b)."""
    if not F.denominator:
        raise EntireFunction(f"{F} no tiene factores en el denominador")
    return max(Fraction(a, b) for a, b, _ in F.denominator)


def global_abscissa_from_factorization(F: CycloFactorization) -> Fraction:
    """max (a + 1)/b over the denominator factors: each contributes ζ_K(bs - a)."""
    if not F.denominator:
        raise EntireFunction(f"{F} no tiene factores en el denominador")
    return max(Fraction(a + 1, b) for a, b, _ in F.denominator)


def central_product(F: CycloFactorization, k: int) -> CycloFactorization:
    """s -> ks: every factor (a, b, e) becomes (a, kb, e)."""
    if k < 1:
        raise InvalidArgs(f"k tiene que ser positivo (recibí {k})")
    alpha, beta = F.prefactor
    return CycloFactorization(tuple((a, k * b, e) for a, b, e in F.factors), (alpha, k * beta))
