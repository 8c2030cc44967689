"""Exact arithmetic over the fixed variable universe {q, t, X, Y, Z, s}.

`MultiPoly` is an immutable sparse polynomial with `Fraction` coefficients,
`RationalFn` a quotient of two of them compared by cross-multiplication, and
`DirichletTrunc` a power series in t truncated at a fixed order.
The canonical text form (`str`) parses back with `parse_ratfn`.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple, Union

from .enums import QMode
from .exceptions import ExponentOverflow, InvalidArgs, NonUnitDenominator, ParseError, SpecializationPole

logger = logging.getLogger(__name__)

VARIABLES: Tuple[str, ...] = ("q", "t", "X", "Y", "Z", "s")
_INDEX: Dict[str, int] = {name: i for i, name in enumerate(VARIABLES)}
_NVARS = len(VARIABLES)
_ZERO_EXPS: Tuple[int, ...] = (0,) * _NVARS
MAX_EXPONENT = 2 ** 63 - 1

Exps = Tuple[int, ...]
Scalar = Union[int, Fraction]


def _var_index(name: str) -> int:
    try:
        return _INDEX[name]
    except KeyError:
        raise InvalidArgs(f"Variable desconocida {name!r}; las válidas son {', '.join(VARIABLES)}") from None


def _order_key(exps: Exps):
    # ascending t-degree, descending s-degree, ascending total degree
    return (exps[1], -exps[5], sum(exps), exps)


def _check_exps(exps: Exps) -> Exps:
    for e in exps:
        if e > MAX_EXPONENT:
            raise ExponentOverflow(f"Exponente {e} fuera de rango")
    return exps


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    raise TypeError(f"No puedo convertir {value!r} en escalar racional")


class MultiPoly:
    """Sparse polynomial in the variables of `VARIABLES`.

    Terms are kept as a tuple of ``(exponents, coefficient)`` pairs sorted by
    the canonical term order; zero coefficients never appear.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Union[Mapping[Exps, Scalar], Iterable[Tuple[Exps, Scalar]], None] = None):
        acc: Dict[Exps, Fraction] = {}
        if terms is not None:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for exps, coeff in items:
                exps = tuple(exps)
                if len(exps) != _NVARS or any(e < 0 for e in exps):
                    raise InvalidArgs(f"Vector de exponentes inválido: {exps}")
                c = _as_fraction(coeff)
                if c:
                    acc[exps] = acc.get(exps, Fraction(0)) + c
        self._terms: Tuple[Tuple[Exps, Fraction], ...] = tuple(
            sorted(((e, c) for e, c in acc.items() if c), key=lambda item: _order_key(item[0]))
        )

    # ------------------------------------------------------------------
    # Constructores
    # ------------------------------------------------------------------
    @classmethod
    def _from_dict(cls, acc: Dict[Exps, Fraction]) -> "MultiPoly":
        poly = cls.__new__(cls)
        poly._terms = tuple(
            sorted(((e, c) for e, c in acc.items() if c), key=lambda item: _order_key(item[0]))
        )
        return poly

    @classmethod
    def const(cls, value: Scalar) -> "MultiPoly":
        return cls({_ZERO_EXPS: value})

    @classmethod
    def var(cls, name: str, power: int = 1) -> "MultiPoly":
        return cls.monomial(1, **{name: power})

    @classmethod
    def monomial(cls, coeff: Scalar = 1, **powers: int) -> "MultiPoly":
        exps = [0] * _NVARS
        for name, e in powers.items():
            if e < 0:
                raise InvalidArgs(f"Exponente negativo para {name}: {e}")
            exps[_var_index(name)] = e
        return cls({tuple(exps): coeff})

    @classmethod
    def coerce(cls, value) -> "MultiPoly":
        if isinstance(value, MultiPoly):
            return value
        return cls.const(_as_fraction(value))

    # ------------------------------------------------------------------
    # Consultas
    # ------------------------------------------------------------------
    @property
    def terms(self) -> Tuple[Tuple[Exps, Fraction], ...]:
        return self._terms

    def __iter__(self) -> Iterator[Tuple[Exps, Fraction]]:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and self._terms[0][0] == _ZERO_EXPS)

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def constant_term(self) -> Fraction:
        for exps, c in self._terms:
            if exps == _ZERO_EXPS:
                return c
        return Fraction(0)

    def leading_coefficient(self) -> Fraction:
        """Coefficient of the first term in canonical order."""
        return self._terms[0][1] if self._terms else Fraction(0)

    def variables(self) -> Tuple[str, ...]:
        used = set()
        for exps, _ in self._terms:
            used.update(i for i, e in enumerate(exps) if e)
        return tuple(VARIABLES[i] for i in sorted(used))

    def degree(self, name: str) -> int:
        idx = _var_index(name)
        return max((exps[idx] for exps, _ in self._terms), default=0)

    def min_degree(self, name: str) -> int:
        idx = _var_index(name)
        return min((exps[idx] for exps, _ in self._terms), default=0)

    def coeff_in(self, name: str, k: int) -> "MultiPoly":
        """Coefficient of name^k, as a polynomial in the remaining variables."""
        idx = _var_index(name)
        acc: Dict[Exps, Fraction] = {}
        for exps, c in self._terms:
            if exps[idx] == k:
                reduced = exps[:idx] + (0,) + exps[idx + 1:]
                acc[reduced] = c
        return MultiPoly._from_dict(acc)

    def to_scalar(self) -> Fraction:
        if not self.is_constant():
            raise InvalidArgs(f"{self} no es constante")
        return self.constant_term()

    # ------------------------------------------------------------------
    # Aritmética
    # ------------------------------------------------------------------
    def _combine(self, other: "MultiPoly", sign: int) -> "MultiPoly":
        acc: Dict[Exps, Fraction] = dict(self._terms)
        for exps, c in other._terms:
            acc[exps] = acc.get(exps, Fraction(0)) + sign * c
        return MultiPoly._from_dict(acc)

    def __add__(self, other) -> "MultiPoly":
        if isinstance(other, RationalFn):
            return NotImplemented
        return self._combine(MultiPoly.coerce(other), 1)

    __radd__ = __add__

    def __sub__(self, other) -> "MultiPoly":
        if isinstance(other, RationalFn):
            return NotImplemented
        return self._combine(MultiPoly.coerce(other), -1)

    def __rsub__(self, other) -> "MultiPoly":
        return MultiPoly.coerce(other)._combine(self, -1)

    def __neg__(self) -> "MultiPoly":
        return MultiPoly._from_dict({e: -c for e, c in self._terms})

    def __mul__(self, other) -> "MultiPoly":
        if isinstance(other, RationalFn):
            return NotImplemented
        other = MultiPoly.coerce(other)
        acc: Dict[Exps, Fraction] = {}
        for e1, c1 in self._terms:
            for e2, c2 in other._terms:
                exps = tuple(a + b for a, b in zip(e1, e2))
                acc[exps] = acc.get(exps, Fraction(0)) + c1 * c2
        for exps in acc:
            _check_exps(exps)
        return MultiPoly._from_dict(acc)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MultiPoly":
        if not isinstance(n, int) or n < 0:
            raise InvalidArgs(f"Potencia inválida para un polinomio: {n!r}")
        if self.is_monomial():
            exps, c = self._terms[0]
            return MultiPoly._from_dict({_check_exps(tuple(e * n for e in exps)): c ** n})
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __truediv__(self, other):
        return RationalFn(self) / other

    def __rtruediv__(self, other):
        return RationalFn(other) / self

    def __eq__(self, other) -> bool:
        if isinstance(other, MultiPoly):
            return self._terms == other._terms
        if isinstance(other, RationalFn):
            return other == self
        if isinstance(other, (int, Fraction)):
            return self._terms == MultiPoly.const(other)._terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._terms)

    def exact_div(self, divisor: "MultiPoly") -> "MultiPoly":
        """Quotient of an exact division; raises `InvalidArgs` if a remainder is left.

        Uses lexicographic leading terms over the variable order of `VARIABLES`.
        """
        divisor = MultiPoly.coerce(divisor)
        if divisor.is_zero():
            raise SpecializationPole("División por el polinomio nulo")
        lead_exps, lead_c = max(divisor._terms, key=lambda item: item[0])
        rem: Dict[Exps, Fraction] = dict(self._terms)
        quot: Dict[Exps, Fraction] = {}
        dterms = divisor._terms
        while rem:
            r_exps = max(rem)
            r_c = rem[r_exps]
            shift = tuple(a - b for a, b in zip(r_exps, lead_exps))
            if any(e < 0 for e in shift):
                raise InvalidArgs(f"{divisor} no divide exactamente a {self}")
            factor = r_c / lead_c
            quot[shift] = quot.get(shift, Fraction(0)) + factor
            for d_exps, d_c in dterms:
                exps = tuple(a + b for a, b in zip(shift, d_exps))
                value = rem.get(exps, Fraction(0)) - factor * d_c
                if value:
                    rem[exps] = value
                else:
                    rem.pop(exps, None)
        return MultiPoly._from_dict(quot)

    def monomial_content(self) -> Exps:
        """Componentwise minimum of the exponent vectors."""
        if not self._terms:
            return _ZERO_EXPS
        return tuple(min(exps[i] for exps, _ in self._terms) for i in range(_NVARS))

    def shift_down(self, exps: Exps) -> "MultiPoly":
        return MultiPoly._from_dict({tuple(a - b for a, b in zip(e, exps)): c for e, c in self._terms})

    def scale(self, factor: Scalar) -> "MultiPoly":
        factor = _as_fraction(factor)
        return MultiPoly._from_dict({e: c * factor for e, c in self._terms})

    # ------------------------------------------------------------------
    # Sustitución
    # ------------------------------------------------------------------
    def substitute(self, values: Optional[Mapping[str, object]] = None, **kwargs) -> "RationalFn":
        """Replace variables by scalars, polynomials or rational functions.

        The result is assembled over the single denominator Π d_v^{deg_v}, so no
        intermediate fraction additions happen.
        """
        values = dict(values or {}, **kwargs)
        if not values:
            return RationalFn(self)
        plan = []
        for name, value in values.items():
            idx = _var_index(name)
            value = RationalFn.coerce(value)
            plan.append((idx, value.num, value.den, self.degree(name)))

        power_cache: Dict[Tuple[int, int, bool], MultiPoly] = {}

        def power(idx: int, base: MultiPoly, e: int, is_den: bool) -> MultiPoly:
            key = (idx, e, is_den)
            if key not in power_cache:
                power_cache[key] = base ** e
            return power_cache[key]

        total = ZERO
        for exps, c in self._terms:
            rest = list(exps)
            term = MultiPoly.const(c)
            for idx, num, den, deg in plan:
                e = exps[idx]
                rest[idx] = 0
                if e:
                    term = term * power(idx, num, e, False)
                if deg - e:
                    term = term * power(idx, den, deg - e, True)
            if any(rest):
                term = term * MultiPoly({tuple(rest): 1})
            total = total + term
        den = ONE
        for idx, _, d, deg in plan:
            if deg:
                den = den * power(idx, d, deg, True)
        return RationalFn(total, den)

    def evaluate(self, values: Optional[Mapping[str, Scalar]] = None, **kwargs) -> Fraction:
        values = dict(values or {}, **kwargs)
        total = Fraction(0)
        for exps, c in self._terms:
            term = c
            for idx, e in enumerate(exps):
                if e:
                    name = VARIABLES[idx]
                    if name not in values:
                        raise InvalidArgs(f"Falta un valor para la variable {name}")
                    term *= _as_fraction(values[name]) ** e
            total += term
        return total

    def at_inverse(self, name: str) -> "RationalFn":
        """P(v^{-1}) written as (v^{deg} P(v^{-1})) / v^{deg}."""
        idx = _var_index(name)
        deg = self.degree(name)
        acc: Dict[Exps, Fraction] = {}
        for exps, c in self._terms:
            flipped = exps[:idx] + (deg - exps[idx],) + exps[idx + 1:]
            acc[flipped] = c
        return RationalFn(MultiPoly._from_dict(acc), MultiPoly.var(name, deg))

    # ------------------------------------------------------------------
    # Representación
    # ------------------------------------------------------------------
    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for i, (exps, c) in enumerate(self._terms):
            sign = "-" if c < 0 else "+"
            body = _term_text(exps, abs(c))
            if i == 0:
                parts.append(("-" if sign == "-" else "") + body)
            else:
                parts.append(f" {sign} {body}")
        return "".join(parts)

    def __repr__(self) -> str:
        return f"MultiPoly({str(self)!r})"

    def to_latex(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for i, (exps, c) in enumerate(self._terms):
            body = _term_latex(exps, abs(c))
            if i == 0:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append(f" {'-' if c < 0 else '+'} {body}")
        return "".join(parts)


def _monomial_text(exps: Exps, sep: str = "*", latex: bool = False) -> str:
    pieces = []
    for idx, e in enumerate(exps):
        if not e:
            continue
        name = VARIABLES[idx]
        if e == 1:
            pieces.append(name)
        else:
            pieces.append(f"{name}^{{{e}}}" if latex else f"{name}^{e}")
    return sep.join(pieces)


def _term_text(exps: Exps, c: Fraction) -> str:
    mono = _monomial_text(exps)
    if c.denominator == 1:
        coeff = str(c.numerator)
    else:
        coeff = f"({c.numerator}/{c.denominator})"
    if not mono:
        return coeff
    if c == 1:
        return mono
    return f"{coeff}*{mono}"


def _term_latex(exps: Exps, c: Fraction) -> str:
    mono = _monomial_text(exps, sep=" ", latex=True)
    if c.denominator == 1:
        coeff = str(c.numerator)
    else:
        coeff = f"\\frac{{{c.numerator}}}{{{c.denominator}}}"
    if not mono:
        return coeff
    if c == 1:
        return mono
    return f"{coeff} {mono}"


ZERO = MultiPoly()
ONE = MultiPoly.const(1)


def var(name: str, power: int = 1) -> MultiPoly:
    """Shorthand for `MultiPoly.var`."""
    return MultiPoly.var(name, power)


def poly_arith(lhs: MultiPoly, rhs: MultiPoly, op: str) -> MultiPoly:
    """Apply ``add``, ``sub`` or ``mul`` to two polynomials."""
    if op == "add":
        return lhs + rhs
    if op == "sub":
        return lhs - rhs
    if op == "mul":
        return lhs * rhs
    raise InvalidArgs(f"Operación desconocida {op!r} (usar add, sub o mul)")


class RationalFn:
    """Quotient num/den of two `MultiPoly` values.

    On construction the common monomial content is removed and the
    denominator's first canonical coefficient is scaled to 1; no polynomial
    GCD is taken, so equality is decided by cross-multiplication.
    """

    __slots__ = ("num", "den")
    __hash__ = None  # type: ignore[assignment]

    def __init__(self, num, den=1):
        num = MultiPoly.coerce(num) if not isinstance(num, RationalFn) else num
        den = MultiPoly.coerce(den) if not isinstance(den, RationalFn) else den
        if isinstance(num, RationalFn) or isinstance(den, RationalFn):
            quotient = RationalFn.coerce(num) / RationalFn.coerce(den)
            self.num, self.den = quotient.num, quotient.den
            return
        if den.is_zero():
            raise SpecializationPole("Denominador nulo")
        if num.is_zero():
            self.num, self.den = ZERO, ONE
            return
        content = tuple(min(a, b) for a, b in zip(num.monomial_content(), den.monomial_content()))
        if any(content):
            num = num.shift_down(content)
            den = den.shift_down(content)
        lead = den.leading_coefficient()
        if lead != 1:
            num = num.scale(1 / lead)
            den = den.scale(1 / lead)
        self.num: MultiPoly = num
        self.den: MultiPoly = den

    @classmethod
    def coerce(cls, value) -> "RationalFn":
        if isinstance(value, RationalFn):
            return value
        return cls(MultiPoly.coerce(value))

    # ------------------------------------------------------------------
    # Aritmética
    # ------------------------------------------------------------------
    def __add__(self, other) -> "RationalFn":
        other = RationalFn.coerce(other)
        if self.den == other.den:
            return RationalFn(self.num + other.num, self.den)
        if other.den == ONE:
            return RationalFn(self.num + other.num * self.den, self.den)
        if self.den == ONE:
            return RationalFn(self.num * other.den + other.num, other.den)
        return RationalFn(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RationalFn":
        return RationalFn(-self.num, self.den)

    def __sub__(self, other) -> "RationalFn":
        return self + (-RationalFn.coerce(other))

    def __rsub__(self, other) -> "RationalFn":
        return RationalFn.coerce(other) - self

    def __mul__(self, other) -> "RationalFn":
        other = RationalFn.coerce(other)
        return RationalFn(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalFn":
        other = RationalFn.coerce(other)
        if other.num.is_zero():
            raise SpecializationPole("División por cero")
        return RationalFn(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other) -> "RationalFn":
        return RationalFn.coerce(other) / self

    def __pow__(self, n: int) -> "RationalFn":
        if not isinstance(n, int):
            raise InvalidArgs(f"Potencia inválida: {n!r}")
        if n >= 0:
            return RationalFn(self.num ** n, self.den ** n)
        if self.num.is_zero():
            raise SpecializationPole("Potencia negativa de cero")
        return RationalFn(self.den ** (-n), self.num ** (-n))

    def __eq__(self, other) -> bool:
        if isinstance(other, (MultiPoly, int, Fraction)):
            other = RationalFn.coerce(other)
        if not isinstance(other, RationalFn):
            return NotImplemented
        return self.num * other.den == other.num * self.den

    # ------------------------------------------------------------------
    # Consultas y sustitución
    # ------------------------------------------------------------------
    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def as_poly(self) -> MultiPoly:
        """The numerator divided by the denominator, which must divide it exactly."""
        if self.den.is_constant():
            return self.num.scale(1 / self.den.to_scalar())
        return self.num.exact_div(self.den)

    def variables(self) -> Tuple[str, ...]:
        return tuple(v for v in VARIABLES if v in set(self.num.variables()) | set(self.den.variables()))

    def substitute(self, values: Optional[Mapping[str, object]] = None, **kwargs) -> "RationalFn":
        values = dict(values or {}, **kwargs)
        num = self.num.substitute(values)
        den = self.den.substitute(values)
        if den.num.is_zero():
            raise SpecializationPole(f"El denominador {self.den} se anula en {values}")
        return num / den

    def evaluate(self, values: Optional[Mapping[str, Scalar]] = None, **kwargs) -> Fraction:
        values = dict(values or {}, **kwargs)
        den = self.den.evaluate(values)
        if den == 0:
            raise SpecializationPole(f"El denominador {self.den} se anula en {values}")
        return self.num.evaluate(values) / den

    def invert_variables(self, names: Sequence[str]) -> "RationalFn":
        """Substitute v -> v^{-1} for each listed variable."""
        inverse = {name: RationalFn(ONE, MultiPoly.var(name)) for name in names}
        return self.substitute(inverse)

    # ------------------------------------------------------------------
    # Representación
    # ------------------------------------------------------------------
    def __str__(self) -> str:
        if self.den == ONE:
            return str(self.num)
        num = str(self.num)
        den = str(self.den)
        if len(self.num) > 1:
            num = f"({num})"
        if len(self.den) > 1 or "*" in den:
            den = f"({den})"
        return f"{num} / {den}"

    def __repr__(self) -> str:
        return f"RationalFn({str(self)!r})"

    def to_latex(self) -> str:
        if self.den == ONE:
            return self.num.to_latex()
        return f"\\frac{{{self.num.to_latex()}}}{{{self.den.to_latex()}}}"


def ratfn_eq(a: RationalFn, b: RationalFn) -> bool:
    """True iff a and b are the same rational function."""
    return RationalFn.coerce(a) == RationalFn.coerce(b)


def sum_with_denominator(terms: Iterable[RationalFn], common_den: MultiPoly) -> RationalFn:
    """Add rational functions whose denominators all divide `common_den`."""
    total = ZERO
    for term in terms:
        term = RationalFn.coerce(term)
        if term.num.is_zero():
            continue
        cofactor = common_den.exact_div(term.den)
        total = total + term.num * cofactor
    return RationalFn(total, common_den)


# ----------------------------------------------------------------------
# Texto canónico
# ----------------------------------------------------------------------
_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_]\w*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    text = text.strip()
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if not match or match.end() == pos:
            raise ParseError(f"Carácter inesperado en la posición {pos}: {text[pos:pos + 10]!r}")
        number, name, op = match.groups()
        if number is not None:
            tokens.append(("int", int(number)))
        elif name is not None:
            if name not in _INDEX:
                raise ParseError(f"Variable desconocida {name!r} en la posición {match.start(2)}")
            tokens.append(("var", name))
        else:
            tokens.append(("op", "^" if op == "**" else op))
        pos = match.end()
    tokens.append(("end", None))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def expect(self, value: str) -> None:
        kind, tok = self.take()
        if kind != "op" or tok != value:
            raise ParseError(f"Esperaba {value!r} en {self.text!r}")

    def parse(self) -> RationalFn:
        value = self.expr()
        if self.peek()[0] != "end":
            raise ParseError(f"Texto sobrante en {self.text!r}")
        return value

    def expr(self) -> RationalFn:
        sign = 1
        if self.peek() in (("op", "-"), ("op", "+")):
            sign = -1 if self.take()[1] == "-" else 1
        value = self.term()
        if sign < 0:
            value = -value
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> RationalFn:
        value = self.factor()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            rhs = self.factor()
            value = value * rhs if op == "*" else value / rhs
        return value

    def factor(self) -> RationalFn:
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            negative = False
            if self.peek() == ("op", "-"):
                self.take()
                negative = True
            kind, exponent = self.take()
            if kind != "int":
                raise ParseError(f"Exponente no entero en {self.text!r}")
            base = base ** (-exponent if negative else exponent)
        return base

    def atom(self) -> RationalFn:
        kind, tok = self.take()
        if kind == "int":
            return RationalFn(MultiPoly.const(tok))
        if kind == "var":
            return RationalFn(MultiPoly.var(tok))
        if kind == "op" and tok == "(":
            value = self.expr()
            self.expect(")")
            return value
        if kind == "op" and tok == "-":
            return -self.factor()
        raise ParseError(f"Token inesperado {tok!r} en {self.text!r}")


def parse_ratfn(text: str) -> RationalFn:
    """Parse the canonical text form (also accepts any expression over + - * / ^)."""
    try:
        return _Parser(text).parse()
    except SpecializationPole as exc:
        raise ParseError(f"Expresión con división por cero: {text!r}") from exc


def parse_poly(text: str) -> MultiPoly:
    value = parse_ratfn(text)
    if not value.den.is_constant():
        raise ParseError(f"{text!r} no es un polinomio")
    return value.as_poly()


# ----------------------------------------------------------------------
# Series truncadas
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class DirichletTrunc:
    """Power series Σ_{k ≤ order} c_k t^k.

    Coefficients are `MultiPoly` in q when `p` is None, exact `Fraction`
    values at q = p otherwise.
    """

    order: int
    coeffs: Tuple[Union[MultiPoly, Fraction], ...]
    p: Optional[int] = None

    def __post_init__(self):
        if self.order < 0:
            raise InvalidArgs("El orden de truncamiento no puede ser negativo")
        if len(self.coeffs) != self.order + 1:
            raise InvalidArgs(f"Se esperaban {self.order + 1} coeficientes, llegaron {len(self.coeffs)}")

    @property
    def mode(self) -> QMode:
        return QMode.SYMBOLIC if self.p is None else QMode.NUMERIC

    @classmethod
    def zero(cls, order: int, p: Optional[int] = None) -> "DirichletTrunc":
        fill = ZERO if p is None else Fraction(0)
        return cls(order, (fill,) * (order + 1), p)

    def __getitem__(self, k: int):
        return self.coeffs[k]

    def _check_compatible(self, other: "DirichletTrunc") -> None:
        if self.order != other.order or self.p != other.p:
            raise InvalidArgs("Series con distinto orden o modo")

    def __add__(self, other: "DirichletTrunc") -> "DirichletTrunc":
        self._check_compatible(other)
        return DirichletTrunc(self.order, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)), self.p)

    def __mul__(self, other: "DirichletTrunc") -> "DirichletTrunc":
        self._check_compatible(other)
        K = self.order
        out = []
        for k in range(K + 1):
            acc = ZERO if self.p is None else Fraction(0)
            for i in range(k + 1):
                acc = acc + self.coeffs[i] * other.coeffs[k - i]
            out.append(acc)
        return DirichletTrunc(K, tuple(out), self.p)

    def truncate(self, order: int) -> "DirichletTrunc":
        if order > self.order:
            raise InvalidArgs(f"No se puede extender una serie de orden {self.order} a {order}")
        return DirichletTrunc(order, self.coeffs[: order + 1], self.p)

    def specialize(self, p: int) -> "DirichletTrunc":
        if self.p is not None:
            return self
        return DirichletTrunc(self.order, tuple(c.evaluate(q=p) for c in self.coeffs), p)

    def as_poly(self) -> MultiPoly:
        total = ZERO
        for k, c in enumerate(self.coeffs):
            total = total + MultiPoly.coerce(c) * MultiPoly.var("t", k)
        return total

    def __str__(self) -> str:
        return str(self.as_poly())

    def to_latex(self) -> str:
        return self.as_poly().to_latex()


def expand_factor(a: int, b: int, K: int, p: Optional[int] = None) -> DirichletTrunc:
    """Truncation of 1/(1 - q^a t^b) to order K."""
    if b < 1 or K < 0:
        raise InvalidArgs(f"expand_factor necesita b >= 1 y K >= 0 (b={b}, K={K})")
    if p is None:
        if a < 0:
            raise InvalidArgs("En modo simbólico el exponente de q tiene que ser >= 0")
        coeffs = [ZERO] * (K + 1)
        for j in range(K // b + 1):
            coeffs[b * j] = MultiPoly.var("q", a * j)
    else:
        coeffs = [Fraction(0)] * (K + 1)
        for j in range(K // b + 1):
            coeffs[b * j] = Fraction(p) ** (a * j)
    return DirichletTrunc(K, tuple(coeffs), p)


def series_of_ratfn(f: RationalFn, K: int, p: Optional[int] = None) -> DirichletTrunc:
    """Power-series expansion of f in t up to t^K.

    With `p` the variable q is specialised first and coefficients are
    `Fraction`; otherwise they are polynomials in q.
    """
    f = RationalFn.coerce(f)
    if p is not None:
        f = f.substitute(q=p)
    stray = set(f.variables()) - {"q", "t"}
    if stray:
        raise InvalidArgs(f"series_of_ratfn solo admite q y t (sobran {', '.join(sorted(stray))})")

    def coefficient(poly: MultiPoly, k: int):
        c = poly.coeff_in("t", k)
        return c.to_scalar() if p is not None else c

    b = [coefficient(f.den, k) for k in range(K + 1)]
    b0 = b[0]
    if p is None:
        if b0.is_zero() or not b0.is_constant():
            raise NonUnitDenominator(f"El denominador {f.den} no tiene término constante invertible en t")
        inv_b0 = 1 / b0.to_scalar()
    else:
        if b0 == 0:
            raise NonUnitDenominator(f"El denominador {f.den} se anula en t = 0")
        inv_b0 = 1 / b0
    out = []
    for k in range(K + 1):
        acc = coefficient(f.num, k)
        for i in range(1, k + 1):
            if b[i]:
                acc = acc - b[i] * out[k - i]
        out.append(acc * inv_b0 if p is not None else MultiPoly.coerce(acc).scale(inv_b0))
    return DirichletTrunc(K, tuple(out), p)
