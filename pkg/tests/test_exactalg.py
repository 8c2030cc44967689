import unittest
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from lib.enums import QMode
from lib.exactalg import (
    ONE,
    DirichletTrunc,
    MultiPoly,
    RationalFn,
    expand_factor,
    parse_poly,
    parse_ratfn,
    poly_arith,
    ratfn_eq,
    series_of_ratfn,
    sum_with_denominator,
    var,
)
from lib.exceptions import InvalidArgs, NonUnitDenominator, ParseError, SpecializationPole

q, t = var("q"), var("t")

_coeff = st.integers(min_value=-5, max_value=5)
_small_poly = st.dictionaries(
    st.tuples(st.integers(0, 3), st.integers(0, 3)), _coeff, max_size=5
).map(lambda d: sum((c * var("q", a) * var("t", b) for (a, b), c in d.items()), MultiPoly()))


class MultiPolyTests(unittest.TestCase):
    def test_difference_of_squares(self):
        """(q + 1)(q - 1) expands to q^2 - 1."""
        self.assertEqual((q + 1) * (q - 1), var("q", 2) - 1)

    def test_zero_terms_are_dropped(self):
        self.assertTrue((q * t - t * q).is_zero())
        self.assertEqual(len(MultiPoly({(0,) * 6: 0})), 0)

    def test_canonical_text(self):
        """Terms are ordered by t-degree first."""
        self.assertEqual(str(1 - q * t), "1 - q*t")
        self.assertEqual(str(var("q", 2) * t - 3 + Fraction(1, 2) * var("t", 2)), "-3 + q^2*t + (1/2)*t^2")
        self.assertEqual(str(var("s") - 1), "s - 1")

    def test_exact_division(self):
        self.assertEqual((1 - var("q", 3)).exact_div(1 - q), 1 + q + var("q", 2))
        with self.assertRaises(InvalidArgs):
            (1 + q).exact_div(1 - q)

    def test_degrees_and_coefficients(self):
        f = 2 + q * t + 3 * var("q", 2) * var("t", 2)
        self.assertEqual(f.degree("t"), 2)
        self.assertEqual(f.min_degree("t"), 0)
        self.assertEqual(f.coeff_in("t", 1), q)
        self.assertEqual(f.constant_term(), 2)

    def test_evaluate_and_substitute(self):
        f = 1 - var("q", 2) * t
        self.assertEqual(f.evaluate(q=3, t=Fraction(1, 9)), 0)
        self.assertEqual(f.substitute(q=2), 1 - 4 * t)
        self.assertEqual(q.at_inverse("q"), RationalFn(ONE, q))

    def test_poly_arith(self):
        self.assertEqual(poly_arith(q, t, "mul"), q * t)
        with self.assertRaises(InvalidArgs):
            poly_arith(q, t, "div")

    def test_unknown_variable(self):
        with self.assertRaises(InvalidArgs):
            var("w")

    @given(_small_poly, _small_poly)
    @settings(max_examples=50, deadline=None)
    def test_ring_axioms(self, f, g):
        """Addition and multiplication commute and distribute."""
        self.assertEqual(f + g, g + f)
        self.assertEqual(f * g, g * f)
        self.assertEqual(f * (g + 1), f * g + f)


class RationalFnTests(unittest.TestCase):
    def test_heisenberg_local_factor(self):
        value = RationalFn(1 - t, 1 - q * t)
        self.assertEqual(str(value), "(1 - t) / (1 - q*t)")
        self.assertEqual(value.to_latex(), "\\frac{1 - t}{1 - q t}")

    def test_equality_without_gcd(self):
        """(1 - t^2)/(1 - t) equals 1 + t by cross-multiplication."""
        self.assertEqual(RationalFn(1 - var("t", 2), 1 - t), 1 + t)
        self.assertTrue(ratfn_eq(RationalFn(q, q * t), RationalFn(ONE, t)))

    def test_monomial_content_is_stripped(self):
        value = RationalFn(var("q", 3) * t, var("q", 2) * (1 - t))
        self.assertEqual(value.num, q * t)
        self.assertEqual(value.den, 1 - t)

    def test_zero_denominator(self):
        with self.assertRaises(SpecializationPole):
            RationalFn(q, 0)

    def test_specialization_pole(self):
        with self.assertRaises(SpecializationPole):
            RationalFn(ONE, 1 - q).evaluate(q=1)
        with self.assertRaises(SpecializationPole):
            RationalFn(ONE, 1 - q * t).substitute(q=1, t=1)

    def test_negative_powers(self):
        self.assertEqual(RationalFn(q) ** -2, RationalFn(ONE, var("q", 2)))

    def test_invert_variables(self):
        """q -> 1/q, t -> 1/t maps (1 - t)/(1 - q t) to q (t - 1)/(q t - 1)."""
        value = RationalFn(1 - t, 1 - q * t)
        self.assertEqual(value.invert_variables(["q", "t"]), RationalFn(q * (t - 1), q * t - 1))

    def test_sum_with_denominator(self):
        terms = [RationalFn(ONE), RationalFn(t, 1 - t)]
        self.assertEqual(sum_with_denominator(terms, 1 - t), RationalFn(ONE, 1 - t))


class ParserTests(unittest.TestCase):
    def test_examples(self):
        self.assertEqual(parse_ratfn("(1 - q^2*t) / (1 - q^3*t)"), RationalFn(1 - var("q", 2) * t, 1 - var("q", 3) * t))
        self.assertEqual(parse_poly("q**2 - 2*q + 1"), (q - 1) ** 2)
        self.assertEqual(parse_ratfn("q^-1"), RationalFn(ONE, q))

    def test_errors(self):
        for text in ("q +", "w", "(q", "q ^ t", "1/0"):
            with self.subTest(text=text):
                with self.assertRaises(ParseError):
                    parse_ratfn(text)
        with self.assertRaises(ParseError):
            parse_poly("1 / (1 - q)")

    @given(_small_poly, _small_poly.filter(lambda d: not d.is_zero()))
    @settings(max_examples=40, deadline=None)
    def test_text_form_is_lossless(self, num, den):
        value = RationalFn(num, den)
        self.assertEqual(parse_ratfn(str(value)), value)


class SeriesTests(unittest.TestCase):
    def test_geometric_series(self):
        series = series_of_ratfn(RationalFn(ONE, 1 - q * t), 4)
        self.assertEqual(series.mode, QMode.SYMBOLIC)
        self.assertEqual(list(series.coeffs), [var("q", k) for k in range(5)])

    def test_specialized_series(self):
        series = series_of_ratfn(RationalFn(1 - t, 1 - q * t), 3, p=2)
        self.assertEqual(series.mode, QMode.NUMERIC)
        self.assertEqual(list(series.coeffs), [1, 1, 2, 4])

    def test_non_unit_denominator(self):
        with self.assertRaises(NonUnitDenominator):
            series_of_ratfn(RationalFn(ONE, t + var("t", 2)), 3)
        with self.assertRaises(NonUnitDenominator):
            series_of_ratfn(RationalFn(ONE, q * (1 - t)), 3)

    def test_other_variables_rejected(self):
        with self.assertRaises(InvalidArgs):
            series_of_ratfn(RationalFn(ONE, 1 - var("X")), 3)

    def test_expand_factor(self):
        self.assertEqual(list(expand_factor(2, 1, 3, p=3).coeffs), [1, 9, 81, 729])
        self.assertEqual(list(expand_factor(1, 2, 4).coeffs), [ONE, 0, q, 0, var("q", 2)])
        with self.assertRaises(InvalidArgs):
            expand_factor(-1, 1, 3)

    def test_truncated_product(self):
        """1/(1 - t) times (1 - t) is 1 up to the truncation order."""
        geometric = expand_factor(0, 1, 5, p=2)
        linear = DirichletTrunc(5, (Fraction(1), Fraction(-1)) + (Fraction(0),) * 4, 2)
        product = geometric * linear
        self.assertEqual(list(product.coeffs), [1, 0, 0, 0, 0, 0])

    def test_truncate_and_specialize(self):
        series = series_of_ratfn(RationalFn(ONE, 1 - q * t), 4)
        self.assertEqual(series.truncate(2).specialize(5).coeffs, (1, 5, 25))
        with self.assertRaises(InvalidArgs):
            series.truncate(7)


if __name__ == "__main__":
    unittest.main()
