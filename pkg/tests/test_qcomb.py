import dataclasses
import unittest
from fractions import Fraction

from hypothesis import given, settings as hsettings, strategies as st

from config import settings
from lib.exactalg import ONE, RationalFn, var
from lib.exceptions import InvalidArgs, SpecializationPole, TooLarge
from lib.qcomb import (
    OrderedSubset,
    brute_rank_count,
    gauss_binomial,
    gp,
    ordered_subsets,
    pochhammer,
    q_bracket_factorial,
    rank_count,
    sv_random_trials,
    verify_sv_identity,
    verify_translation_lemma,
    x_multinomial,
)

X = var("X")


class OrderedSubsetTests(unittest.TestCase):
    def test_validation(self):
        for elements, bound in (((1, 0), 3), ((0, 3), 3), ((-1,), 2)):
            with self.subTest(elements=elements):
                with self.assertRaises(InvalidArgs):
                    OrderedSubset(elements, bound)

    def test_empty_subset_reads_first_as_bound(self):
        self.assertEqual(OrderedSubset((), 4).first, 4)
        self.assertEqual(OrderedSubset((1, 3), 4).first, 1)

    def test_enumeration(self):
        subsets = list(ordered_subsets(3))
        self.assertEqual(len(subsets), 8)
        self.assertEqual(subsets[0].elements, ())
        self.assertEqual(subsets[-1].elements, (0, 1, 2))


class GaussPolynomialTests(unittest.TestCase):
    def test_small_values(self):
        self.assertEqual(gauss_binomial(4, 2), 1 + X + 2 * var("X", 2) + var("X", 3) + var("X", 4))
        self.assertEqual(gauss_binomial(5, 0), ONE)
        self.assertEqual(gauss_binomial(0, 0), ONE)
        with self.assertRaises(InvalidArgs):
            gauss_binomial(2, 3)

    def test_recurrence_matches_factorial_quotient(self):
        """(a choose b)_X = [a]! / ([b]! [a-b]!) as an exact division."""
        for a in range(7):
            for b in range(a + 1):
                with self.subTest(a=a, b=b):
                    quotient = q_bracket_factorial(a).exact_div(q_bracket_factorial(b) * q_bracket_factorial(a - b))
                    self.assertEqual(gauss_binomial(a, b), quotient)

    def test_value_at_one_is_binomial(self):
        from math import comb

        for a in range(8):
            for b in range(a + 1):
                self.assertEqual(gauss_binomial(a, b).evaluate(X=1), comb(a, b))

    def test_x_multinomial(self):
        """(3 choose {0, 1})_X = (3 choose 1)_X (1 choose 0)_X."""
        self.assertEqual(x_multinomial(3, (0, 1)), gauss_binomial(3, 1))
        self.assertEqual(x_multinomial(3, ()), ONE)
        self.assertEqual(x_multinomial(4, (2,)), gauss_binomial(4, 2))


class PochhammerTests(unittest.TestCase):
    def test_scalars(self):
        self.assertEqual(pochhammer(Fraction(1, 2), Fraction(1, 2), 2), Fraction(3, 8))
        self.assertEqual(pochhammer(Fraction(5), Fraction(7), 0), 1)

    def test_polynomials(self):
        self.assertEqual(pochhammer(X, X, 3), q_bracket_factorial(3))

    def test_gp(self):
        self.assertEqual(gp(Fraction(1, 3)), Fraction(1, 2))
        self.assertEqual(gp(RationalFn(X)), RationalFn(X, 1 - X))
        with self.assertRaises(SpecializationPole):
            gp(Fraction(1))


class RankCountTests(unittest.TestCase):
    def test_two_by_two_rank_one(self):
        self.assertEqual(rank_count(2, 2, 1, 2), 9)
        self.assertEqual(rank_count(2, 2, 2, 2), 6)

    def test_symbolic_form(self):
        q = var("q")
        self.assertEqual(rank_count(1, 1, 1), q - 1)
        self.assertEqual(rank_count(1, 2, 0), ONE)

    def test_ranks_partition_all_matrices(self):
        for i in range(4):
            for j in range(i, 4):
                for p in (2, 3, 5):
                    total = sum(rank_count(i, j, r, p) for r in range(i + 1))
                    self.assertEqual(total, p ** (i * j))

    def test_formula_matches_enumeration(self):
        for p in (2, 3):
            for j in range(1, 4):
                for i in range(1, j + 1):
                    for r in range(i + 1):
                        with self.subTest(i=i, j=j, r=r, p=p):
                            self.assertEqual(rank_count(i, j, r, p), brute_rank_count(i, j, r, p))

    def test_invalid_arguments(self):
        with self.assertRaises(InvalidArgs):
            rank_count(3, 2, 1)
        with self.assertRaises(InvalidArgs):
            rank_count(2, 3, 3)

    def test_enumeration_guard(self):
        tight = dataclasses.replace(settings, max_rank_brute=10)
        with self.assertRaises(TooLarge):
            brute_rank_count(2, 2, 1, 2, tight)


class IdentityTests(unittest.TestCase):
    def test_translation_lemma(self):
        for a in range(4):
            for j in range(1, 5):
                for subset in ordered_subsets(j):
                    with self.subTest(a=a, j=j, I=subset.elements):
                        self.assertTrue(verify_translation_lemma(a, j, subset))

    def test_subset_sum_identity_symbolic(self):
        for j in range(1, 4):
            with self.subTest(j=j):
                self.assertTrue(verify_sv_identity(j, "symbolic"))

    def test_symbolic_bound(self):
        with self.assertRaises(TooLarge):
            verify_sv_identity(4, "symbolic")

    def test_subset_sum_identity_random(self):
        for j in range(1, 6):
            ok, used = sv_random_trials(j, 50, seed=j)
            self.assertTrue(ok)
            self.assertEqual(len(used), 50)

    def test_random_trials_are_reproducible(self):
        self.assertEqual(sv_random_trials(3, 10, seed=7), sv_random_trials(3, 10, seed=7))

    def test_specialized_pole(self):
        with self.assertRaises(SpecializationPole):
            verify_sv_identity(2, "specialized", (Fraction(1), Fraction(2), Fraction(1)))

    def test_unknown_mode(self):
        with self.assertRaises(InvalidArgs):
            verify_sv_identity(2, "numeric")

    @given(
        st.fractions(min_value=-4, max_value=4, max_denominator=5),
        st.fractions(min_value=-4, max_value=4, max_denominator=5),
        st.fractions(min_value=-4, max_value=4, max_denominator=5),
    )
    @hsettings(max_examples=40, deadline=None)
    def test_subset_sum_identity_holds_off_poles(self, x, y, z):
        try:
            holds = verify_sv_identity(2, "specialized", (x, y, z))
        except SpecializationPole:
            return
        self.assertTrue(holds)


if __name__ == "__main__":
    unittest.main()
