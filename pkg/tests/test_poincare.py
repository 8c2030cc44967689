import dataclasses
import itertools
import random
import unittest
from fractions import Fraction

from config import settings
from lib.enums import ProbeStatus
from lib.exactalg import RationalFn, series_of_ratfn, var
from lib.exceptions import NoAdmissibleOmega, NotASequence, TooLarge
from lib.gzeta import local_multiplicative
from lib.lattice import abelian, adapted_unimodular, base_change, direct_sum_abelian, make_G_mn, rescaled_heisenberg
from lib.lattice_registry import lattice_registry
from lib.poincare import (
    PatternKey,
    alpha,
    brute_poincare,
    classify_kernels,
    enumerate_F_S,
    enumerate_patterns,
    pattern_counts,
    smoothness_probe,
    thm_tech_eval,
)
from lib.qcomb import rank_count
from lib.snf import NuVector

t = var("t")


def _random_adapted_ops(rng: random.Random, d: int, d_prime: int, steps: int = 4):
    m = d - d_prime
    ops = []
    for _ in range(steps):
        kind = rng.choice(["swap", "neg", "add"])
        if kind == "neg":
            ops.append(("neg", rng.randrange(d), 0, 0))
            continue
        block = range(m) if rng.random() < 0.6 or d_prime < 2 else range(m, d)
        i, j = rng.sample(list(block), 2) if len(block) > 1 else (0, 0)
        if i == j:
            continue
        ops.append((kind, i, j, rng.randint(-2, 2) if kind == "add" else 0))
    return ops


class PatternTests(unittest.TestCase):
    def test_decoding_a_nu_vector(self):
        key = PatternKey.from_nu(NuVector((0, 1), 2), 2)
        self.assertEqual((key.I, key.r, key.weight), ((0, 1), (1, 1), 3))
        self.assertEqual(key.target(), NuVector((0, 1), 2))
        self.assertIsNone(PatternKey.from_nu(NuVector((1, 1), 2), 2))

    def test_targets_decode_back(self):
        for key in enumerate_patterns(3, 5):
            with self.subTest(key=str(key)):
                self.assertEqual(PatternKey.from_nu(key.target(), 3), key)

    def test_enumeration_by_weight(self):
        keys = enumerate_patterns(1, 3)
        self.assertEqual([(k.I, k.r) for k in keys], [((0,), (1,)), ((0,), (2,)), ((0,), (3,))])
        self.assertTrue(all(k.weight <= 4 for k in enumerate_patterns(2, 4)))


class BrutePoincareTests(unittest.TestCase):
    def setUp(self) -> None:
        lattice_registry.clear()

    def test_heisenberg_counts(self):
        """|N^{(0)}_{(r)}| = (p - 1) p^{r-1} for the Heisenberg lattice."""
        counts = pattern_counts(make_G_mn(1, 1), 3, 3)
        self.assertEqual({(k.I, k.r): c for k, c in counts.items()}, {((0,), (1,)): 2, ((0,), (2,)): 6, ((0,), (3,)): 18})

    def test_matches_closed_form(self):
        for m, n, p, K in ((1, 1, 2, 6), (1, 1, 3, 4), (1, 2, 2, 4), (1, 2, 3, 3), (2, 2, 2, 3), (1, 3, 2, 3)):
            with self.subTest(m=m, n=n, p=p, K=K):
                brute = brute_poincare(make_G_mn(m, n), p, K)
                closed = series_of_ratfn(local_multiplicative(m, n), K, p)
                self.assertEqual(brute.coeffs, closed.coeffs)

    def test_invariant_under_adapted_base_change(self):
        G = make_G_mn(1, 2)
        reference = brute_poincare(G, 2, 3)
        rng = random.Random(2024)
        for _ in range(10):
            U = adapted_unimodular(G.d, G.d_prime, _random_adapted_ops(rng, G.d, G.d_prime))
            self.assertEqual(brute_poincare(base_change(G, U), 2, 3).coeffs, reference.coeffs)

    def test_abelian_lattice_is_trivial(self):
        self.assertEqual(brute_poincare(abelian(3), 2, 3).coeffs, (1, 0, 0, 0))

    def test_worker_pool_gives_same_counts(self):
        G = make_G_mn(1, 2)
        self.assertEqual(pattern_counts(G, 2, 3, workers=2), pattern_counts(G, 2, 3))

    def test_enumeration_guard(self):
        tight = dataclasses.replace(settings, max_enumeration=100)
        with self.assertRaises(TooLarge):
            brute_poincare(make_G_mn(2, 2), 2, 3, tight)


class KernelClassTests(unittest.TestCase):
    def setUp(self) -> None:
        lattice_registry.clear()

    def test_heisenberg_classes(self):
        classes = classify_kernels(make_G_mn(1, 1), 5)
        self.assertEqual([(c.key, c.members) for c in classes], [((3, 1), 1), ((1, 0), 4)])

    def test_g_2x2_classes(self):
        """Rank 0, 1 and 2 points of 2x2 matrices over F_2: 1, 9 and 6 of them."""
        classes = classify_kernels(make_G_mn(2, 2), 2)
        self.assertEqual([c.members for c in classes], [1, 9, 6])
        self.assertEqual([c.d_c for c in classes], [8, 6, 4])

    def test_classification_is_cached(self):
        G = make_G_mn(1, 2)
        classify_kernels(G, 3)
        self.assertIsNotNone(lattice_registry.get_classification(G.digest, 3))

    def test_chain_counts(self):
        G = make_G_mn(1, 1)
        zero, regular = classify_kernels(G, 3)
        self.assertEqual(enumerate_F_S(G, 3, [regular]), 2)
        self.assertEqual(enumerate_F_S(G, 3, []), 1)
        with self.assertRaises(NotASequence):
            enumerate_F_S(G, 3, [regular, zero])

    def test_g_2x2_chain_through_both_ranks(self):
        G = make_G_mn(2, 2)
        _, rank_one, rank_two = classify_kernels(G, 2)
        self.assertEqual(enumerate_F_S(G, 2, [rank_one, rank_two]), 9)

    def test_chain_counts_are_rank_count_products(self):
        for n in range(1, 4):
            for m in range(1, n + 1):
                for p in (2, 3):
                    G = make_G_mn(m, n)
                    by_rank = {(G.d - c.d_c) // 2: c for c in classify_kernels(G, p)}
                    for size in range(1, m + 1):
                        for ranks in itertools.combinations(range(1, m + 1), size):
                            expected = rank_count(m, n, ranks[0], p)
                            for low, high in zip(ranks, ranks[1:]):
                                expected *= rank_count(m - low, n - low, high - low, p)
                            with self.subTest(m=m, n=n, p=p, ranks=ranks):
                                chain = [by_rank[r] for r in ranks]
                                self.assertEqual(enumerate_F_S(G, p, chain), expected)

    def test_heisenberg_formula(self):
        for p in (2, 3, 5):
            result = thm_tech_eval(make_G_mn(1, 1), p, probe=False)
            self.assertEqual(result.value, RationalFn(1 - t, 1 - p * t))
            self.assertEqual(result.probe, ProbeStatus.NOT_RUN)

    def test_formula_matches_closed_form(self):
        for n in range(1, 4):
            for m in range(1, n + 1):
                for p in (2, 3):
                    with self.subTest(m=m, n=n, p=p):
                        result = thm_tech_eval(make_G_mn(m, n), p, probe=False)
                        self.assertEqual(result.value, local_multiplicative(m, n, p))

    def test_smoothness_verdict_is_attached_by_default(self):
        result = thm_tech_eval(make_G_mn(1, 2), 2)
        self.assertEqual(result.probe, ProbeStatus.PASS)


class SmoothnessTests(unittest.TestCase):
    def setUp(self) -> None:
        lattice_registry.clear()

    def test_family_passes(self):
        for m, n, p in ((1, 1, 2), (1, 1, 3), (1, 2, 2), (1, 2, 3), (1, 3, 2), (1, 3, 3),
                        (2, 2, 2), (2, 2, 3), (2, 3, 2), (2, 3, 3), (3, 3, 2), (3, 3, 3)):
            with self.subTest(m=m, n=n, p=p):
                report = smoothness_probe(make_G_mn(m, n), p)
                self.assertEqual(report.status, ProbeStatus.PASS)
                self.assertEqual(report.points, p ** (m * n))

    def test_rescaled_heisenberg_is_inconclusive(self):
        report = smoothness_probe(rescaled_heisenberg(2), 2)
        self.assertEqual(report.status, ProbeStatus.INCONCLUSIVE)
        self.assertEqual(report.inconclusive, [(1,)])
        self.assertEqual(smoothness_probe(rescaled_heisenberg(2), 3).status, ProbeStatus.PASS)

    def test_report_is_deterministic(self):
        first = smoothness_probe(rescaled_heisenberg(2), 2).as_dict()
        lattice_registry.clear()
        self.assertEqual(smoothness_probe(rescaled_heisenberg(2), 2).as_dict(), first)

    def test_abelian_summand_passes(self):
        self.assertEqual(smoothness_probe(direct_sum_abelian(make_G_mn(1, 1), 2), 3).status, ProbeStatus.PASS)


class AlphaTests(unittest.TestCase):
    def setUp(self) -> None:
        lattice_registry.clear()

    def test_family_triangle(self):
        for n in range(1, 4):
            for m in range(1, n + 1):
                for p in (2, 3, 5):
                    if p ** (m * n) > 10 ** 5:
                        continue
                    with self.subTest(m=m, n=n, p=p):
                        self.assertEqual(alpha(make_G_mn(m, n), p).alpha, Fraction(n + m - 1))

    def test_heisenberg_witness(self):
        report = alpha(make_G_mn(1, 1), 5)
        self.assertEqual(report.alpha, 1)
        self.assertNotEqual(report.witness, (0,))
        self.assertEqual(report.as_dict()["alpha"], "1")

    def test_abelian_has_no_admissible_functional(self):
        with self.assertRaises(NoAdmissibleOmega):
            alpha(abelian(2), 3)


if __name__ == "__main__":
    unittest.main()
