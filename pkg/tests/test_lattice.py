import unittest

import numpy as np

from lib.exceptions import InvalidArgs, LengthMismatch, NotAdapted, NotUnimodular
from lib.lattice import (
    LieLattice,
    abelian,
    adapted_unimodular,
    base_change,
    commutator_matrix,
    direct_sum_abelian,
    evaluate_matrix,
    make_G_mn,
    rescaled_heisenberg,
    validate,
)


class FamilyTests(unittest.TestCase):
    def test_heisenberg_is_g_1x1(self):
        H = make_G_mn(1, 1)
        self.assertEqual((H.d, H.d_prime, H.m), (3, 1, 2))
        self.assertEqual(H.brackets(), {(1, 2): (1,)})
        self.assertEqual(H.labels, ("c1", "c2", "z11"))

    def test_g_2x3_shape(self):
        G = make_G_mn(2, 3)
        self.assertEqual((G.d, G.d_prime), (11, 6))
        self.assertEqual(len(G.brackets()), 6)
        self.assertEqual(G.brackets()[(2, 5)], (0, 0, 0, 0, 0, 1))
        self.assertTrue(validate(G).ok)

    def test_invalid_parameters(self):
        with self.assertRaises(InvalidArgs):
            make_G_mn(0, 2)

    def test_bracket_on_vectors(self):
        H = make_G_mn(1, 1)
        self.assertEqual(list(H.bracket([1, 0, 0], [0, 1, 0])), [1])
        self.assertEqual(list(H.bracket([0, 1, 0], [1, 0, 0])), [-1])
        self.assertEqual(list(H.bracket([2, 3, 5], [1, 1, 7])), [-1])

    def test_constructors(self):
        self.assertTrue(abelian(3).is_abelian())
        self.assertEqual(rescaled_heisenberg(3).brackets(), {(1, 2): (3,)})
        extended = direct_sum_abelian(make_G_mn(1, 1), 2)
        self.assertEqual((extended.d, extended.d_prime), (5, 1))
        self.assertEqual(extended.brackets(), {(1, 2): (1,)})
        self.assertEqual(extended.labels, ("c1", "c2", "a1", "a2", "z11"))
        self.assertTrue(validate(extended).ok)

    def test_huge_structure_constants_stay_exact(self):
        big = 2 ** 70
        L = LieLattice.from_brackets(3, 1, {(1, 2): [big]})
        self.assertEqual(L.tensor[0, 1, 0], big)
        self.assertEqual(L.tensor[1, 0, 0], -big)
        self.assertEqual(list(L.bracket([1, 0, 0], [0, 3, 0])), [3 * big])
        self.assertTrue(validate(L).ok)
        self.assertEqual(int(evaluate_matrix(commutator_matrix(L), [1])[0, 1]), big)
        self.assertEqual(make_G_mn(1, 1).tensor.dtype, np.int64)

    def test_document_and_digest(self):
        H = make_G_mn(1, 1)
        doc = H.to_document()
        self.assertEqual(doc["brackets"], [{"i": 1, "j": 2, "coeffs": [1]}])
        renamed = LieLattice.from_brackets(3, 1, {(1, 2): [1]}, name="otro")
        self.assertEqual(renamed.digest, H.digest)
        self.assertNotEqual(rescaled_heisenberg(2).digest, H.digest)


class ValidationTests(unittest.TestCase):
    def test_bracket_into_derived_block(self):
        L = LieLattice.from_brackets(3, 1, {(1, 2): [1], (1, 3): [1]})
        report = validate(L)
        self.assertFalse(report.ok)
        self.assertTrue(any("2-nilpotencia" in v for v in report.violations))

    def test_derived_rank_not_tight(self):
        L = LieLattice.from_brackets(4, 2, {(1, 2): [1, 0]})
        report = validate(L)
        self.assertTrue(any("rango derivado" in v for v in report.violations))

    def test_antisymmetry(self):
        array = np.zeros((3, 3, 1), dtype=object)
        array[...] = 0
        array[0, 1, 0] = 1
        report = validate(LieLattice.from_array(array))
        self.assertTrue(any("antisimetría" in v for v in report.violations))
        self.assertEqual(report.as_dict()["valid"], False)

    def test_bad_indices(self):
        with self.assertRaises(InvalidArgs):
            LieLattice.from_brackets(3, 1, {(2, 1): [1]})
        with self.assertRaises(LengthMismatch):
            LieLattice.from_brackets(3, 1, {(1, 2): [1, 0]})


class CommutatorMatrixTests(unittest.TestCase):
    def test_heisenberg(self):
        Cm = commutator_matrix(make_G_mn(1, 1))
        self.assertEqual((Cm.size, Cm.h), (2, 1))
        self.assertEqual(str(Cm), "[0, X1]\n[-X1, 0]")
        self.assertEqual(evaluate_matrix(Cm, [3]).tolist(), [[0, 3], [-3, 0]])

    def test_full_matrix_has_zero_derived_rows(self):
        Cm = commutator_matrix(make_G_mn(1, 2), trimmed=False)
        self.assertEqual(Cm.size, 5)
        R = evaluate_matrix(Cm, [1, 1])
        self.assertFalse(R[3:, :].any())
        self.assertFalse(R[:, 3:].any())

    def test_length_mismatch(self):
        with self.assertRaises(LengthMismatch):
            evaluate_matrix(commutator_matrix(make_G_mn(1, 1)), [1, 2])

    def test_large_values_fall_back_to_python_ints(self):
        Cm = commutator_matrix(make_G_mn(1, 1))
        big = 2 ** 70
        self.assertEqual(int(evaluate_matrix(Cm, [big])[0, 1]), big)


class BaseChangeTests(unittest.TestCase):
    def test_identity(self):
        G = make_G_mn(1, 2)
        self.assertEqual(base_change(G, np.eye(5, dtype=int).tolist()).structure, G.structure)

    def test_swapping_generators(self):
        """Swapping c1 and c2 flips the sign of [c1, c2]."""
        H = make_G_mn(1, 1)
        U = adapted_unimodular(3, 1, [("swap", 0, 1, 0)])
        self.assertEqual(base_change(H, U).brackets(), {(1, 2): (-1,)})

    def test_result_stays_valid(self):
        G = make_G_mn(2, 2)
        U = adapted_unimodular(8, 4, [("add", 0, 2, 3), ("neg", 5, 0, 0), ("add", 6, 4, -2), ("swap", 1, 3, 0)])
        self.assertTrue(validate(base_change(G, U)).ok)

    def test_rejections(self):
        H = make_G_mn(1, 1)
        with self.assertRaises(NotUnimodular):
            base_change(H, [[2, 0, 0], [0, 1, 0], [0, 0, 1]])
        with self.assertRaises(NotAdapted):
            base_change(H, [[1, 0, 1], [0, 1, 0], [0, 0, 1]])
        with self.assertRaises(NotAdapted):
            adapted_unimodular(3, 1, [("swap", 0, 2, 0)])
        with self.assertRaises(InvalidArgs):
            base_change(H, [[1, 0], [0, 1]])


if __name__ == "__main__":
    unittest.main()
