import json
import tempfile
import unittest
from pathlib import Path

import server  # noqa: F401  binds the FastMCP instance and registers the tools
from lib.exactalg import RationalFn, parse_ratfn, var
from lib.lattice_registry import lattice_registry
from lib.tools import family, identities, lattices

t, q = var("t"), var("q")


class LatticeToolTests(unittest.TestCase):
    def setUp(self) -> None:
        lattice_registry.clear()

    def test_load_and_list(self):
        loaded = json.loads(lattices.load_lattice("heisenberg.json"))
        self.assertTrue(loaded["success"])
        self.assertEqual((loaded["name"], loaded["d"], loaded["d_prime"]), ("heisenberg", 3, 1))

        listed = json.loads(lattices.list_lattices())
        self.assertEqual(listed["count"], 1)
        self.assertEqual(listed["lattices"][0]["digest"], loaded["digest"])

    def test_load_under_another_name(self):
        loaded = json.loads(lattices.load_lattice("g_2x2.json", name="g22"))
        self.assertEqual(loaded["name"], "g22")
        info = json.loads(lattices.lattice_info("g22"))
        self.assertTrue(info["validation"]["valid"])
        self.assertEqual(info["lattice"]["d_prime"], 4)

    def test_invalid_file_reports_violations(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "roto.json"
            path.write_text('{"d": 3, "d_prime": 1, "brackets": [{"i": 2, "j": 3, "coeffs": [1]}]}', encoding="utf-8")
            result = json.loads(lattices.load_lattice(str(path)))
        self.assertFalse(result["success"])
        self.assertEqual(result["kind"], "ValidationError")
        self.assertTrue(any("2-nilpotencia" in v for v in result["violations"]))

    def test_unknown_lattice(self):
        result = json.loads(lattices.lattice_info("no_existe"))
        self.assertFalse(result["success"])
        self.assertIn("no_existe", result["error"])

    def test_poincare_brute_on_family(self):
        result = json.loads(lattices.poincare_brute("G_1x1", 3, 3))
        self.assertTrue(result["success"])
        self.assertEqual(result["coefficients"], ["1", "2", "6", "18"])

    def test_thm_tech_with_probe(self):
        result = json.loads(lattices.thm_tech("G_1x2", 2))
        self.assertTrue(result["success"])
        self.assertEqual(result["smoothness_probe"], "pass")
        self.assertEqual(parse_ratfn(result["value"]), RationalFn(1 - t, 1 - 4 * t))
        self.assertEqual(sum(c["members"] for c in result["classes"]), 4)

    def test_alpha_and_smoothness(self):
        report = json.loads(lattices.alpha("heisenberg", 3))
        self.assertEqual(report["alpha"], "1")
        probe = json.loads(lattices.smoothness("rescaled_heisenberg_p2.json", 2))
        self.assertEqual(probe["status"], "inconclusive")

    def test_library_errors_carry_their_kind(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "abeliano.json"
            path.write_text('{"name": "abeliano", "d": 2, "d_prime": 0, "brackets": []}', encoding="utf-8")
            result = json.loads(lattices.alpha(str(path), 3))
        self.assertFalse(result["success"])
        self.assertEqual(result["kind"], "NoAdmissibleOmega")


class FamilyToolTests(unittest.TestCase):
    def test_local_zeta_forms(self):
        multiplicative = json.loads(family.local_zeta(1, 1))
        self.assertEqual(multiplicative["value"], "(1 - t) / (1 - q*t)")
        self.assertTrue(multiplicative["functional_equation"])

        product = json.loads(family.local_zeta(2, 2, form="product"))
        self.assertEqual(parse_ratfn(product["value"]), parse_ratfn(json.loads(family.local_zeta(2, 2))["value"]))

        series = json.loads(family.local_zeta(1, 1, q=2, form="series", order=3))
        self.assertEqual(series["value"], "1 + t + 2*t^2 + 4*t^3")
        self.assertNotIn("functional_equation", series)

    def test_local_zeta_errors(self):
        self.assertFalse(json.loads(family.local_zeta(1, 1, form="cúbica"))["success"])
        rejected = json.loads(family.local_zeta(1, 1, q=3, form="product"))
        self.assertEqual(rejected["kind"], "InvalidArgs")

    def test_global_zeta(self):
        coeffs = json.loads(family.global_zeta(1, 1, coeffs=8))
        self.assertEqual(coeffs["coefficients"], [1, 1, 2, 2, 4, 2, 6, 4])
        euler = json.loads(family.global_zeta(1, 1, eval_s="3", places=10))
        self.assertEqual(euler["places"], 4)
        self.assertIsNotNone(euler["exact"])
        self.assertFalse(json.loads(family.global_zeta(1, 1))["success"])
        self.assertEqual(json.loads(family.global_zeta(2, 2, eval_s="4"))["kind"], "DivergentRegion")

    def test_topological_and_central_product(self):
        topo = json.loads(family.topological_zeta(1, 1))
        self.assertEqual(topo["value"], "s / (s - 1)")
        self.assertTrue(topo["matches_product_form"])
        central = json.loads(family.central_product_zeta(2, 3, 2))
        self.assertEqual(central["global_abscissa"], "5/2")
        self.assertEqual(central["local_abscissa"], "2")


class IdentityToolTests(unittest.TestCase):
    def test_each_identity(self):
        self.assertTrue(json.loads(identities.verify_identity("sv-1.5", j=2))["verified"])
        translation = json.loads(identities.verify_identity("translation", j=3, a=1, subset=[0, 2]))
        self.assertEqual((translation["subsets"], translation["verified"]), (1, True))
        ranks = json.loads(identities.verify_identity("rank-count", j=2, i=1, p=3))
        self.assertEqual([row["formula"] for row in ranks["ranks"]], [1, 8])

    def test_random_mode_records_seed(self):
        result = json.loads(identities.verify_identity("sv-1.5", j=3, mode="random", trials=4, seed=5))
        self.assertEqual(result["seed"], 5)
        self.assertEqual(len(result["points"]), 4)

    def test_errors(self):
        self.assertFalse(json.loads(identities.verify_identity("otra", j=2))["success"])
        self.assertEqual(json.loads(identities.verify_identity("translation", j=2))["kind"], "InvalidArgs")
        self.assertEqual(json.loads(identities.verify_identity("sv-1.5", j=5))["kind"], "TooLarge")


if __name__ == "__main__":
    unittest.main()
