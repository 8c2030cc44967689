import dataclasses
import os
import unittest
from pathlib import Path
from unittest.mock import patch

from config import Settings
from lib.exceptions import TooLarge


class SettingsLoadTests(unittest.TestCase):
    def test_defaults(self):
        with patch.dict(os.environ, {}, clear=True):
            loaded = Settings.load()
        self.assertEqual(loaded, Settings())

    def test_environment_overrides(self):
        env = {
            "LOG_LEVEL": "debug",
            "REPZETA_MAX_ENUMERATION": "1_000",
            "REPZETA_WORKERS": "4",
            "REPZETA_OUTPUT_FORMAT": "Structured",
            "REPZETA_UNSAFE_LIMITS": "yes",
        }
        with patch.dict(os.environ, env, clear=True):
            loaded = Settings.load()
        self.assertEqual(loaded.log_level, "DEBUG")
        self.assertEqual(loaded.max_enumeration, 1000)
        self.assertEqual(loaded.workers, 4)
        self.assertEqual(loaded.output_format, "structured")
        self.assertTrue(loaded.unsafe_limits)

    def test_rejects_bad_values(self):
        for env in (
            {"REPZETA_WORKERS": "0"},
            {"REPZETA_SEED": "siete"},
            {"REPZETA_OUTPUT_FORMAT": "html"},
            {"REPZETA_EULER_DIGITS": "10"},
        ):
            with self.subTest(env=env):
                with patch.dict(os.environ, env, clear=True):
                    with self.assertRaises(ValueError):
                        Settings.load()


class GuardTests(unittest.TestCase):
    def test_guard(self):
        tight = Settings(max_enumeration=10)
        tight.guard("enumeration", 10)
        with self.assertRaises(TooLarge) as ctx:
            tight.guard("enumeration", 11, "p^(N·d')")
        self.assertIn("p^(N·d')", str(ctx.exception))
        self.assertEqual(ctx.exception.exit_code, 3)
        dataclasses.replace(tight, unsafe_limits=True).guard("enumeration", 10 ** 12)


class LatticeCandidatesTests(unittest.TestCase):
    def test_bare_name_falls_back_to_fixture_directory(self):
        candidates = Settings().lattice_candidates("heisenberg")
        self.assertEqual(candidates[-1].name, "heisenberg.json")
        self.assertEqual(candidates[-1].parent.name, "lattices")
        self.assertTrue(candidates[-1].is_file())

    def test_absolute_path_is_used_as_is(self):
        path = Path("/tmp/otro.json")
        self.assertEqual(Settings().lattice_candidates(str(path)), [path])


if __name__ == "__main__":
    unittest.main()
