# -*- coding: utf-8 -*-
"""
    lib.enums

    Defines all library enumerations
"""
from enum import Enum


class QMode(Enum):
    """
    How the residue cardinality q is treated.

    SYMBOLIC: q stays an indeterminate.
    NUMERIC: q is specialised to a prime (or prime power).
    """
    SYMBOLIC = "symbolic"
    NUMERIC = "numeric"


class ProbeStatus(Enum):
    """
    Verdict of the geometric-smoothness probe.

    PASS: both conditions certified on the tested data.
    FAIL: a counterexample to the isolation condition was found.
    INCONCLUSIVE: the lifting condition could not be certified at some point.
    NOT_RUN: the probe was skipped.
    """
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"
    NOT_RUN = "not_run"


class OutputFormat(Enum):
    """
    Rendering of command results.
    """
    TEXT = "text"
    LATEX = "latex"
    STRUCTURED = "structured"


class LocalForm(Enum):
    """
    Shape in which a local zeta function of G_{m x n} is produced.
    """
    ADDITIVE = "additive"
    MULTIPLICATIVE = "multiplicative"
    PRODUCT = "product"
    SERIES = "series"


class IdentityId(Enum):
    """
    Identities that `verify-identity` can check.
    """
    SV = "sv-1.5"
    TRANSLATION = "translation"
    RANK_COUNT = "rank-count"
