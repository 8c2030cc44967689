# -*- coding: utf-8 -*-
"""
    lib.exceptions

    Defines all library exceptions
"""


class ZetaException(Exception):
    """
    Represent a controlled exception raised by the library.
    """
    exit_code = 1

    def __init__(self, msg):
        super().__init__(msg)
        self.msg = msg

    def __str__(self):
        return self.msg


class InvalidArgs(ZetaException):
    """Arguments outside the operation's domain."""
    exit_code = 2


class TooLarge(ZetaException):
    """An enumeration guard was exceeded."""
    exit_code = 3


class NonUnitDenominator(ZetaException):
    """The denominator vanishes at t = 0, so no power series exists."""


class SpecializationPole(ZetaException):
    """A specialization hit a zero denominator."""


class NotUnimodular(ZetaException):
    """Base-change matrix is not invertible over the integers."""
    exit_code = 2


class NotAdapted(ZetaException):
    """Base-change matrix does not preserve the derived sublattice."""
    exit_code = 2


class LengthMismatch(ZetaException):
    """Vector length does not match the number of variables."""
    exit_code = 2


class PairingViolation(ZetaException):
    """Elementary-divisor valuations of an alternating matrix did not pair up."""


class NotASequence(ZetaException):
    """Kernel classes are not strictly decreasing in kernel dimension."""
    exit_code = 2


class NoAdmissibleOmega(ZetaException):
    """Every functional is degenerate."""


class DivergentRegion(ZetaException):
    """Evaluation point lies on or left of the abscissa of convergence."""
    exit_code = 2


class UnbalancedDegrees(ZetaException):
    """Numerator and denominator factor counts differ."""


class EntireFunction(ZetaException):
    """A factorization without denominator factors has no finite abscissa."""


class ParseError(ZetaException):
    """Malformed text or lattice document."""
    exit_code = 2


class ValidationError(ZetaException):
    """A lattice document breaks one or more lattice invariants."""
    exit_code = 2

    def __init__(self, msg, violations=None):
        super().__init__(msg)
        self.violations = list(violations or [])


class ExponentOverflow(ZetaException):
    """An exponent left the machine-word range."""
