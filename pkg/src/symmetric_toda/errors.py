# Copyright (c) 2024 symmetric-toda contributors.
# SPDX-License-Identifier: GPL-3.0-or-later
"""Exception hierarchy shared by the library and the command line.

The command line maps these onto its exit status contract:

- :class:`InputError` → 2
- :class:`NumericalError` (and :class:`DegeneracyError`),
  :class:`ConsistencyError`, :class:`VerificationFailure` → 1
"""

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2


class SymmetricTodaError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = EXIT_FAILURE


class InputError(SymmetricTodaError, ValueError):
    """Malformed or out-of-domain input."""

    exit_code = EXIT_INPUT


class NumericalError(SymmetricTodaError, ArithmeticError):
    """A computation could not be carried out reliably in floating point."""


class DegeneracyError(NumericalError):
    """The point is non-generic for the requested construction."""


class ConsistencyError(SymmetricTodaError, AssertionError):
    """An internal convention produced an impossible value."""


class VerificationFailure(SymmetricTodaError):
    """A verification report contains failing records.

    :param report: the failing :class:`~symmetric_toda.checks.core.Report`
    """

    def __init__(self, report):
        self.report = report
        names = ", ".join(record.name for record in report.failures)
        super().__init__(f"{report.suite}: failed checks: {names}")
