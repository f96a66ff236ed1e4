# Copyright (c) 2024 symmetric-toda contributors.
# SPDX-License-Identifier: GPL-3.0-or-later
import dataclasses
import logging
import math

from ..errors import ConsistencyError
from ..errors import InputError
from ..errors import NumericalError
from . import rules
from .core import CheckRecord
from .core import Note
from .core import Report

logger = logging.getLogger(__name__)

SUITES = {
    "r-identities": (rules.RIdentities,),
    "bracket-axioms": (rules.BracketAxioms,),
    "sigma-tau": (
        rules.SigmaTauProperties,
        rules.IwasawaRoundTrip,
        rules.SigmaAntiPoisson,
        rules.TauPoisson,
    ),
    "an-tangency": (rules.ANTangency,),
    "kgk-commutativity": (
        rules.HamiltoniansCommute,
        rules.CommutationCorollary,
        rules.GradientPairing,
    ),
    "rm-pb": (rules.ReflectionMonodromyBracket,),
    "factor2": (rules.FactorTwoCorollary,),
    "t-pushforward": (rules.TPushforward,),
    "flow-crossval": (
        rules.TimeConstant,
        rules.CrossValidation,
        rules.Isospectrality,
        rules.Conservation,
        rules.GroupProperty,
        rules.FlowsCommute,
    ),
    "angle-linearity": (
        rules.AngleLinearity,
        rules.AnglePrefactor,
        rules.SpectralInvariants,
        rules.Sym2Angles,
        rules.Shapovalov,
    ),
    "leaf-dimension": (
        rules.LeafDimension,
        rules.PredictedParity,
        rules.CellRoundTrip,
        rules.ActionInvolution,
    ),
    "orbit-intersection": (
        rules.OrbitIntersection,
        rules.LevelSet,
        rules.LevelSetComposition,
    ),
}

SUITE_NAMES = tuple(SUITES)


def validate_suites(names):
    """Check suite names, returning them in the canonical order.

    >>> validate_suites(["rm-pb", "r-identities"])
    ('r-identities', 'rm-pb')
    >>> validate_suites(["nope"])
    Traceback (most recent call last):
    ...
    symmetric_toda.errors.InputError: unknown suite 'nope'
    """
    for name in names:
        if name not in SUITES:
            raise InputError(f"unknown suite {name!r}")
    if not names:
        return SUITE_NAMES
    return tuple(name for name in SUITE_NAMES if name in set(names))


@dataclasses.dataclass
class SuiteRunner:
    """Run named suites of checks in a shared :class:`~.rules.CheckContext`.

    A check that cannot be evaluated (for example a sample that lands on a
    degenerate point) contributes a failing record named after the check
    instead of aborting the suite.
    """

    context: rules.CheckContext

    def run(self, suite):
        """Run one suite.

        :param suite: one of :data:`SUITE_NAMES`
        :return: :class:`~symmetric_toda.checks.core.Report`
        """
        if suite not in SUITES:
            raise InputError(f"unknown suite {suite!r}")
        report = Report(suite, seed=self.context.seed)
        for check_class in SUITES[suite]:
            check = check_class()
            logger.info("[%s] %s", check.id, check.name)
            try:
                items = check.records(self.context)
            except (NumericalError, ConsistencyError) as e:
                logger.warning("%s could not be evaluated: %s", check.name, e)
                items = [
                    CheckRecord(
                        f"{check.name}-error",
                        math.inf,
                        self.context.tolerance(check.tolerance_key),
                        {"error": str(e)},
                    ),
                ]
            for item in items:
                if isinstance(item, Note):
                    report.add_note(item.name, item.message, **item.values)
                else:
                    report.add(item)
        logger.info(
            "%s: %d records, max residual %.3e",
            suite,
            len(report.records),
            report.max_residual,
        )
        return report

    def run_all(self, suites=()):
        """Yield a report per suite in canonical order."""
        for suite in validate_suites(suites):
            yield self.run(suite)
