# Copyright (c) 2024 symmetric-toda contributors.
# SPDX-License-Identifier: GPL-3.0-or-later
"""Bodies of the command line sub-commands.

Every function returns an integer exit status: 0 on success, 1 when a
verification fails or a point is degenerate and 2 for malformed input.
"""
import logging

import click
import numpy as np

from .actionangle import angle_variables
from .actionangle import level_set_composition_check
from .actionangle import level_set_translate
from .actionangle import verify_level_set
from .bruhat import classify_leaf
from .checks.core import SCHEMA_VERSION
from .checks.rules import CheckContext
from .checks.suites import SuiteRunner
from .checks.suites import validate_suites
from .config import DEFAULT_TOLERANCES
from .config import parse_tolerance
from .config import validate_n
from .dynamics import ReflectionHamiltonian
from .dynamics import simulate as simulate_flow
from .errors import EXIT_FAILURE
from .errors import EXIT_OK
from .errors import InputError
from .errors import SymmetricTodaError
from .groups import ANElement
from .groups import random_an_element
from .utils import derive_rng
from .utils import dump_json
from .utils import load_matrix
from .utils import matrix_to_json

logger = logging.getLogger(__name__)


def _fail(error):
    click.echo(click.style(f"Error: {error}", fg="red"), err=True)
    return error.exit_code


def initial_point(n=None, input_path=None, seed=0, purpose="initial"):
    """Read b0 from a JSON file, or draw a seeded random point of AN.

    :param n: expected size; taken from the file when omitted
    :param input_path: :class:`pathlib.Path` of a ``{"n", "rows"}`` file
    :raises InputError: when the file is malformed, not in AN or of the
        wrong size
    """
    if input_path is not None:
        b0 = ANElement(load_matrix(input_path, "b0"))
        if n is not None and b0.n != n:
            raise InputError(f"--n {n} does not match the {b0.n}x{b0.n} input")
        return b0
    if n is None:
        raise InputError("--n is required without --input")
    validate_n(n)
    return random_an_element(n, derive_rng(seed, purpose, n), scale=0.5)


def verify(config, out=None):
    """Run verification suites and emit the JSON report.

    The report goes to *out* (a path) or to stdout; a one-line summary per
    suite goes to stderr.

    :param config: :class:`~symmetric_toda.config.RunConfig`
    :return: exit status
    """
    try:
        suites = validate_suites(config.suites)
        runner = SuiteRunner(CheckContext.from_config(config))
        reports = []
        for report in runner.run_all(suites):
            reports.append(report)
            color = None if report.passed else "red"
            click.echo(
                click.style(
                    f"{report.suite}: {'pass' if report.passed else 'FAIL'} "
                    f"(max residual {report.max_residual:.3e})",
                    fg=color,
                ),
                err=True,
            )
            for record in report.failures:
                click.echo(click.style(f"  - {record}", fg="red"), err=True)
    except SymmetricTodaError as e:
        return _fail(e)

    passed = all(report.passed for report in reports)
    document = {
        "schema_version": SCHEMA_VERSION,
        "n": config.n,
        "seed": config.seed,
        "pass": passed,
        "suites": [report.to_dict() for report in reports],
    }
    text = dump_json(document, out)
    if out is None:
        click.echo(text)
    return EXIT_OK if passed else EXIT_FAILURE


def simulate(
    hamiltonian,
    n=None,
    input_path=None,
    seed=0,
    t0=0.0,
    t1=2.0,
    steps=200,
    out=None,
):
    """Sample the factorization flow and write the trajectory.

    The CSV goes to *out* with the drift statistics next to it in a
    ``.json`` sidecar; without *out* the CSV is printed and the statistics
    go to stderr.
    """
    try:
        b0 = initial_point(n, input_path, seed, "simulate")
        H = ReflectionHamiltonian.parse(hamiltonian, b0.n)
        trajectory = simulate_flow(H, b0, t0, t1, steps, angle_variables)
    except SymmetricTodaError as e:
        return _fail(e)

    statistics = trajectory.drift_statistics()
    if out is None:
        click.echo(",".join(trajectory.columns()))
        for row in trajectory.rows():
            click.echo(",".join(f"{value:.17g}" for value in row))
        click.echo(dump_json(statistics), err=True)
    else:
        trajectory.write_csv(out)
        trajectory.write_sidecar(out.with_suffix(".json"))
        click.echo(f"Wrote {len(trajectory.points)} points to {click.format_filename(out)}")
    logger.info(
        "action drift %.3e, theta fit residual %.3e",
        statistics["action_drift"],
        statistics["theta_fit_residual"],
    )
    return EXIT_OK


def leaf(input_path, n=None):
    """Classify the symplectic leaf of the point stored in *input_path*."""
    try:
        b = initial_point(n, input_path)
        classification = classify_leaf(b)
    except SymmetricTodaError as e:
        return _fail(e)

    click.echo(f"Leaf classification for n={b.n}")
    for line in classification.lines():
        click.echo(line)
    if not classification.matches:
        click.echo(
            click.style(
                "Measured rank differs from the predicted leaf dimension.",
                fg="red",
            ),
        )
        return EXIT_FAILURE
    click.echo("Measured rank matches the predicted leaf dimension.")
    return EXIT_OK


def parse_diagonal(text):
    """Parse ``"d1,d2,...,dn"`` into an array.

    >>> parse_diagonal("2, 0.5").tolist()
    [2.0, 0.5]
    >>> parse_diagonal("2,x")
    Traceback (most recent call last):
    ...
    symmetric_toda.errors.InputError: malformed diagonal '2,x'
    """
    try:
        return np.array([float(item) for item in text.split(",")])
    except ValueError as e:
        raise InputError(f"malformed diagonal {text!r}") from e


def orbit_flow(diagonals, n=None, input_path=None, seed=0, tol=(), out=None):
    """Translate b0 along its level set by every D and report the results.

    :param diagonals: ``"d1,...,dn"`` strings, positive with product 1
    :param tol: ``name=value`` tolerance overrides
    """
    try:
        tolerances = dict(DEFAULT_TOLERANCES)
        tolerances.update(parse_tolerance(item) for item in tol)
        if not diagonals:
            raise InputError("at least one --diagonal is required")
        b0 = initial_point(n, input_path, seed, "orbit-flow")
        parsed = [parse_diagonal(text) for text in diagonals]
        translations = []
        for d in parsed:
            moved, beta = level_set_translate(b0, d)
            translations.append(
                {
                    "d": d.tolist(),
                    "b": matrix_to_json(moved.matrix),
                    "beta": matrix_to_json(beta.matrix),
                },
            )
        report = verify_level_set(
            b0,
            parsed,
            tolerance=tolerances["spectrum"],
            seed=seed,
        )
        if len(parsed) >= 2:
            gaps = level_set_composition_check(b0, parsed[0], parsed[1])
            report.add_note(
                "level-set-composition",
                "successive translations compared with each other and with D1 D2",
                **gaps,
            )
    except SymmetricTodaError as e:
        return _fail(e)

    document = {
        "schema_version": SCHEMA_VERSION,
        "n": b0.n,
        "seed": seed,
        "b0": matrix_to_json(b0.matrix),
        "translations": translations,
        "report": report.to_dict(),
    }
    text = dump_json(document, out)
    if out is None:
        click.echo(text)
    for record in report.failures:
        click.echo(click.style(f"- {record}", fg="red"), err=True)
    return EXIT_OK if report.passed else EXIT_FAILURE
