# Copyright (c) 2024 symmetric-toda contributors.
# SPDX-License-Identifier: GPL-3.0-or-later
import logging
import pathlib

import click
import click_aliases
from click_option_group import MutuallyExclusiveOptionGroup
from click_option_group import RequiredMutuallyExclusiveOptionGroup
from click_option_group import optgroup

from . import runner
from .checks.suites import SUITE_NAMES
from .config import DEFAULT_SAMPLES
from .config import RunConfig
from .errors import SymmetricTodaError
from .version import __version__

LOG_LEVELS = (logging.WARNING, logging.INFO, logging.DEBUG)

INPUT_PATH = click.Path(exists=True, dir_okay=False, path_type=pathlib.Path)
OUTPUT_PATH = click.Path(dir_okay=False, writable=True, path_type=pathlib.Path)

seed_option = click.option(
    "--seed",
    type=int,
    default=0,
    show_default=True,
    envvar="SYMMETRIC_TODA_SEED",
    help="Seed for every random sample; echoed into the reports.",
)


@click.group(cls=click_aliases.ClickAliasedGroup)
@click.version_option(version=__version__)
@click.option("-v", "--verbose", count=True, help="Log more (repeat for debug).")
def cli(verbose):
    """Poisson geometry and symmetric Toda flows on SL(n, R)/SO(n)."""
    logging.basicConfig(
        level=LOG_LEVELS[min(verbose, len(LOG_LEVELS) - 1)],
        format="%(levelname)s %(name)s: %(message)s",
    )


@cli.command("verify", aliases=["check"])
@click.option("--n", "n", type=int, required=True, help="Matrix size, 2 to 8.")
@seed_option
@click.option(
    "--tol",
    multiple=True,
    metavar="NAME=VALUE",
    help="Override a tolerance; may be repeated.",
)
@click.option(
    "--suite",
    "suites",
    multiple=True,
    type=click.Choice(SUITE_NAMES),
    help="Run only this suite; may be repeated (default: all).",
)
@click.option(
    "--samples",
    type=click.IntRange(min=1),
    default=DEFAULT_SAMPLES,
    show_default=True,
    help="Random points per sampled check.",
)
@click.option("--out", type=OUTPUT_PATH, help="Write the JSON report here.")
@click.pass_context
def verify_command(ctx, n, seed, tol, suites, samples, out):
    """Run the numerical verification suites."""
    try:
        config = RunConfig.from_options(
            n,
            seed=seed,
            tol=tol,
            samples=samples,
            suites=suites,
        )
    except SymmetricTodaError as e:
        click.echo(click.style(f"Error: {e}", fg="red"), err=True)
        ctx.exit(e.exit_code)
    ctx.exit(runner.verify(config, out=out))


@cli.command("simulate")
@click.option("--n", "n", type=int, help="Matrix size; read from --input if omitted.")
@seed_option
@optgroup("Initial point", cls=MutuallyExclusiveOptionGroup)
@optgroup.option(
    "--input",
    "input_path",
    type=INPUT_PATH,
    help='JSON file {"n": int, "rows": [[...]]} holding b0 in AN.',
)
@optgroup.option(
    "--random",
    "random_point",
    is_flag=True,
    default=False,
    help="Draw b0 from the seed (the default without --input).",
)
@click.option(
    "--hamiltonian",
    "-H",
    default="1:1.0",
    show_default=True,
    help="Linear combination of reflection Hamiltonians as k:c pairs.",
)
@click.option("--t0", type=float, default=0.0, show_default=True)
@click.option("--t1", type=float, default=2.0, show_default=True)
@click.option("--steps", type=int, default=200, show_default=True)
@click.option("--out", type=OUTPUT_PATH, help="Trajectory CSV; the sidecar gets .json.")
@click.pass_context
def simulate_command(
    ctx,
    n,
    seed,
    input_path,
    random_point,
    hamiltonian,
    t0,
    t1,
    steps,
    out,
):
    """Sample the factorization flow with action-angle diagnostics."""
    ctx.exit(
        runner.simulate(
            hamiltonian,
            n=n,
            input_path=input_path,
            seed=seed,
            t0=t0,
            t1=t1,
            steps=steps,
            out=out,
        ),
    )


@cli.command("leaf")
@click.option("--n", "n", type=int, help="Expected matrix size.")
@click.option("--input", "input_path", type=INPUT_PATH, required=True)
@click.pass_context
def leaf_command(ctx, n, input_path):
    """Classify the Bruhat cell and symplectic leaf of a point of AN."""
    ctx.exit(runner.leaf(input_path, n=n))


@cli.command("orbit-flow", aliases=["level-set"])
@click.option("--n", "n", type=int, help="Matrix size; read from --input if omitted.")
@seed_option
@click.option("--tol", multiple=True, metavar="NAME=VALUE")
@optgroup("Initial point", cls=RequiredMutuallyExclusiveOptionGroup)
@optgroup.option("--input", "input_path", type=INPUT_PATH)
@optgroup.option("--random", "random_point", is_flag=True, default=False)
@click.option(
    "--diagonal",
    "-D",
    "diagonals",
    multiple=True,
    metavar="D1,...,DN",
    help="Positive diagonal of determinant 1; may be repeated.",
)
@click.option("--out", type=OUTPUT_PATH, help="Write the JSON result here.")
@click.pass_context
def orbit_flow_command(ctx, n, seed, tol, input_path, random_point, diagonals, out):
    """Move b0 along its level set by positive diagonal matrices."""
    ctx.exit(
        runner.orbit_flow(
            diagonals,
            n=n,
            input_path=input_path,
            seed=seed,
            tol=tol,
            out=out,
        ),
    )


if __name__ == "__main__":
    cli()  # pragma: nocover
