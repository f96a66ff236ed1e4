# Copyright (c) 2024 symmetric-toda contributors.
# SPDX-License-Identifier: GPL-3.0-or-later
"""
Poisson geometry and reflection-monodromy dynamics on SL(n, R)/SO(n).

The package evaluates the standard r-matrix Poisson structure, factorizes
group elements (Iwasawa, reverse Cholesky), runs the factorization flow of
the symmetric Toda hierarchy with its action-angle variables, and
classifies symplectic leaves of AN through double Bruhat cells. Every
statement it relies on is also available as a numerical check.
"""
from .cli import cli
from .version import __version__  # noqa: F401 imported but unused

if __name__ == "__main__":  # pragma: nocover
    cli()
