# Copyright (c) 2024 symmetric-toda contributors.
# SPDX-License-Identifier: GPL-3.0-or-later
from .cli import cli

cli()
