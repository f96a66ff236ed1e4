# Copyright (c) 2024 symmetric-toda contributors.
# SPDX-License-Identifier: GPL-3.0-or-later
from importlib import metadata

try:
    __version__ = metadata.version("symmetric-toda")
except metadata.PackageNotFoundError:  # pragma: nocover
    # Running from a source checkout that was never installed
    __version__ = "0.0.0+unknown"
