# Copyright (c) 2024 symmetric-toda contributors.
# SPDX-License-Identifier: GPL-3.0-or-later
from .core import CheckRecord
from .core import Note
from .core import Report
from .core import SCHEMA_VERSION

__all__ = (
    "CheckRecord",
    "Note",
    "Report",
    "SCHEMA_VERSION",
)
