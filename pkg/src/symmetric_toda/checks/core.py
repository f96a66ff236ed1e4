# Copyright (c) 2024 symmetric-toda contributors.
# SPDX-License-Identifier: GPL-3.0-or-later
import dataclasses
import math
import operator
import typing

from ..errors import VerificationFailure

SCHEMA_VERSION = 1


@dataclasses.dataclass
class CheckRecord:
    """Outcome of one numerical check."""

    name: str
    residual: float
    tolerance: float
    metadata: typing.Dict[str, typing.Any] = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        self.residual = float(self.residual)
        self.tolerance = float(self.tolerance)

    @property
    def passed(self):
        return math.isfinite(self.residual) and self.residual <= self.tolerance

    def to_dict(self):
        data = {
            "name": self.name,
            "residual": self.residual if math.isfinite(self.residual) else None,
            "tol": self.tolerance,
            "pass": self.passed,
        }
        if self.metadata:
            data["metadata"] = self.metadata
        return data

    def __str__(self):
        status = "ok" if self.passed else "FAILED"
        return (
            f"{self.name}: residual {self.residual:.3e} "
            f"(tol {self.tolerance:.1e}) {status}"
        )


@dataclasses.dataclass
class Note:
    """An informational measurement attached to a report."""

    name: str
    message: str
    values: typing.Dict[str, typing.Any] = dataclasses.field(default_factory=dict)


@dataclasses.dataclass
class Report:
    """Records produced by one suite of checks.

    The report passes iff every record passes. Notes carry informational
    measurements that never affect the outcome. Records are appended from
    a single thread.

    Example usage:

    >>> report = Report("demo", seed=3)
    >>> report.add(CheckRecord("b-check", 1e-14, 1e-12))
    >>> report.add(CheckRecord("a-check", 0.5, 1e-12))
    >>> report.passed
    False
    >>> for record in report.sorted_records():
    ...     print(record)
    ...
    a-check: residual 5.000e-01 (tol 1.0e-12) FAILED
    b-check: residual 1.000e-14 (tol 1.0e-12) ok
    """

    suite: str
    records: typing.List[CheckRecord] = dataclasses.field(default_factory=list)
    seed: typing.Optional[int] = None
    notes: typing.List[typing.Dict[str, typing.Any]] = dataclasses.field(
        default_factory=list,
    )

    def add(self, record):
        self.records.append(record)

    def extend(self, records):
        for record in records:
            self.add(record)

    def add_note(self, name, message, **values):
        """Attach an informational measurement."""
        self.notes.append({"name": name, "message": message, **values})

    def merge(self, other):
        """Fold the records and notes of *other* into this report."""
        self.extend(other.records)
        self.notes.extend(other.notes)
        return self

    @property
    def passed(self):
        return all(record.passed for record in self.records)

    @property
    def failures(self):
        return [record for record in self.sorted_records() if not record.passed]

    @property
    def max_residual(self):
        finite = [r.residual for r in self.records if math.isfinite(r.residual)]
        if len(finite) != len(self.records):
            return math.inf
        return max(finite, default=0.0)

    def sorted_records(self):
        return sorted(self.records, key=operator.attrgetter("name"))

    def raise_for_status(self):
        """Raise :class:`VerificationFailure` when any record failed."""
        if not self.passed:
            raise VerificationFailure(self)
        return self

    def to_dict(self):
        max_residual = self.max_residual
        return {
            "suite": self.suite,
            "seed": self.seed,
            "schema_version": SCHEMA_VERSION,
            "pass": self.passed,
            "max_residual": max_residual if math.isfinite(max_residual) else None,
            "checks": [record.to_dict() for record in self.sorted_records()],
            "notes": list(self.notes),
        }
