# Copyright (c) 2024 symmetric-toda contributors.
# SPDX-License-Identifier: GPL-3.0-or-later
import math

import pytest

from symmetric_toda.checks import CheckRecord
from symmetric_toda.checks import Note
from symmetric_toda.checks import Report
from symmetric_toda.checks import SCHEMA_VERSION
from symmetric_toda.checks import rules
from symmetric_toda.checks import suites
from symmetric_toda.config import RunConfig
from symmetric_toda.errors import DegeneracyError
from symmetric_toda.errors import InputError
from symmetric_toda.errors import VerificationFailure


def test_record_pass_and_fail():
    assert CheckRecord("a", 1e-13, 1e-12).passed
    assert not CheckRecord("a", 1e-11, 1e-12).passed
    assert not CheckRecord("a", math.nan, 1.0).passed
    assert not CheckRecord("a", math.inf, 1.0).passed


def test_report_to_dict():
    report = Report("demo", seed=9)
    report.add(CheckRecord("z", 0.0, 1.0, {"n": 2}))
    report.add(CheckRecord("a", math.inf, 1.0))
    report.add_note("info", "just a number", value=3)
    data = report.to_dict()
    assert data["suite"] == "demo"
    assert data["seed"] == 9
    assert data["schema_version"] == SCHEMA_VERSION
    assert data["pass"] is False
    assert data["max_residual"] is None
    assert [check["name"] for check in data["checks"]] == ["a", "z"]
    assert data["checks"][0]["residual"] is None
    assert data["checks"][1]["metadata"] == {"n": 2}
    assert data["notes"] == [{"name": "info", "message": "just a number", "value": 3}]


def test_raise_for_status():
    report = Report("demo", [CheckRecord("ok", 0.0, 1.0)])
    assert report.raise_for_status() is report
    report.add(CheckRecord("bad", 2.0, 1.0))
    with pytest.raises(VerificationFailure, match="demo: failed checks: bad"):
        report.raise_for_status()


def test_merge():
    first = Report("one", [CheckRecord("a", 0.0, 1.0)])
    second = Report("two", [CheckRecord("b", 0.5, 1.0)])
    second.add_note("n", "m")
    assert first.merge(second) is first
    assert [r.name for r in first.records] == ["a", "b"]
    assert first.max_residual == 0.5
    assert len(first.notes) == 1


def test_worst_records_keeps_largest_residual():
    records = [
        CheckRecord("x", 0.1, 1.0),
        CheckRecord("x", 0.3, 1.0),
        CheckRecord("y", 0.2, 1.0),
        CheckRecord("x", math.nan, 1.0),
        CheckRecord("x", 0.4, 1.0),
    ]
    worst = {r.name: r.residual for r in rules.worst_records(records)}
    assert math.isnan(worst["x"])
    assert worst["y"] == 0.2


def test_context_from_config():
    config = RunConfig.from_options(3, seed=5, tol=["crossval=1e-6"], samples=2)
    ctx = rules.CheckContext.from_config(config)
    assert ctx.n == 3
    assert ctx.samples == 2
    assert ctx.flow_samples == 2
    assert ctx.tolerance("crossval") == 1e-6
    assert ctx.rng("a").uniform() == ctx.rng("a").uniform()
    assert ctx.rng("a").uniform() != ctx.rng("b").uniform()


def test_every_check_names_a_known_tolerance():
    config = RunConfig(2)
    for checks in suites.SUITES.values():
        for check in checks:
            assert check.tolerance_key in config.tolerances, check.name


def test_check_ids_are_unique():
    ids = [check.id for checks in suites.SUITES.values() for check in checks]
    assert len(ids) == len(set(ids))


def test_suite_names():
    assert len(suites.SUITE_NAMES) == 12
    assert suites.validate_suites(()) == suites.SUITE_NAMES
    with pytest.raises(InputError):
        suites.validate_suites(["missing"])


def test_r_identities_suite():
    runner = suites.SuiteRunner(rules.CheckContext(n=3, seed=1, samples=2))
    report = runner.run("r-identities")
    assert report.passed
    assert report.seed == 1
    assert {note["name"] for note in report.notes} == {"reflection-rhs-difference"}


@pytest.mark.parametrize(
    "suite",
    ["an-tangency", "t-pushforward", "sigma-tau", "rm-pb", "factor2", "leaf-dimension"],
)
def test_cheap_suites_pass(suite):
    runner = suites.SuiteRunner(rules.CheckContext(n=3, seed=2, samples=3))
    report = runner.run(suite)
    assert report.passed, [str(r) for r in report.failures]
    names = [r.name for r in report.records]
    assert len(names) == len(set(names))


def test_flow_suite_records_time_constant():
    runner = suites.SuiteRunner(rules.CheckContext(n=2, seed=3, samples=1))
    report = runner.run("flow-crossval")
    assert report.passed, [str(r) for r in report.failures]
    (note,) = [note for note in report.notes if note["name"] == "time-constant"]
    assert abs(abs(note["lambda"]) - 1.0) < 1e-4


class Broken(rules.Check):
    id = "X1"
    name = "broken"
    tolerance_key = "algebra"

    def run(self, ctx):
        yield Note("before", "emitted before failing")
        raise DegeneracyError("spectrum is degenerate")


def test_check_errors_become_failed_records(monkeypatch):
    monkeypatch.setitem(suites.SUITES, "r-identities", (rules.RIdentities, Broken))
    report = suites.SuiteRunner(rules.CheckContext(n=2)).run("r-identities")
    assert not report.passed
    (failure,) = report.failures
    assert failure.name == "broken-error"
    assert failure.metadata == {"error": "spectrum is degenerate"}
    assert report.to_dict()["max_residual"] is None


def test_unknown_suite():
    with pytest.raises(InputError):
        suites.SuiteRunner(rules.CheckContext(n=2)).run("nope")


def test_bracket_axioms_use_enough_triples():
    records = rules.BracketAxioms().records(rules.CheckContext(n=2, seed=6, samples=2))
    jacobi = {r.name: r for r in records}["jacobi"]
    assert jacobi.metadata == {"samples": rules.JACOBI_TRIPLES}
    assert jacobi.passed


def test_crossval_time_follows_gradient_spread():
    ctx = rules.CheckContext(n=4, seed=1, samples=1)
    (record,) = rules.CrossValidation().records(ctx)
    assert record.passed, str(record)
    assert 0.0 < record.metadata["t"] <= 0.1


def test_star_import_exports():
    namespace = {}
    exec("from symmetric_toda.checks import *", namespace)
    assert {"CheckRecord", "Note", "Report", "SCHEMA_VERSION"} <= set(namespace)
