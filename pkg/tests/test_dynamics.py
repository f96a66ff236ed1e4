# Copyright (c) 2024 symmetric-toda contributors.
# SPDX-License-Identifier: GPL-3.0-or-later
import csv
import json

import numpy as np
import pytest

from symmetric_toda.actionangle import angle_variables
from symmetric_toda.dynamics import ReflectionHamiltonian
from symmetric_toda.dynamics import calibrate_time_constant
from symmetric_toda.dynamics import conservation_drift
from symmetric_toda.dynamics import crossval_residual
from symmetric_toda.dynamics import factorization_flow
from symmetric_toda.dynamics import gradient
from symmetric_toda.dynamics import gradient_spread
from symmetric_toda.dynamics import group_property_residual
from symmetric_toda.dynamics import hamiltonian_vector_field
from symmetric_toda.dynamics import simulate
from symmetric_toda.dynamics import slice_count
from symmetric_toda.dynamics import spectrum_drift
from symmetric_toda.dynamics import vector_field_flow
from symmetric_toda.dynamics import verify_flow_commutativity
from symmetric_toda.errors import InputError
from symmetric_toda.groups import ANElement
from symmetric_toda.groups import random_an_element
from symmetric_toda.utils import derive_rng

UNIPOTENT = ANElement([[1.0, 1.0], [0.0, 1.0]])


@pytest.fixture(scope="module")
def reference_constant():
    return calibrate_time_constant(ReflectionHamiltonian.single(1, 2), UNIPOTENT)


@pytest.mark.parametrize(
    ("text", "n", "name"),
    [
        ("1", 2, "H1"),
        ("1:2", 3, "2*H1"),
        ("2:0.5,1:1", 3, "H1+0.5*H2"),
        ("1:1,1:1", 2, "2*H1"),
    ],
)
def test_hamiltonian_parse(text, n, name):
    assert ReflectionHamiltonian.parse(text, n).name == name


@pytest.mark.parametrize(
    ("text", "n"),
    [
        ("x:1", 3),
        ("1:y", 3),
        ("3:1", 3),
        ("0:1", 3),
        ("1:0", 3),
        ("1:1,1:-1", 3),
    ],
)
def test_hamiltonian_parse_rejects(text, n):
    with pytest.raises(InputError):
        ReflectionHamiltonian.parse(text, n)


def test_hamiltonian_value():
    H = ReflectionHamiltonian.parse("1:1,2:1", 3)
    b = np.diag([2.0, 1.0, 0.5])
    assert H.value(b) == pytest.approx((4.0 + 1.0 + 0.25) + (16.0 + 1.0 + 0.0625))


def test_gradients_are_traceless():
    H = ReflectionHamiltonian.single(2, 4)
    b = random_an_element(4, derive_rng(0, "gradient"))
    for side in ("left", "right"):
        assert abs(np.trace(gradient(H, b, side).matrix)) < 1e-12
    with pytest.raises(InputError):
        gradient(H, b, "up")


def test_zero_time_is_identity():
    H = ReflectionHamiltonian.single(1, 3)
    b = random_an_element(3, derive_rng(1, "zero"))
    assert factorization_flow(H, b, 0.0) is b
    assert slice_count(H, b, 0.0) == 1
    assert slice_count(H, b, 2.5) >= 3


def test_flow_stays_in_an():
    H = ReflectionHamiltonian.single(1, 3)
    b = factorization_flow(H, random_an_element(3, derive_rng(2, "an")), 1.3)
    assert isinstance(b, ANElement)
    assert np.all(np.tril(b.matrix, -1) == 0.0)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_isospectral(n):
    rng = derive_rng(3, "isospectral", n)
    H = ReflectionHamiltonian.single(1, n)
    b = random_an_element(n, rng, 0.3)
    assert spectrum_drift(H, b, (0.5, 1.0, 2.0)) < 1e-9
    assert conservation_drift(H, b, (0.5, 1.0, 2.0)) < 1e-9


def test_group_property():
    H = ReflectionHamiltonian.parse("1:1,2:0.3", 3)
    b = random_an_element(3, derive_rng(4, "group"), 0.3)
    assert group_property_residual(H, b, 0.4, 0.7) < 1e-8


def test_reference_time_constant(reference_constant):
    assert abs(abs(reference_constant) - 1.0) < 1e-4


@pytest.mark.parametrize(
    ("text", "n"),
    [("1", 3), ("2", 3), ("1:0.7,2:0.2", 3), ("3", 4)],
)
def test_time_constant_is_invariant(text, n, reference_constant):
    H = ReflectionHamiltonian.parse(text, n)
    b = random_an_element(n, derive_rng(5, "calibration", text, n), 0.3)
    constant = calibrate_time_constant(H, b)
    assert abs(constant - reference_constant) / abs(reference_constant) < 1e-4


def test_crossval(reference_constant):
    H = ReflectionHamiltonian.single(1, 2)
    assert crossval_residual(H, UNIPOTENT, 0.5, reference_constant) < 1e-5


def test_crossval_n3(reference_constant):
    H = ReflectionHamiltonian.single(2, 3)
    b = random_an_element(3, derive_rng(6, "crossval"), 0.3)
    assert crossval_residual(H, b, 0.3, reference_constant) < 1e-5


def test_vector_field_is_upper_triangular():
    H = ReflectionHamiltonian.single(1, 3)
    field = hamiltonian_vector_field(H, random_an_element(3, derive_rng(7, "field")).matrix)
    assert np.all(np.tril(field, -1) == 0.0)


@pytest.mark.parametrize("dt", [0.0, -1e-3, 0.5])
def test_vector_field_flow_rejects_dt(dt):
    with pytest.raises(InputError):
        vector_field_flow(ReflectionHamiltonian.single(1, 2), UNIPOTENT, 1.0, dt)


def test_flows_commute():
    b = random_an_element(3, derive_rng(8, "commute"), 0.3)
    report = verify_flow_commutativity(
        ReflectionHamiltonian.single(1, 3),
        ReflectionHamiltonian.single(2, 3),
        b,
        0.7,
    )
    assert report.passed
    assert report.records[0].name == "commute[H1,H2]"


def test_simulate_single_step():
    H = ReflectionHamiltonian.single(1, 2)
    trajectory = simulate(H, UNIPOTENT, 0.0, 0.0, 1, angle_variables)
    assert len(trajectory.points) == 1
    point = trajectory.points[0]
    assert point.t == 0.0
    assert np.array_equal(point.b.matrix, UNIPOTENT.matrix)
    assert point.hamiltonian == pytest.approx(3.0)
    assert trajectory.columns() == [
        "t",
        "b11",
        "b12",
        "b22",
        "H",
        "h1",
        "h2",
        "r1",
        "r2",
        "theta12",
    ]


@pytest.mark.parametrize(
    ("t0", "t1", "steps"),
    [(0.0, 1.0, 0), (1.0, 0.0, 5), (0.5, 0.5, 3)],
)
def test_simulate_rejects_grid(t0, t1, steps):
    with pytest.raises(InputError):
        simulate(
            ReflectionHamiltonian.single(1, 2),
            UNIPOTENT,
            t0,
            t1,
            steps,
            angle_variables,
        )


def test_simulate_drift(tmp_path):
    H = ReflectionHamiltonian.single(1, 2)
    trajectory = simulate(H, UNIPOTENT, 0.0, 2.0, 41, angle_variables)
    statistics = trajectory.drift_statistics()
    assert statistics["points"] == 41
    assert statistics["action_drift"] < 1e-9
    assert statistics["hamiltonian_drift"] < 1e-9
    assert statistics["theta_fit_residual"] < 1e-6
    assert abs(statistics["theta_slopes"]["theta12"]) == pytest.approx(
        4.0 * np.sqrt(5.0),
        rel=1e-6,
    )

    path = tmp_path / "trajectory.csv"
    trajectory.write_csv(path)
    trajectory.write_sidecar(path.with_suffix(".json"))
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == trajectory.columns()
    assert len(rows) == 42
    with open(path.with_suffix(".json")) as f:
        sidecar = json.load(f)
    assert sidecar["schema_version"] == 1
    assert sidecar["hamiltonian"] == "H1"


def test_crossval_reference_case(reference_constant):
    H = ReflectionHamiltonian.single(1, 2)
    assert crossval_residual(H, UNIPOTENT, 1.0, reference_constant, dt=1e-3) < 1e-5


def test_crossval_fast_hamiltonian(reference_constant):
    H = ReflectionHamiltonian.single(4, 5, 1.5)
    b = random_an_element(5, derive_rng(9, "fast"), 0.3)
    t = min(0.1, 2.0 / gradient_spread(H, b))
    assert crossval_residual(H, b, t, reference_constant) < 1e-5


def test_rk4_shortens_steps_for_fast_fields():
    H = ReflectionHamiltonian.single(4, 5, 1.5)
    b = random_an_element(5, derive_rng(1, "fast"), 0.3)
    moved = vector_field_flow(H, b, 0.02)
    assert abs(float(np.prod(np.diag(moved.matrix))) - 1.0) < 1e-6
    spectrum = np.linalg.eigvalsh(b.matrix @ b.matrix.T)
    moved_spectrum = np.linalg.eigvalsh(moved.matrix @ moved.matrix.T)
    assert np.allclose(moved_spectrum, spectrum, rtol=1e-6)
