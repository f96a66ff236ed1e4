# Copyright (c) 2024 symmetric-toda contributors.
# SPDX-License-Identifier: GPL-3.0-or-later
import hypothesis
import hypothesis.strategies as st
import numpy as np
import pytest

from symmetric_toda.actionangle import angle_prefactor_check
from symmetric_toda.actionangle import angle_time_grid
from symmetric_toda.actionangle import angle_variables
from symmetric_toda.actionangle import eigenvalue_function
from symmetric_toda.actionangle import level_set_composition_check
from symmetric_toda.actionangle import level_set_translate
from symmetric_toda.actionangle import measure_angle_rates
from symmetric_toda.actionangle import orbit_leaf_intersection_dim
from symmetric_toda.actionangle import rate_eigenvalues
from symmetric_toda.actionangle import shapovalov_check
from symmetric_toda.actionangle import spectral_decomposition
from symmetric_toda.actionangle import sym2_angle_variables
from symmetric_toda.actionangle import verify_angle_linearity
from symmetric_toda.actionangle import verify_level_set
from symmetric_toda.dynamics import ReflectionHamiltonian
from symmetric_toda.dynamics import factorization_flow
from symmetric_toda.errors import DegeneracyError
from symmetric_toda.errors import InputError
from symmetric_toda.groups import ANElement
from symmetric_toda.groups import random_an_element
from symmetric_toda.symspace import reflection_monodromy
from symmetric_toda.utils import derive_rng

UNIPOTENT = ANElement([[1.0, 1.0], [0.0, 1.0]])
TIMES = np.linspace(0.0, 0.5, 6)


def test_spectral_decomposition_invariants():
    b = random_an_element(4, derive_rng(0, "spectral"))
    monodromy = reflection_monodromy(b).matrix
    spectrum = spectral_decomposition(monodromy)
    assert np.all(np.diff(spectrum.eigenvalues) < 0.0)
    for name, value in spectrum.invariant_residuals(monodromy).items():
        assert value < 1e-9, name


@pytest.mark.parametrize(
    "matrix",
    [
        [[1.0, 2.0], [0.0, 1.0]],
        [[2.0, 0.0], [0.0, 2.0]],
        [[-1.0, 0.0], [0.0, -1.0]],
    ],
)
def test_spectral_decomposition_rejects(matrix):
    with pytest.raises(InputError):
        spectral_decomposition(matrix)


def test_degenerate_spectrum():
    with pytest.raises(DegeneracyError):
        angle_variables(ANElement(np.eye(3)))


def test_unipotent_angles():
    data = angle_variables(UNIPOTENT)
    golden = (1.0 + np.sqrt(5.0)) / 2.0
    assert data.spectrum.eigenvalues == pytest.approx([golden**2, golden**-2])
    assert data.r == pytest.approx([0.2763932022500210, 0.7236067977499790])
    assert list(data.theta) == [(1, 2)]
    assert data.theta[(1, 2)] == pytest.approx(np.log(data.r[0] / data.r[1]))


@hypothesis.settings(deadline=None, max_examples=25)
@hypothesis.given(st.integers(min_value=2, max_value=5), st.integers(0, 2**32 - 1))
def test_pairings_sum_to_one(n, seed):
    b = random_an_element(n, derive_rng(seed, "pairings", n))
    assert abs(float(np.sum(angle_variables(b).r)) - 1.0) < 1e-10


@pytest.mark.parametrize("n", [2, 3])
def test_sym2_agrees_with_closed_form(n):
    b = random_an_element(n, derive_rng(1, "sym2", n))
    assert np.allclose(sym2_angle_variables(b).r, angle_variables(b).r, atol=1e-9)


def test_shapovalov():
    assert shapovalov_check(3, derive_rng(2, "shapovalov"), samples=5).passed


def test_rate_eigenvalues_for_h1():
    rates = rate_eigenvalues(ReflectionHamiltonian.single(1, 2), UNIPOTENT)
    assert rates[0] - rates[1] == pytest.approx(2.0 * np.sqrt(5.0))


def test_reference_slope():
    slopes, residuals, _ = measure_angle_rates(
        ReflectionHamiltonian.single(1, 2),
        UNIPOTENT,
        TIMES,
    )
    assert abs(slopes[(1, 2)]) == pytest.approx(4.0 * np.sqrt(5.0), rel=1e-6)
    assert residuals[(1, 2)] < 1e-6


def test_measure_angle_rates_needs_a_grid():
    with pytest.raises(InputError):
        measure_angle_rates(ReflectionHamiltonian.single(1, 2), UNIPOTENT, [0.0, 0.1])


@pytest.mark.parametrize(("k", "n"), [(1, 3), (2, 3), (1, 4), (2, 4)])
def test_angle_linearity(k, n):
    b = random_an_element(n, derive_rng(3, "linearity", k, n), 0.3)
    report = verify_angle_linearity(ReflectionHamiltonian.single(k, n), b, TIMES)
    assert report.passed, [str(r) for r in report.failures]
    (note,) = report.notes
    assert abs(note["delta"]) == pytest.approx(4.0 * k, rel=1e-6)


def test_angle_prefactor():
    b = random_an_element(3, derive_rng(4, "prefactor"), 0.3)
    H = ReflectionHamiltonian.parse("1:1,2:0.5", 3)
    assert angle_prefactor_check(H, b, TIMES).passed


def test_eigenvalue_function_gradient():
    b = random_an_element(3, derive_rng(5, "eigenvalue"))
    for alpha in (1, 2, 3):
        assert eigenvalue_function(alpha).differential_discrepancy(b) < 1e-5


def test_level_set_identity_and_spectrum():
    b = random_an_element(3, derive_rng(6, "level-set"))
    moved, beta = level_set_translate(b, np.ones(3))
    assert np.allclose(moved.matrix, b.matrix, atol=1e-10)
    assert np.allclose(beta.matrix, np.eye(3), atol=1e-10)
    report = verify_level_set(b, [[2.0, 1.0, 0.5], [0.5, 0.5, 4.0]])
    assert report.passed, [str(r) for r in report.failures]


@pytest.mark.parametrize(
    "d",
    [
        [2.0, 2.0, 2.0],
        [2.0, -1.0, -0.5],
        [1.0, 1.0],
        np.diag([2.0, 1.0, 0.5]) + 0.1,
    ],
)
def test_level_set_rejects_bad_diagonal(d):
    b = random_an_element(3, derive_rng(7, "bad-d"))
    with pytest.raises(InputError):
        level_set_translate(b, d)


def test_level_set_composition_is_informational():
    b = random_an_element(3, derive_rng(8, "composition"))
    gaps = level_set_composition_check(b, [2.0, 1.0, 0.5], [0.5, 0.5, 4.0])
    assert set(gaps) == {"commutator", "composition"}
    assert all(value >= 0.0 for value in gaps.values())


@pytest.mark.parametrize("n", [2, 3, 4])
def test_orbit_leaf_intersection(n):
    b = random_an_element(n, derive_rng(9, "orbit", n))
    assert orbit_leaf_intersection_dim(b) == n - 1


def test_angle_time_grid_shortens_for_fast_flows():
    H = ReflectionHamiltonian.single(4, 5, 1.5)
    b = random_an_element(5, derive_rng(10, "window"), 0.5)
    grid = angle_time_grid(H, b)
    assert len(grid) == 6
    assert grid[0] == 0.0
    assert grid[-1] < 0.5
    for t in grid:
        assert angle_variables(factorization_flow(H, b, t)).r.min() > 1e-7
    report = angle_prefactor_check(H, b, grid)
    assert report.passed, [str(r) for r in report.failures]


def test_angle_time_grid_keeps_slow_flows():
    grid = angle_time_grid(ReflectionHamiltonian.single(1, 2), UNIPOTENT)
    assert np.allclose(grid, TIMES)
