# Copyright (c) 2024 symmetric-toda contributors.
# SPDX-License-Identifier: GPL-3.0-or-later
import hypothesis
import hypothesis.extra.numpy
import hypothesis.strategies as st
import numpy as np
import pytest
import scipy.linalg

from symmetric_toda.errors import InputError
from symmetric_toda.groups import ANElement
from symmetric_toda.groups import random_an_element
from symmetric_toda.groups import random_group_element
from symmetric_toda.poisson import bivector_at
from symmetric_toda.poisson import bivector_matrix
from symmetric_toda.poisson import bivector_rank
from symmetric_toda.poisson import bracket_matrix
from symmetric_toda.poisson import contract_bivector
from symmetric_toda.poisson import coordinate_function
from symmetric_toda.poisson import poisson_bracket
from symmetric_toda.poisson import random_polynomial_function
from symmetric_toda.poisson import reflection_trace
from symmetric_toda.poisson import trace_power
from symmetric_toda.poisson import verify_AN_tangency
from symmetric_toda.poisson import verify_bracket_axioms
from symmetric_toda.poisson import verify_KGK_commutativity
from symmetric_toda.poisson import verify_sigma_antipoisson
from symmetric_toda.rootdata import standard_r_matrix
from symmetric_toda.utils import derive_rng


def dense_bivector(g):
    """(Ad_{g⁻¹} ⊗ Ad_{g⁻¹}) r - r from the full n² x n² r-matrix."""
    n = g.shape[0]
    adjoint = np.kron(np.linalg.inv(g), g.T)
    r = standard_r_matrix(n).as_matrix()
    return adjoint @ r @ adjoint.T - r


@pytest.mark.parametrize("n", [2, 3, 4])
def test_bivector_matches_dense_formula(n):
    g = random_group_element(n, derive_rng(1, "dense", n)).matrix
    assert np.allclose(bivector_matrix(g), dense_bivector(g), atol=1e-10)


@hypothesis.given(
    hypothesis.extra.numpy.arrays(
        np.float64,
        (3, 3),
        elements=st.floats(min_value=-0.8, max_value=0.8),
    ),
)
def test_bivector_is_skew(generator):
    g = scipy.linalg.expm(generator - np.trace(generator) / 3 * np.eye(3))
    eta = bivector_matrix(g)
    assert np.array_equal(eta, -eta.T)
    assert np.allclose(eta, dense_bivector(g), atol=1e-8)


def test_bivector_vanishes_at_identity_and_torus():
    assert bivector_at(np.eye(3)).tensor.norm() == 0.0
    assert np.linalg.norm(bivector_matrix(np.diag([2.0, 1.0, 0.5]))) < 1e-15


def test_contract_bivector_matches_matrix():
    rng = derive_rng(2, "contract")
    g = random_group_element(3, rng).matrix
    y = rng.normal(size=(3, 3))
    dense = bivector_matrix(g) @ y.reshape(-1)
    assert np.allclose(contract_bivector(g, y).reshape(-1), dense, atol=1e-12)


def test_bracket_is_antisymmetric():
    rng = derive_rng(3, "antisymmetry")
    g = random_group_element(3, rng)
    f1 = random_polynomial_function(3, rng)
    f2 = random_polynomial_function(3, rng)
    assert poisson_bracket(f1, f2, g) == -poisson_bracket(f2, f1, g)
    assert poisson_bracket(f1, f1, g) == 0.0


def test_bracket_matrix_is_skew():
    g = random_group_element(3, derive_rng(4, "gram"))
    functions = [coordinate_function(1, 2), trace_power(2), reflection_trace(1)]
    gram = bracket_matrix(functions, g)
    assert gram.shape == (3, 3)
    assert np.array_equal(gram, -gram.T)


@pytest.mark.parametrize(("p", "q"), [(1, 2), (2, 3), (1, 3)])
def test_central_functions_commute(p, q):
    g = random_group_element(3, derive_rng(5, "central", p, q))
    assert abs(poisson_bracket(trace_power(p), trace_power(q), g)) < 1e-10


@pytest.mark.parametrize("n", [2, 3, 4])
def test_an_tangency(n):
    b = random_an_element(n, derive_rng(6, "tangency", n))
    assert verify_AN_tangency(b).passed


@pytest.mark.parametrize("n", [2, 3])
def test_bracket_axioms(n):
    report = verify_bracket_axioms(n, derive_rng(7, "axioms", n), samples=4)
    assert report.passed, [str(r) for r in report.failures]


@pytest.mark.parametrize(("j", "k"), [(1, 2), (1, 3), (2, 3)])
def test_reflection_hamiltonians_commute(j, k):
    b = random_an_element(4, derive_rng(8, "kgk", j, k))
    assert verify_KGK_commutativity(j, k, b).passed


def test_kgk_rejects_bad_indices():
    with pytest.raises(InputError):
        verify_KGK_commutativity(0, 1, np.eye(2))


def test_sigma_is_antipoisson():
    rng = derive_rng(9, "sigma")
    report = verify_sigma_antipoisson(
        random_polynomial_function(3, rng),
        random_polynomial_function(3, rng),
        random_group_element(3, rng),
    )
    assert report.passed


@pytest.mark.parametrize(
    ("n", "expected"),
    [(2, 2), (3, 4), (4, 8)],
)
def test_generic_rank_on_an(n, expected):
    b = random_an_element(n, derive_rng(10, "rank", n))
    assert bivector_rank(b) == expected


def test_rank_rejects_non_an_point_in_an_chart():
    with pytest.raises(InputError):
        bivector_rank(np.array([[1.0, 0.0], [1.0, 1.0]]))


def test_unipotent_rank():
    assert bivector_rank(ANElement([[1.0, 1.0], [0.0, 1.0]])) == 2
