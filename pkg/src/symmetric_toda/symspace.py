# Copyright (c) 2024 symmetric-toda contributors.
# SPDX-License-Identifier: GPL-3.0-or-later
"""The symmetric space SL(n, R)/SO(n).

Type A realizations used here:

- Cartan involution σ(g) = (gᵀ)⁻¹, fixing K = SO(n)
- anti-automorphism τ(g) = σ(g⁻¹) = gᵀ
- reflection monodromy T(g) = g σ(g⁻¹) = g gᵀ, which identifies G/K with
  the symmetric positive definite matrices of determinant 1
"""
import logging

import numpy as np
import scipy.linalg

from .checks.core import CheckRecord
from .checks.core import Report
from .errors import InputError
from .errors import NumericalError
from .groups import ANElement
from .groups import GroupElement
from .groups import matrix_of
from .groups import OrthogonalElement
from .poisson import bracket_scale
from .poisson import poisson_bracket
from .rootdata import chevalley_generator
from .rootdata import RootSystemA
from .rootdata import y_generator
from .utils import as_square_matrix
from .utils import relative_residual

logger = logging.getLogger(__name__)

FD_STEP = 1e-6
FACTOR_TOL = 1e-10
SYMMETRY_TOL = 1e-9


def _element(g):
    return g if isinstance(g, GroupElement) else GroupElement(matrix_of(g))


def sigma(g):
    """σ(g) = (gᵀ)⁻¹.

    >>> np.allclose(sigma(np.diag([2.0, 0.5])).matrix, np.diag([0.5, 2.0]))
    True
    """
    g = _element(g)
    try:
        image = np.linalg.inv(g.matrix).T
    except np.linalg.LinAlgError as e:
        raise InputError(f"singular matrix: {e}") from e
    return GroupElement.normalized(image)


def tau(g):
    """τ(g) = gᵀ, a group anti-automorphism exchanging B₊ and B₋."""
    return GroupElement(_element(g).matrix.T)


def reflection_monodromy(g):
    """T(g) = g gᵀ, symmetric positive definite with determinant 1.

    >>> reflection_monodromy([[1.0, 1.0], [0.0, 1.0]]).matrix.round(12).tolist()
    [[2.0, 1.0], [1.0, 1.0]]
    """
    m = _element(g).matrix
    image = m @ m.T
    return GroupElement.normalized(0.5 * (image + image.T))


def leading_principal_minors(matrix):
    """Determinants of the upper-left k x k blocks, k = 1..n."""
    matrix = np.asarray(matrix_of(matrix), dtype=float)
    return np.array([np.linalg.det(matrix[:k, :k]) for k in range(1, len(matrix) + 1)])


def iwasawa_factorize(g):
    """Factor g = b k⁻¹ with b ∈ AN and k ∈ SO(n).

    Uses an RQ decomposition g = R Q and moves the signs of diag(R) into
    the orthogonal factor.

    >>> g = np.array([[1.0, 2.0], [-1.0, -1.0]])
    >>> b, k = iwasawa_factorize(g)
    >>> np.allclose(b.matrix @ k.matrix.T, g)
    True
    """
    g = _element(g)
    upper, orthogonal = scipy.linalg.rq(g.matrix)
    diagonal = np.diag(upper)
    if np.min(np.abs(diagonal)) <= 1e-14 * max(1.0, np.abs(upper).max()):
        raise NumericalError("Iwasawa factorization broke down: singular triangular factor")
    signs = np.where(diagonal < 0.0, -1.0, 1.0)
    b = ANElement.normalized(np.triu(upper * signs[np.newaxis, :]))
    k = OrthogonalElement(orthogonal.T * signs[np.newaxis, :])
    residual = np.linalg.norm(b.matrix @ k.matrix.T - g.matrix) / max(
        1.0,
        np.linalg.norm(g.matrix),
    )
    if residual > FACTOR_TOL:
        raise NumericalError(f"Iwasawa reconstruction residual {residual:.3e}")
    return b, k


def _spd(matrix, what):
    matrix = as_square_matrix(matrix_of(matrix), what)
    asymmetry = np.linalg.norm(matrix - matrix.T)
    if asymmetry > SYMMETRY_TOL * max(1.0, np.linalg.norm(matrix)):
        raise InputError(f"{what} is not symmetric (residual {asymmetry:.3e})")
    return 0.5 * (matrix + matrix.T)


def reverse_cholesky(matrix):
    """The b ∈ AN with b bᵀ = M, inverting T on AN.

    >>> np.allclose(reverse_cholesky([[2.0, 1.0], [1.0, 1.0]]).matrix, [[1.0, 1.0], [0.0, 1.0]])
    True
    """
    matrix = _spd(matrix, "matrix")
    flip = np.eye(len(matrix))[::-1]
    try:
        lower = scipy.linalg.cholesky(flip @ matrix @ flip, lower=True)
    except np.linalg.LinAlgError as e:
        raise InputError(f"matrix is not positive definite: {e}") from e
    return ANElement.normalized(np.triu(flip @ lower @ flip))


def upper_cholesky(matrix):
    """The β ∈ AN with βᵀ β = M."""
    matrix = _spd(matrix, "matrix")
    try:
        upper = scipy.linalg.cholesky(matrix, lower=False)
    except np.linalg.LinAlgError as e:
        raise InputError(f"matrix is not positive definite: {e}") from e
    return ANElement.normalized(np.triu(upper))


def T_differential(g, x, side="left"):
    """d/dt T(g exp(tX)) (side ``left``) or d/dt T(exp(tX) g) (side ``right``).

    Left: g (X + Xᵀ) gᵀ. Right: X T(g) + T(g) Xᵀ.
    """
    m = matrix_of(g)
    x = matrix_of(x) if not hasattr(x, "matrix") else x.matrix
    if side == "left":
        return m @ (x + x.T) @ m.T
    if side == "right":
        monodromy = m @ m.T
        return x @ monodromy + monodromy @ x.T
    raise InputError(f"side must be 'left' or 'right', got {side!r}")


def finite_difference_T(g, x, side="left", step=FD_STEP):
    """Central difference approximation of :func:`T_differential`."""
    m = matrix_of(g)
    x = matrix_of(x) if not hasattr(x, "matrix") else x.matrix
    plus = scipy.linalg.expm(step * x)
    minus = scipy.linalg.expm(-step * x)
    if side == "left":
        a, b = m @ plus, m @ minus
    else:
        a, b = plus @ m, minus @ m
    return (a @ a.T - b @ b.T) / (2.0 * step)


def tau_differential(g, x):
    """d/dt τ(g exp(tX)) = Xᵀ τ(g), the right field of Xᵀ at τ(g)."""
    m = matrix_of(g)
    x = matrix_of(x) if not hasattr(x, "matrix") else x.matrix
    return x.T @ m.T


def verify_T_pushforwards(g, tolerance=1e-7, seed=None):
    """Check the pushforwards of Y_α and E_α vector fields under T."""
    g = _element(g)
    n = g.n
    m = g.matrix
    monodromy = m @ m.T
    left_zero = 0.0
    right_y = 0.0
    right_e = 0.0
    left_fd = 0.0
    tau_right = 0.0
    for root in RootSystemA(n).positive_roots:
        y = y_generator(n, root).matrix
        e = chevalley_generator(n, root).matrix
        e_minus = chevalley_generator(n, root, "-").matrix
        left_zero = max(left_zero, np.abs(T_differential(m, y, "left")).max())
        right_y = max(
            right_y,
            relative_residual(T_differential(m, y, "right"), y @ monodromy - monodromy @ y),
            relative_residual(T_differential(m, y, "right"), finite_difference_T(m, y, "right")),
        )
        right_e = max(
            right_e,
            relative_residual(
                T_differential(m, e, "right"),
                e @ monodromy + monodromy @ e_minus,
            ),
            relative_residual(T_differential(m, e, "right"), finite_difference_T(m, e, "right")),
        )
        left_fd = max(
            left_fd,
            relative_residual(T_differential(m, e, "left"), finite_difference_T(m, e, "left")),
        )
        fd_tau = ((m @ scipy.linalg.expm(FD_STEP * e)).T - (m @ scipy.linalg.expm(-FD_STEP * e)).T) / (
            2.0 * FD_STEP
        )
        tau_right = max(
            tau_right,
            relative_residual(tau_differential(m, e), e_minus @ m.T),
            relative_residual(tau_differential(m, e), fd_tau),
        )
    metadata = {"n": n}
    return Report(
        "t-pushforward",
        [
            CheckRecord("T-left-Y-vanishes", left_zero, tolerance, metadata),
            CheckRecord("T-right-Y", right_y, tolerance, metadata),
            CheckRecord("T-right-E", right_e, tolerance, metadata),
            CheckRecord("T-left-finite-difference", left_fd, tolerance, metadata),
            CheckRecord("tau-left-E-to-right-E-minus", tau_right, tolerance, metadata),
        ],
        seed=seed,
    )


def verify_rmpb(f1, f2, g, tolerance=1e-6, seed=None):
    """Check {T*f1, T*f2}(g) = 1/2 {f1 + τ*f1, f2 + τ*f2}(T(g))."""
    point = _element(g).matrix
    monodromy = point @ point.T
    pulled1 = f1.composed_with_monodromy()
    pulled2 = f2.composed_with_monodromy()
    sym1 = f1.symmetrized()
    sym2 = f2.symmetrized()
    lhs = poisson_bracket(pulled1, pulled2, point)
    rhs = 0.5 * poisson_bracket(sym1, sym2, monodromy)
    scale = max(bracket_scale(pulled1, pulled2, point), bracket_scale(sym1, sym2, monodromy))
    return Report(
        "rm-pb",
        [
            CheckRecord(
                f"rm-pb[{f1.name},{f2.name}]",
                relative_residual(lhs, rhs, scale),
                tolerance,
                {"lhs": lhs, "rhs": rhs},
            ),
        ],
        seed=seed,
    )


def _check_tau_invariant(function, point):
    value = function(point)
    mirrored = function(point.T)
    if relative_residual(value, mirrored) > 1e-9:
        raise InputError(f"{function.name} is not τ-invariant")


def verify_factor2_corollary(f1, f2, g, tolerance=1e-6, seed=None):
    """Check {T*f1, T*f2}(g) = 2 {f1, f2}(T(g)) for τ-invariant f1, f2."""
    point = _element(g).matrix
    monodromy = point @ point.T
    for function in (f1, f2):
        _check_tau_invariant(function, point)
    pulled1 = f1.composed_with_monodromy()
    pulled2 = f2.composed_with_monodromy()
    lhs = poisson_bracket(pulled1, pulled2, point)
    rhs = 2.0 * poisson_bracket(f1, f2, monodromy)
    scale = max(bracket_scale(pulled1, pulled2, point), bracket_scale(f1, f2, monodromy))
    return Report(
        "factor2",
        [
            CheckRecord(
                f"factor2[{f1.name},{f2.name}]",
                relative_residual(lhs, rhs, scale),
                tolerance,
                {"lhs": lhs, "rhs": rhs},
            ),
        ],
        seed=seed,
    )


def verify_tau_poisson(f1, f2, g, tolerance=1e-6, seed=None):
    """Check {f1∘τ, f2∘τ}(g) = {f1, f2}(τ(g))."""
    point = _element(g).matrix
    lhs = poisson_bracket(f1.composed_with_tau(), f2.composed_with_tau(), point)
    rhs = poisson_bracket(f1, f2, point.T)
    scale = bracket_scale(f1, f2, point.T)
    return Report(
        "tau-poisson",
        [
            CheckRecord(
                f"tau-poisson[{f1.name},{f2.name}]",
                relative_residual(lhs, rhs, scale),
                tolerance,
                {"lhs": lhs, "rhs": rhs},
            ),
        ],
        seed=seed,
    )


def verify_commutation_corollary(central, invariant, g, tolerance=1e-6, seed=None):
    """Check {T*f1, T*f2}(g) = 0 for central f1 and Ad_{B₊}-invariant f2."""
    point = _element(g).matrix
    pulled1 = central.composed_with_monodromy()
    pulled2 = invariant.composed_with_monodromy()
    value = poisson_bracket(pulled1, pulled2, point)
    scale = bracket_scale(pulled1, pulled2, point)
    return Report(
        "commutation-corollary",
        [
            CheckRecord(
                f"commutation[{central.name},{invariant.name}]",
                relative_residual(value, 0.0, scale),
                tolerance,
                {"bracket": value},
            ),
        ],
        seed=seed,
    )


def sigma_tau_residuals(g, h, k, b):
    """Residuals of the structural properties of σ, τ and T.

    :param g: group element
    :param h: second group element, for the anti-automorphism property
    :param k: rotation
    :param b: AN element
    :return: mapping of property name to residual
    """
    g, h, k, b = (_element(x) for x in (g, h, k, b))
    n = g.n
    x = np.random.default_rng(n).uniform(-1.0, 1.0, size=(n, n))
    x -= np.trace(x) / n * np.eye(n)
    sigma_differential = (
        sigma(scipy.linalg.expm(FD_STEP * x)).matrix
        - sigma(scipy.linalg.expm(-FD_STEP * x)).matrix
    ) / (2.0 * FD_STEP)
    monodromy = reflection_monodromy(g).matrix
    minors = leading_principal_minors(monodromy)
    return {
        "sigma-involutive": relative_residual(sigma(sigma(g)).matrix, g.matrix),
        "sigma-fixes-K": relative_residual(sigma(k).matrix, k.matrix),
        "sigma-differential": relative_residual(sigma_differential, -x.T),
        "tau-anti-automorphism": relative_residual(
            tau(GroupElement.normalized(g.matrix @ h.matrix)).matrix,
            tau(h).matrix @ tau(g).matrix,
        ),
        "tau-involutive": relative_residual(tau(tau(g)).matrix, g.matrix),
        "tau-maps-B-plus-to-B-minus": float(np.abs(np.triu(tau(b).matrix, 1)).max()),
        "tau-fixes-T": relative_residual(tau(monodromy).matrix, monodromy),
        "T-right-K-invariant": relative_residual(
            reflection_monodromy(GroupElement.normalized(g.matrix @ k.matrix)).matrix,
            monodromy,
        ),
        "T-symmetric": float(np.linalg.norm(monodromy - monodromy.T)),
        "T-positive-definite": float(max(0.0, -np.linalg.eigvalsh(monodromy).min())),
        "T-positive-minors": float(max(0.0, -minors.min())),
        "T-det-one": abs(float(np.linalg.det(monodromy)) - 1.0),
        "reverse-cholesky-inverts-T": relative_residual(
            reverse_cholesky(reflection_monodromy(b)).matrix,
            b.matrix,
        ),
    }
