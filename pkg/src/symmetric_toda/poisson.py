# Copyright (c) 2024 symmetric-toda contributors.
# SPDX-License-Identifier: GPL-3.0-or-later
"""The standard Poisson bivector on SL(n, R) and brackets of functions.

In the trivialization of TG by left translations the bivector is

    η(g) = (Ad_{g⁻¹} ⊗ Ad_{g⁻¹})(r) - r,      Ad_{g⁻¹}X = g⁻¹ X g,

which is r^R - r^L read through left-invariant frames. Brackets contract
η with left differentials, ``D[a, b] = d/dt f(g exp(t E_ab))`` at t = 0:

    {f1, f2}(g) = Σ η[(ab), (cd)] D1[a, b] D2[c, d].

Functions are evaluated on the ambient matrix space so that one-parameter
subgroups through diagonal directions, which leave SL(n), and brackets that
are themselves differentiated are both well defined.
"""
import dataclasses
import itertools
import logging
import typing

import numpy as np

from .checks.core import CheckRecord
from .checks.core import Report
from .errors import InputError
from .errors import NumericalError
from .groups import ANElement
from .groups import GroupElement
from .groups import matrix_of
from .groups import random_group_element
from .rootdata import RTensor
from .utils import as_square_matrix
from .utils import numerical_rank
from .utils import relative_residual

logger = logging.getLogger(__name__)

FD_STEP = 1e-6
SKEW_TOL = 1e-12
RANK_RTOL = 1e-8
MAX_CONDITION = 1e13

CHARTS = ("AN", "full")


def _finite_difference(evaluator, point, step, side):
    n = point.shape[0]
    differential = np.empty((n, n))
    for a, b in itertools.product(range(n), repeat=2):
        plus = point.copy()
        minus = point.copy()
        if side == "left":
            # g exp(t E_ab): column operations
            if a == b:
                plus[:, a] *= np.exp(step)
                minus[:, a] *= np.exp(-step)
            else:
                plus[:, b] += step * point[:, a]
                minus[:, b] -= step * point[:, a]
        else:
            # exp(t E_ab) g: row operations
            if a == b:
                plus[a, :] *= np.exp(step)
                minus[a, :] *= np.exp(-step)
            else:
                plus[a, :] += step * point[b, :]
                minus[a, :] -= step * point[b, :]
        differential[a, b] = (evaluator(plus) - evaluator(minus)) / (2.0 * step)
    return differential


@dataclasses.dataclass(frozen=True)
class SmoothFunction:
    """A smooth function on the n x n matrices.

    :param evaluator: maps an array to a float
    :param gradient: optional Euclidean gradient, an array with
        ``<gradient(g), X> = d/dt f(g + tX)``
    :param name: label used in reports and error messages
    """

    evaluator: typing.Callable[[np.ndarray], float]
    gradient: typing.Optional[typing.Callable[[np.ndarray], np.ndarray]] = None
    name: str = "f"

    def __call__(self, g):
        return float(self.evaluator(matrix_of(g)))

    @property
    def has_gradient(self):
        return self.gradient is not None

    def left_differential(self, g, step=FD_STEP):
        """``D[a, b] = d/dt f(g exp(t E_ab))`` at t = 0."""
        point = matrix_of(g)
        if self.gradient is not None:
            return point.T @ np.asarray(self.gradient(point), dtype=float)
        return _finite_difference(self.evaluator, point, step, "left")

    def right_differential(self, g, step=FD_STEP):
        """``D[a, b] = d/dt f(exp(t E_ab) g)`` at t = 0."""
        point = matrix_of(g)
        if self.gradient is not None:
            return np.asarray(self.gradient(point), dtype=float) @ point.T
        return _finite_difference(self.evaluator, point, step, "right")

    def differential_discrepancy(self, g, step=FD_STEP):
        """Relative gap between the analytic and finite-difference differentials."""
        if self.gradient is None:
            raise InputError(f"{self.name} has no analytic gradient to compare")
        point = matrix_of(g)
        analytic = self.left_differential(point)
        numeric = _finite_difference(self.evaluator, point, step, "left")
        return relative_residual(analytic, numeric)

    def __add__(self, other):
        gradient = None
        if self.gradient is not None and other.gradient is not None:

            def gradient(m):
                return self.gradient(m) + other.gradient(m)

        return SmoothFunction(
            lambda m: self.evaluator(m) + other.evaluator(m),
            gradient,
            f"({self.name} + {other.name})",
        )

    def __mul__(self, other):
        if not isinstance(other, SmoothFunction):
            c = float(other)
            gradient = None
            if self.gradient is not None:

                def gradient(m):
                    return c * self.gradient(m)

            return SmoothFunction(
                lambda m: c * self.evaluator(m),
                gradient,
                f"{c:g}*{self.name}",
            )
        gradient = None
        if self.gradient is not None and other.gradient is not None:

            def gradient(m):
                left = self.evaluator(m) * other.gradient(m)
                return left + other.evaluator(m) * self.gradient(m)

        return SmoothFunction(
            lambda m: self.evaluator(m) * other.evaluator(m),
            gradient,
            f"{self.name}*{other.name}",
        )

    __rmul__ = __mul__

    def composed_with_tau(self):
        """f∘τ with τ(g) = gᵀ."""
        gradient = None
        if self.gradient is not None:

            def gradient(m):
                return np.asarray(self.gradient(m.T)).T

        return SmoothFunction(
            lambda m: self.evaluator(m.T),
            gradient,
            f"tau*{self.name}",
        )

    def composed_with_sigma(self):
        """f∘σ with σ(g) = (gᵀ)⁻¹."""
        gradient = None
        if self.gradient is not None:

            def gradient(m):
                inv_t = np.linalg.inv(m).T
                return -inv_t @ np.asarray(self.gradient(inv_t)).T @ inv_t

        return SmoothFunction(
            lambda m: self.evaluator(np.linalg.inv(m).T),
            gradient,
            f"sigma*{self.name}",
        )

    def composed_with_monodromy(self):
        """f∘T with T(g) = g gᵀ."""
        gradient = None
        if self.gradient is not None:

            def gradient(m):
                outer = np.asarray(self.gradient(m @ m.T))
                return (outer + outer.T) @ m

        return SmoothFunction(
            lambda m: self.evaluator(m @ m.T),
            gradient,
            f"T*{self.name}",
        )

    def symmetrized(self):
        """f + τ*f, which is τ-invariant."""
        return self + self.composed_with_tau()


def coordinate_function(i, j):
    """g ↦ g_ij with 1-based indices."""

    def gradient(m):
        out = np.zeros_like(m)
        out[i - 1, j - 1] = 1.0
        return out

    return SmoothFunction(lambda m: m[i - 1, j - 1], gradient, f"g{i}{j}")


def trace_power(power):
    """g ↦ tr(g^power), a conjugation invariant function."""

    def evaluate(m):
        return np.trace(np.linalg.matrix_power(m, power))

    def gradient(m):
        return power * np.linalg.matrix_power(m, power - 1).T

    return SmoothFunction(evaluate, gradient, f"tr(g^{power})")


def reflection_trace(power):
    """The reflection Hamiltonian g ↦ tr((g gᵀ)^power)."""

    def evaluate(m):
        return np.trace(np.linalg.matrix_power(m @ m.T, power))

    def gradient(m):
        return 2 * power * np.linalg.matrix_power(m @ m.T, power - 1) @ m

    return SmoothFunction(evaluate, gradient, f"H{power}")


def polynomial_function(terms, name="p"):
    """A polynomial in the matrix entries.

    :param terms: sequence of ``(coefficient, ((i, j), ...))`` with 1-based
        indices; each inner tuple lists the factors of a monomial
    """
    terms = tuple((float(c), tuple(tuple(f) for f in factors)) for c, factors in terms)

    def evaluate(m):
        total = 0.0
        for c, factors in terms:
            total += c * np.prod([m[i - 1, j - 1] for i, j in factors])
        return total

    def gradient(m):
        out = np.zeros_like(m)
        for c, factors in terms:
            for position, (i, j) in enumerate(factors):
                rest = factors[:position] + factors[position + 1 :]
                out[i - 1, j - 1] += c * np.prod([m[p - 1, q - 1] for p, q in rest])
        return out

    return SmoothFunction(evaluate, gradient, name)


def random_polynomial_function(n, rng, degree=2, terms=3, name="p"):
    """A random polynomial with *terms* monomials of degree 1..*degree*."""
    chosen = []
    for _ in range(terms):
        order = int(rng.integers(1, degree + 1))
        factors = tuple(
            (int(rng.integers(1, n + 1)), int(rng.integers(1, n + 1)))
            for _ in range(order)
        )
        chosen.append((float(rng.uniform(-1.0, 1.0)), factors))
    return polynomial_function(chosen, name)


def borel_invariant_ratio(n):
    """g ↦ (g²)_{n1} / g_{n1}, invariant under conjugation by B₊.

    Conjugating by b ∈ B₊ multiplies both (g²)_{n1} and g_{n1} by
    b_nn / b_11. Defined where g_{n1} ≠ 0.
    """

    def evaluate(m):
        return (m[n - 1, :] @ m[:, 0]) / m[n - 1, 0]

    def gradient(m):
        p = m[n - 1, :] @ m[:, 0]
        q = m[n - 1, 0]
        grad_p = np.zeros_like(m)
        grad_p[n - 1, :] += m[:, 0]
        grad_p[:, 0] += m[n - 1, :]
        grad_q = np.zeros_like(m)
        grad_q[n - 1, 0] = 1.0
        return (grad_p * q - p * grad_q) / q**2

    return SmoothFunction(evaluate, gradient, f"(g^2)_{n}1/g_{n}1")


def _r_contract(y):
    # r contracted with y in its second slot: E_ab ↦ ±y[b, a] above/below the diagonal
    transposed = y.T
    return np.triu(transposed, 1) - np.tril(transposed, -1)


def _invertible_point(g):
    point = as_square_matrix(matrix_of(g), "point")
    condition = np.linalg.cond(point)
    if not np.isfinite(condition) or condition > MAX_CONDITION:
        raise InputError(f"singular matrix (condition number {condition:.3e})")
    return point


def _contraction(point):
    inverse = np.linalg.inv(point)

    def contract(y):
        return inverse @ _r_contract(inverse.T @ y @ point.T) @ point - _r_contract(y)

    return contract


def contract_bivector(g, y):
    """η(g) contracted with *y* in its second slot.

    ``ξ[a, b] = Σ η[(ab), (cd)] y[c, d]``, computed as
    ``g⁻¹ r(g⁻ᵀ y gᵀ) g - r(y)`` without forming η.
    """
    return _contraction(_invertible_point(g))(np.asarray(y, dtype=float))


def bivector_matrix(g):
    """η(g) as an n² x n² skew matrix, rows indexed by row-major vec(E_ab)."""
    point = _invertible_point(g)
    n = point.shape[0]
    contract = _contraction(point)
    columns = []
    for c, d in itertools.product(range(n), repeat=2):
        unit = np.zeros((n, n))
        unit[c, d] = 1.0
        columns.append(contract(unit).reshape(-1))
    eta = np.stack(columns, axis=1)
    return 0.5 * (eta - eta.T)


@dataclasses.dataclass(frozen=True, eq=False)
class BivectorAtPoint:
    """The left-trivialized bivector η(g) ∈ g ∧ g."""

    base: GroupElement
    tensor: RTensor

    def __post_init__(self):
        skew = (self.tensor + self.tensor.flip()).norm()
        if skew > SKEW_TOL * max(1.0, self.tensor.norm()):
            raise NumericalError(f"bivector is not skew (residual {skew:.3e})")

    @property
    def matrix(self):
        return self.tensor.as_matrix()

    def skewness_residual(self):
        return (self.tensor + self.tensor.flip()).norm()


def bivector_at(g):
    """η(g) for g ∈ SL(n, R).

    >>> bivector_at(np.eye(2)).tensor.norm()
    0.0
    """
    base = g if isinstance(g, GroupElement) else GroupElement(matrix_of(g))
    return BivectorAtPoint(base, RTensor.from_matrix(bivector_matrix(base)))


def _differential(function, point):
    try:
        differential = function.left_differential(point)
    except (ArithmeticError, ValueError, np.linalg.LinAlgError) as e:
        raise NumericalError(
            f"differential of {function.name} failed: {e}",
        ) from e
    differential = np.asarray(differential, dtype=float)
    if not np.all(np.isfinite(differential)):
        raise NumericalError(f"differential of {function.name} is not finite")
    return differential


def _pairing(contract, u, v):
    # Antisymmetric in (u, v) by construction, so {f, f} = 0 exactly
    return 0.5 * (float(np.sum(u * contract(v))) - float(np.sum(v * contract(u))))


def poisson_bracket(f1, f2, g):
    """{f1, f2}(g).

    Points off SL(n) are accepted as long as they are invertible.

    >>> g = np.array([[1.0, 1.0], [0.0, 1.0]])
    >>> abs(poisson_bracket(trace_power(1), trace_power(2), g)) < 1e-12
    True
    """
    point = _invertible_point(g)
    return _pairing(
        _contraction(point),
        _differential(f1, point),
        _differential(f2, point),
    )


def bracket_scale(f1, f2, g):
    """Size of the terms summed in {f1, f2}(g), used to scale residuals."""
    point = _invertible_point(g)
    contract = _contraction(point)
    u = _differential(f1, point)
    v = _differential(f2, point)
    return float(
        max(
            np.linalg.norm(u) * np.linalg.norm(contract(v)),
            np.linalg.norm(v) * np.linalg.norm(contract(u)),
        ),
    )


def bracket_function(f1, f2):
    """The function g ↦ {f1, f2}(g)."""
    return SmoothFunction(
        lambda m: poisson_bracket(f1, f2, m),
        None,
        f"{{{f1.name},{f2.name}}}",
    )


def _gram(contract, differentials):
    images = [contract(d) for d in differentials]
    gram = np.array([[np.sum(u * image) for image in images] for u in differentials])
    return 0.5 * (gram - gram.T)


def bracket_matrix(functions, g):
    """Gram matrix ``B[i, j] = {f_i, f_j}(g)``."""
    point = _invertible_point(g)
    return _gram(_contraction(point), [_differential(f, point) for f in functions])


def chart_coordinates(n, chart):
    """0-based entry positions used as coordinates of a chart.

    The AN chart uses the upper triangular entries except (n, n), which is
    fixed by the determinant.
    """
    if chart == "AN":
        return [
            (p, q) for p in range(n) for q in range(p, n) if (p, q) != (n - 1, n - 1)
        ]
    if chart == "full":
        return [(p, q) for p in range(n) for q in range(n)]
    raise InputError(f"unknown chart {chart!r}, expected one of {CHARTS}")


def bivector_rank(g, chart="AN"):
    """Rank of the bracket Gram matrix of the chart's coordinate functions.

    >>> bivector_rank(ANElement([[2.0, 0.0], [0.0, 0.5]]))
    0
    >>> bivector_rank(ANElement([[2.0, 0.5], [0.0, 0.5]]))
    2
    """
    if chart == "AN" and not isinstance(g, ANElement):
        try:
            g = ANElement(matrix_of(g))
        except InputError as e:
            raise InputError(f"chart AN requires an AN element: {e}") from e
    elif not isinstance(g, GroupElement):
        g = GroupElement(matrix_of(g))
    point = g.matrix
    n = point.shape[0]
    coordinates = chart_coordinates(n, chart)
    # d(g_pq) in the left trivialization is gᵀ E_pq
    differentials = [np.outer(point[p, :], np.eye(n)[q, :]) for p, q in coordinates]
    jacobian = np.stack([d.reshape(-1) for d in differentials])
    gram = _gram(_contraction(point), differentials)
    condition = np.linalg.norm(point, 2) * np.linalg.norm(np.linalg.inv(point), 2)
    floor = np.linalg.norm(jacobian, 2) ** 2 * (1.0 + condition**2)
    return numerical_rank(gram, rtol=RANK_RTOL, floor=floor)


def verify_AN_tangency(b, tolerance=1e-10, seed=None):
    """Check that η(b) lies in b₊ ∧ b₊ for b ∈ AN."""
    b = b if isinstance(b, ANElement) else ANElement(matrix_of(b))
    n = b.n
    tensor = bivector_at(b).tensor.tensor
    upper = np.triu(np.ones((n, n)))
    inside = np.einsum("ij,kl->ijkl", upper, upper)
    outside = float(np.linalg.norm(tensor * (1.0 - inside)))
    residual = outside / max(1.0, float(np.linalg.norm(tensor)))
    return Report(
        "an-tangency",
        [CheckRecord("an-tangency", residual, tolerance, {"n": n})],
        seed=seed,
    )


def verify_sigma_antipoisson(f1, f2, g, tolerance=1e-6, seed=None):
    """Check {f1∘σ, f2∘σ}(g) = -{f1, f2}(σ(g))."""
    point = matrix_of(g)
    image = np.linalg.inv(point).T
    lhs = poisson_bracket(f1.composed_with_sigma(), f2.composed_with_sigma(), point)
    rhs = -poisson_bracket(f1, f2, image)
    scale = bracket_scale(f1, f2, image)
    residual = relative_residual(lhs, rhs, scale)
    return Report(
        "sigma-antipoisson",
        [
            CheckRecord(
                "sigma-antipoisson",
                residual,
                tolerance,
                {"f1": f1.name, "f2": f2.name, "lhs": lhs, "rhs": rhs},
            ),
        ],
        seed=seed,
    )


def verify_KGK_commutativity(j, k, b, tolerance=1e-6, seed=None):
    """Check {H_j, H_k}(b) = 0 for H_m(g) = tr((g gᵀ)^m)."""
    if j < 1 or k < 1:
        raise InputError(f"Hamiltonian indices must be positive, got ({j}, {k})")
    b = b if isinstance(b, GroupElement) else ANElement(matrix_of(b))
    hj = reflection_trace(j)
    hk = reflection_trace(k)
    value = poisson_bracket(hj, hk, b)
    residual = relative_residual(value, 0.0, bracket_scale(hj, hk, b))
    return Report(
        "kgk-commutativity",
        [
            CheckRecord(
                f"H{j}-H{k}",
                residual,
                tolerance,
                {"j": j, "k": k, "bracket": value, "b": b.matrix.tolist()},
            ),
        ],
        seed=seed,
    )


def verify_bracket_axioms(n, rng, samples=50, tolerance=1e-6, seed=None):
    """Antisymmetry, Jacobi and Leibniz on coordinate functions, η = 0 on A."""
    report = Report("bracket-axioms", seed=seed)
    antisymmetry = 0.0
    jacobi = 0.0
    leibniz = 0.0
    torus = 0.0
    discrepancy = 0.0
    for _ in range(samples):
        g = random_group_element(n, rng)
        f1, f2, f3 = (
            coordinate_function(int(rng.integers(1, n + 1)), int(rng.integers(1, n + 1)))
            for _ in range(3)
        )
        antisymmetry = max(
            antisymmetry,
            abs(poisson_bracket(f1, f2, g) + poisson_bracket(f2, f1, g)),
        )
        terms = [
            poisson_bracket(f1, bracket_function(f2, f3), g),
            poisson_bracket(f2, bracket_function(f3, f1), g),
            poisson_bracket(f3, bracket_function(f1, f2), g),
        ]
        scale = max(
            bracket_scale(f1, f2, g) * bracket_scale(f2, f3, g),
            max(abs(t) for t in terms),
        )
        jacobi = max(jacobi, relative_residual(sum(terms), 0.0, scale))

        lhs = poisson_bracket(f1 * f2, f3, g)
        rhs = f1(g) * poisson_bracket(f2, f3, g) + f2(g) * poisson_bracket(f1, f3, g)
        leibniz = max(leibniz, relative_residual(lhs, rhs, bracket_scale(f1, f3, g)))

        polynomial = random_polynomial_function(n, rng)
        discrepancy = max(discrepancy, polynomial.differential_discrepancy(g))

        logs = rng.uniform(-1.0, 1.0, size=n)
        torus = max(
            torus,
            float(np.linalg.norm(bivector_matrix(np.diag(np.exp(logs - logs.mean()))))),
        )
    report.extend(
        [
            CheckRecord("antisymmetry", antisymmetry, tolerance, {"samples": samples}),
            CheckRecord("jacobi", jacobi, tolerance, {"samples": samples}),
            CheckRecord("leibniz", leibniz, tolerance, {"samples": samples}),
            CheckRecord("torus-bivector-zero", torus, 1e-12, {"samples": samples}),
            CheckRecord(
                "analytic-vs-finite-difference",
                discrepancy,
                1e-5,
                {"samples": samples},
            ),
        ],
    )
    return report
