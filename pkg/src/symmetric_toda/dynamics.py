# Copyright (c) 2024 symmetric-toda contributors.
# SPDX-License-Identifier: GPL-3.0-or-later
"""Reflection Hamiltonians and their flows on AN ≅ G/K.

Two independent integrators are provided. :func:`factorization_flow` solves
the flow exactly through Iwasawa factorizations of ``exp(t ∇±H)``.
:func:`vector_field_flow` integrates the Hamiltonian vector field of the
Poisson bivector with a classical Runge-Kutta scheme and is only used to
cross-check the first one.
"""
import csv
import dataclasses
import logging
import math
import types
import typing

import numpy as np
import scipy.linalg

from .checks.core import CheckRecord
from .checks.core import Report
from .checks.core import SCHEMA_VERSION
from .errors import ConsistencyError
from .errors import InputError
from .errors import NumericalError
from .groups import ANElement
from .groups import GroupElement
from .groups import matrix_of
from .groups import random_group_element
from .poisson import contract_bivector
from .poisson import SmoothFunction
from .rootdata import AlgebraElement
from .symspace import iwasawa_factorize
from .symspace import reflection_monodromy
from .symspace import reverse_cholesky
from .utils import derive_rng
from .utils import dump_json
from .utils import relative_residual
from .utils import traceless

logger = logging.getLogger(__name__)

FD_STEP = 1e-6
GRADIENT_TOL = 1e-6
MAX_DT = 1e-2
DET_DRIFT_TOL = 1e-6
MIN_DT = 1e-7
# Largest relative change of b allowed in one RK4 step
STEP_BUDGET = 0.02
# Largest t * (spread of the gradient spectrum) exponentiated in one slice
MAX_EXPONENT = 8.0


@dataclasses.dataclass(frozen=True)
class ReflectionHamiltonian:
    """H(g) = Σ c_k tr((g gᵀ)^k) for 1 <= k <= n - 1.

    The closed form gradients are checked against finite differences when
    the Hamiltonian is built.

    >>> H = ReflectionHamiltonian(2, {1: 1.0})
    >>> H.name
    'H1'
    >>> ReflectionHamiltonian(2, {2: 1.0})
    Traceback (most recent call last):
    ...
    symmetric_toda.errors.InputError: Hamiltonian power 2 must satisfy 1 <= k <= 1
    """

    n: int
    coefficients: typing.Mapping[int, float]

    def __post_init__(self):
        coefficients = {}
        for k, c in dict(self.coefficients).items():
            if isinstance(k, bool) or not isinstance(k, int) or not 1 <= k <= self.n - 1:
                raise InputError(
                    f"Hamiltonian power {k} must satisfy 1 <= k <= {self.n - 1}",
                )
            c = float(c)
            if not math.isfinite(c):
                raise InputError(f"Hamiltonian coefficient for k={k} is not finite")
            if c != 0.0:
                coefficients[k] = c
        if not coefficients:
            raise InputError("Hamiltonian needs at least one nonzero coefficient")
        object.__setattr__(
            self,
            "coefficients",
            types.MappingProxyType(dict(sorted(coefficients.items()))),
        )
        self._validate_gradients()

    @classmethod
    def single(cls, k, n, coefficient=1.0):
        """H_k = tr((g gᵀ)^k)."""
        return cls(n, {k: coefficient})

    @classmethod
    def parse(cls, text, n):
        """Parse ``"1:1.0,2:0.5"`` into a Hamiltonian.

        >>> ReflectionHamiltonian.parse("1:1.0, 2:-0.5", 3).name
        'H1-0.5*H2'
        """
        coefficients = {}
        for item in text.split(","):
            power, sep, value = item.strip().partition(":")
            try:
                k = int(power)
                c = float(value) if sep else 1.0
            except ValueError as e:
                raise InputError(f"malformed Hamiltonian term {item.strip()!r}") from e
            coefficients[k] = coefficients.get(k, 0.0) + c
        return cls(n, coefficients)

    @property
    def name(self):
        parts = []
        for k, c in self.coefficients.items():
            term = f"H{k}" if c == 1.0 else f"{c:g}*H{k}"
            if parts and not term.startswith("-"):
                term = "+" + term
            parts.append(term)
        return "".join(parts)

    def value(self, g):
        monodromy = matrix_of(g) @ matrix_of(g).T
        return float(
            sum(
                c * np.trace(np.linalg.matrix_power(monodromy, k))
                for k, c in self.coefficients.items()
            ),
        )

    def euclidean_gradient(self, g):
        """Σ 2k c_k (g gᵀ)^(k-1) g."""
        m = matrix_of(g)
        monodromy = m @ m.T
        return sum(
            2 * k * c * np.linalg.matrix_power(monodromy, k - 1) @ m
            for k, c in self.coefficients.items()
        )

    def _symmetric_gradient(self, symmetric):
        return traceless(
            sum(
                2 * k * c * np.linalg.matrix_power(symmetric, k)
                for k, c in self.coefficients.items()
            ),
        )

    def left_gradient(self, g):
        m = matrix_of(g)
        return self._symmetric_gradient(m.T @ m)

    def right_gradient(self, g):
        m = matrix_of(g)
        return self._symmetric_gradient(m @ m.T)

    def as_function(self):
        """The Hamiltonian as a :class:`~symmetric_toda.poisson.SmoothFunction`."""
        return SmoothFunction(self.value, self.euclidean_gradient, self.name)

    def _validate_gradients(self):
        rng = derive_rng(0, "hamiltonian-gradient", self.n)
        g = random_group_element(self.n, rng).matrix
        worst = 0.0
        for _ in range(5):
            x = traceless(rng.uniform(-1.0, 1.0, size=(self.n, self.n)))
            plus = scipy.linalg.expm(FD_STEP * x)
            minus = scipy.linalg.expm(-FD_STEP * x)
            left_fd = (self.value(g @ plus) - self.value(g @ minus)) / (2.0 * FD_STEP)
            right_fd = (self.value(plus @ g) - self.value(minus @ g)) / (2.0 * FD_STEP)
            scale = max(1.0, abs(self.value(g)))
            worst = max(
                worst,
                abs(np.sum(self.left_gradient(g) * x) - left_fd) / scale,
                abs(np.sum(self.right_gradient(g) * x) - right_fd) / scale,
            )
        if worst > GRADIENT_TOL:
            raise NumericalError(
                f"closed form gradient of {self.name} disagrees with finite "
                f"differences ({worst:.3e})",
            )


def hamiltonian_value(H, b):
    """Σ c_k tr((b bᵀ)^k).

    >>> hamiltonian_value(ReflectionHamiltonian.single(1, 2), [[1.0, 1.0], [0.0, 1.0]])
    3.0
    """
    return H.value(b)


def gradient(H, g, side="left"):
    """The left (``∇⁻``) or right (``∇⁺``) gradient of *H* at *g*.

    ``<∇⁻H(g), X> = d/dt H(g exp(tX))`` and
    ``<∇⁺H(g), X> = d/dt H(exp(tX) g)`` for the trace pairing.
    """
    if side == "left":
        return AlgebraElement(H.left_gradient(g))
    if side == "right":
        return AlgebraElement(H.right_gradient(g))
    raise InputError(f"side must be 'left' or 'right', got {side!r}")


def _as_an(b):
    if isinstance(b, ANElement):
        return b
    return ANElement(matrix_of(b))


def _expm(generator, t):
    exponential = scipy.linalg.expm(t * generator)
    if not np.all(np.isfinite(exponential)):
        raise NumericalError(
            f"matrix exponential overflow at t*|X| = {abs(t) * np.linalg.norm(generator):.3e}; "
            "slice the time interval",
        )
    return exponential


def _flow_step(H, b, t):
    x_plus = H.right_gradient(b)
    x_minus = H.left_gradient(b)
    _, k_plus = iwasawa_factorize(GroupElement.normalized(_expm(x_plus, t)))
    _, k_minus = iwasawa_factorize(GroupElement.normalized(_expm(x_minus, t)))
    g = k_plus.matrix.T @ b.matrix @ k_minus.matrix
    b_factor, _ = iwasawa_factorize(GroupElement.normalized(g))
    renormalized = reverse_cholesky(reflection_monodromy(g))
    drift = relative_residual(b_factor.matrix, renormalized.matrix)
    if drift > 1e-8:
        raise ConsistencyError(f"Iwasawa factor and T⁻¹ disagree by {drift:.3e}")
    return renormalized


def gradient_spread(H, b):
    """Width of the spectrum of ∇⁺H(b), constant along the flow of H."""
    spectrum = np.linalg.eigvalsh(H.right_gradient(b))
    return float(spectrum[-1] - spectrum[0])


def slice_count(H, b, t):
    """Number of slices used by :func:`factorization_flow` for a time *t*."""
    spread = gradient_spread(H, b)
    return max(1, math.ceil(abs(t)), math.ceil(abs(t) * spread / MAX_EXPONENT))


def factorization_flow(H, b0, t):
    """Flow *b0* for time *t* along *H* by factorization.

    With X± = ∇±H(b0) and exp(tX±) = b±(t) k±(t)⁻¹, the flow is the coset of
    g(t) = k₊(t)⁻¹ b0 k₋(t); its AN representative is returned. Long times
    are sliced and composed, the gradient spectrum being constant along the
    flow.
    """
    b = _as_an(b0)
    if t == 0:
        return b
    slices = slice_count(H, b, t)
    if slices > 1:
        logger.debug("flowing %s for t=%g in %d slices", H.name, t, slices)
    step = t / slices
    for _ in range(slices):
        b = _flow_step(H, b, step)
    return b


def hamiltonian_vector_field(H, b):
    """ḃ = b ξ with ξ the bivector contracted with the left differential of H."""
    point = matrix_of(b)
    xi = contract_bivector(point, point.T @ H.euclidean_gradient(point))
    # η(b) lies in b₊ ∧ b₊ on AN
    return point @ np.triu(xi)


def _rk4_step(H, point, h, k1):
    k2 = hamiltonian_vector_field(H, point + 0.5 * h * k1)
    k3 = hamiltonian_vector_field(H, point + 0.5 * h * k2)
    k4 = hamiltonian_vector_field(H, point + h * k3)
    return np.triu(point + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))


def vector_field_flow(H, b0, t, dt=1e-3):
    """Integrate :func:`hamiltonian_vector_field` with the classical RK4 scheme.

    Steps are at most *dt* and are shortened so that the relative speed of
    the field, scaled by its polynomial degree 2k + 1, times the step stays
    below ``STEP_BUDGET``. A step that moves det b further than 1e-6 from 1
    is retried at half the size.

    :param dt: largest step, at most ``1e-2``
    :raises NumericalError: when no step down to ``MIN_DT`` keeps det b near 1
    """
    if not 0 < dt <= MAX_DT:
        raise InputError(f"dt must satisfy 0 < dt <= {MAX_DT}, got {dt}")
    b = _as_an(b0)
    if t == 0:
        return b
    degree = 2 * max(H.coefficients) + 1
    direction = math.copysign(1.0, t)
    point = b.matrix.copy()
    elapsed = 0.0
    limit = dt
    steps = 0
    while abs(t) - elapsed > 1e-15 * abs(t):
        k1 = hamiltonian_vector_field(H, point)
        speed = degree * float(np.linalg.norm(k1)) / float(np.linalg.norm(point))
        size = min(limit, abs(t) - elapsed)
        if speed > 0.0:
            size = min(size, STEP_BUDGET / speed)
        candidate = _rk4_step(H, point, direction * size, k1)
        drift = abs(float(np.prod(np.diag(candidate))) - 1.0)
        if drift > DET_DRIFT_TOL:
            if size <= MIN_DT:
                raise NumericalError(
                    f"RK4 step {steps} rejected: det drifted by {drift:.3e}",
                )
            limit = size / 2.0
            logger.debug("RK4 step %d retried at dt %.3e", steps, limit)
            continue
        point = candidate
        elapsed += size
        steps += 1
    logger.debug("RK4 reached t = %g in %d steps", t, steps)
    return ANElement.normalized(point)


def calibrate_time_constant(H, b0, step=1e-5):
    """The λ with d/dt vector_field_flow = d/dt factorization_flow(λ t) at t = 0."""
    b = _as_an(b0)
    field = hamiltonian_vector_field(H, b.matrix)
    forward = factorization_flow(H, b, step).matrix
    backward = factorization_flow(H, b, -step).matrix
    velocity = (forward - backward) / (2.0 * step)
    denominator = float(np.sum(velocity * velocity))
    if denominator == 0.0:
        raise NumericalError(f"{H.name} does not move {b!r}; cannot calibrate")
    constant = float(np.sum(field * velocity)) / denominator
    logger.debug("calibrated time constant %.12f for %s", constant, H.name)
    return constant


def verify_flow_commutativity(h_a, h_b, b0, t, tolerance=1e-7, seed=None):
    """Check Φᵃ_t ∘ Φᵇ_t = Φᵇ_t ∘ Φᵃ_t with both flows by factorization."""
    b = _as_an(b0)
    ab = factorization_flow(h_a, factorization_flow(h_b, b, t), t)
    ba = factorization_flow(h_b, factorization_flow(h_a, b, t), t)
    residual = relative_residual(ab.matrix, ba.matrix)
    return Report(
        "flow-commutativity",
        [
            CheckRecord(
                f"commute[{h_a.name},{h_b.name}]",
                residual,
                tolerance,
                {"t": t},
            ),
        ],
        seed=seed,
    )


def spectrum_drift(H, b0, times):
    """Largest change of the spectrum of b bᵀ along the flow."""
    b = _as_an(b0)
    initial = np.linalg.eigvalsh(reflection_monodromy(b).matrix)
    return max(
        relative_residual(
            np.linalg.eigvalsh(reflection_monodromy(factorization_flow(H, b, t)).matrix),
            initial,
        )
        for t in times
    )


def conservation_drift(H, b0, times):
    """Largest relative change of every H_j, 1 <= j <= n - 1, along the flow."""
    b = _as_an(b0)
    n = b.n
    conserved = [ReflectionHamiltonian.single(j, n) for j in range(1, n)]
    initial = [h.value(b) for h in conserved]
    worst = 0.0
    for t in times:
        moved = factorization_flow(H, b, t)
        for h, value in zip(conserved, initial):
            worst = max(worst, relative_residual(h.value(moved), value))
    return worst


def group_property_residual(H, b0, s, t):
    """Distance between Φ_t(Φ_s(b0)) and Φ_{s+t}(b0)."""
    b = _as_an(b0)
    composed = factorization_flow(H, factorization_flow(H, b, s), t)
    direct = factorization_flow(H, b, s + t)
    return relative_residual(composed.matrix, direct.matrix)


def crossval_residual(H, b0, t, constant, dt=1e-3):
    """Entrywise gap between the RK4 flow for t and the factorization flow for λt."""
    b = _as_an(b0)
    integrated = vector_field_flow(H, b, t, dt)
    exact = factorization_flow(H, b, constant * t)
    return float(np.abs(integrated.matrix - exact.matrix).max())


@dataclasses.dataclass
class TrajectoryPoint:
    t: float
    b: ANElement
    hamiltonian: float
    actions: np.ndarray
    r: np.ndarray
    theta: typing.Dict[typing.Tuple[int, int], float]


@dataclasses.dataclass
class Trajectory:
    """Points of a flow on an increasing time grid, with diagnostics."""

    hamiltonian: ReflectionHamiltonian
    points: typing.List[TrajectoryPoint] = dataclasses.field(default_factory=list)

    def __post_init__(self):
        times = [p.t for p in self.points]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise InputError("trajectory times must be strictly increasing")

    @property
    def n(self):
        return self.hamiltonian.n

    @property
    def times(self):
        return np.array([p.t for p in self.points])

    def columns(self):
        n = self.n
        pairs = [(a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1)]
        return (
            ["t"]
            + [f"b{i}{j}" for i in range(1, n + 1) for j in range(i, n + 1)]
            + ["H"]
            + [f"h{a}" for a in range(1, n + 1)]
            + [f"r{a}" for a in range(1, n + 1)]
            + [f"theta{a}{b}" for a, b in pairs]
        )

    def rows(self):
        n = self.n
        pairs = [(a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1)]
        upper = np.triu_indices(n)
        for p in self.points:
            yield (
                [p.t]
                + p.b.matrix[upper].tolist()
                + [p.hamiltonian]
                + p.actions.tolist()
                + p.r.tolist()
                + [p.theta[pair] for pair in pairs]
            )

    def drift_statistics(self):
        """Drift of the conserved quantities and the linear fit of the angles."""
        actions = np.stack([p.actions for p in self.points])
        values = np.array([p.hamiltonian for p in self.points])
        stats = {
            "schema_version": SCHEMA_VERSION,
            "hamiltonian": self.hamiltonian.name,
            "n": self.n,
            "points": len(self.points),
            "action_drift": float(np.abs(actions - actions[0]).max()),
            "hamiltonian_drift": float(np.abs(values - values[0]).max()),
            "theta_fit_residual": 0.0,
            "theta_slopes": {},
        }
        if len(self.points) > 2:
            times = self.times
            design = np.stack([times, np.ones_like(times)], axis=1)
            for pair in self.points[0].theta:
                series = np.array([p.theta[pair] for p in self.points])
                coefficients, *_ = np.linalg.lstsq(design, series, rcond=None)
                fit = float(np.abs(design @ coefficients - series).max())
                stats["theta_fit_residual"] = max(stats["theta_fit_residual"], fit)
                stats["theta_slopes"][f"theta{pair[0]}{pair[1]}"] = float(coefficients[0])
        return stats

    def write_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(self.columns())
            for row in self.rows():
                writer.writerow([f"{value:.17g}" for value in row])

    def write_sidecar(self, path):
        return dump_json(self.drift_statistics(), path)


def simulate(H, b0, t0, t1, steps, angle_variables):
    """Sample the factorization flow of *H* from *b0* on ``steps`` grid points.

    ``steps == 1`` returns the single point at ``t0``.

    :param angle_variables: callable mapping a point of AN to its angle data
        (``spectrum.eigenvalues``, ``r`` and ``theta``), usually
        :func:`symmetric_toda.actionangle.angle_variables`
    """
    if steps < 1:
        raise InputError(f"steps must be positive, got {steps}")
    if steps > 1 and not t1 > t0:
        raise InputError(f"t1 must be greater than t0, got [{t0}, {t1}]")
    b0 = _as_an(b0)
    times = np.linspace(t0, t1, steps) if steps > 1 else np.array([float(t0)])
    points = []
    b = factorization_flow(H, b0, times[0])
    previous = times[0]
    for t in times:
        b = factorization_flow(H, b, t - previous)
        previous = t
        angles = angle_variables(b)
        points.append(
            TrajectoryPoint(
                t=float(t),
                b=b,
                hamiltonian=H.value(b),
                actions=angles.spectrum.eigenvalues,
                r=angles.r,
                theta=dict(angles.theta),
            ),
        )
    return Trajectory(H, points)
