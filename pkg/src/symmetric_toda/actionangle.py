# Copyright (c) 2024 symmetric-toda contributors.
# SPDX-License-Identifier: GPL-3.0-or-later
"""Action and angle variables of the reflection flows.

The actions are the eigenvalues h_1 > ... > h_n of M = b bᵀ. The angles come
from pairing the eigenprojections of the spherical vector I ∈ Sym²Rⁿ with
the extremal weight vector e_n e_nᵀ, which reduces to

    r_α = (v_α · e_n)²,      θ_αβ = log(r_α / r_β),

for unit eigenvectors v_α. Along the flow of H = Σ c_k H_k the angles move
linearly with rate 2(f(h_α) - f(h_β)), f(h) = Σ 2k c_k h^k.
"""
import dataclasses
import itertools
import logging
import typing

import numpy as np
import scipy.linalg

from .checks.core import CheckRecord
from .checks.core import Report
from .dynamics import ReflectionHamiltonian  # noqa: F401 used in doctests
from .dynamics import factorization_flow
from .errors import DegeneracyError
from .errors import InputError
from .errors import NumericalError
from .groups import ANElement
from .groups import matrix_of
from .poisson import SmoothFunction
from .symspace import reflection_monodromy
from .symspace import reverse_cholesky
from .symspace import upper_cholesky
from .utils import as_square_matrix
from .utils import numerical_rank
from .utils import relative_residual

logger = logging.getLogger(__name__)

GAP_TOL = 1e-8
R_FLOOR = 1e-12
# Smallest pairing kept on the time grids of the angle checks
ANGLE_FLOOR = 1e-6
SYMMETRY_TOL = 1e-9
DET_WINDOW = 1e-6
RANK_RTOL = 1e-8
RANK_BAND = 100.0


@dataclasses.dataclass(frozen=True, eq=False)
class SpectralData:
    """Descending eigenvalues and unit eigenvectors (columns) of an SPD matrix."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self):
        return len(self.eigenvalues)

    @property
    def projectors(self):
        return [np.outer(v, v) for v in self.eigenvectors.T]

    def reconstruct(self):
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.T

    def invariant_residuals(self, matrix):
        """Residuals of Σ Q = I, Q_α Q_β = δ Q_α, Σ h Q = M and Π h = 1."""
        projectors = self.projectors
        n = self.n
        resolution = relative_residual(sum(projectors), np.eye(n))
        orthogonality = max(
            relative_residual(a @ b, a if i == j else np.zeros((n, n)))
            for (i, a), (j, b) in itertools.product(enumerate(projectors), repeat=2)
        )
        return {
            "resolution-of-identity": resolution,
            "projector-orthogonality": orthogonality,
            "reconstruction": relative_residual(self.reconstruct(), matrix),
            "unit-determinant": abs(float(np.prod(self.eigenvalues)) - 1.0),
        }


def _symmetric_positive(matrix):
    matrix = as_square_matrix(matrix_of(matrix), "matrix")
    if np.linalg.norm(matrix - matrix.T) > SYMMETRY_TOL * max(1.0, np.linalg.norm(matrix)):
        raise InputError("matrix is not symmetric")
    return 0.5 * (matrix + matrix.T)


def spectral_decomposition(matrix):
    """Spectral data of a symmetric positive definite M with det 1.

    Each eigenvector is signed so that its largest magnitude entry is
    positive.

    >>> data = spectral_decomposition(np.diag([0.25, 4.0]))
    >>> data.eigenvalues.tolist()
    [4.0, 0.25]
    >>> spectral_decomposition(np.eye(2))
    Traceback (most recent call last):
    ...
    symmetric_toda.errors.DegeneracyError: spectrum is degenerate: eigenvalue gap 0.000e+00
    """
    matrix = _symmetric_positive(matrix)
    values, vectors = scipy.linalg.eigh(matrix)
    if values[0] <= 0.0:
        raise InputError(f"matrix is not positive definite (eigenvalue {values[0]:.3e})")
    det = float(np.prod(values))
    if abs(det - 1.0) > DET_WINDOW:
        raise InputError(f"matrix has det {det:.10g} != 1")
    values = values[::-1].copy()
    vectors = vectors[:, ::-1].copy()
    gap = float(np.min(values[:-1] - values[1:]))
    if gap <= GAP_TOL * max(1.0, values[0]):
        raise DegeneracyError(f"spectrum is degenerate: eigenvalue gap {gap:.3e}")
    for column in range(vectors.shape[1]):
        v = vectors[:, column]
        if v[np.argmax(np.abs(v))] < 0.0:
            vectors[:, column] = -v
    return SpectralData(values, vectors)


def spherical_vector(n):
    """The SO(n)-fixed vector of Sym²Rⁿ, the identity matrix.

    >>> spherical_vector(2).tolist()
    [[1.0, 0.0], [0.0, 1.0]]
    """
    if n < 2:
        raise InputError(f"n must be at least 2, got {n}")
    return np.eye(n)


def sym2_action(x, s):
    """Algebra action X·S = X S + S Xᵀ on Sym²Rⁿ."""
    return x @ s + s @ x.T


def shapovalov_check(n, rng, samples=20, tolerance=1e-10, seed=None):
    """Contravariance of the trace form: <τ(X)·S, S'> = <S, X·S'> with τ(X) = Xᵀ."""
    worst = 0.0
    invariance = 0.0
    for _ in range(samples):
        x = rng.uniform(-1.0, 1.0, size=(n, n))
        x -= np.trace(x) / n * np.eye(n)
        s = rng.uniform(-1.0, 1.0, size=(n, n))
        s = s + s.T
        s_prime = rng.uniform(-1.0, 1.0, size=(n, n))
        s_prime = s_prime + s_prime.T
        lhs = np.trace(sym2_action(x.T, s) @ s_prime)
        rhs = np.trace(s @ sym2_action(x, s_prime))
        worst = max(worst, relative_residual(lhs, rhs))
        q, _ = np.linalg.qr(rng.normal(size=(n, n)))
        invariance = max(
            invariance,
            float(np.abs(q @ spherical_vector(n) @ q.T - np.eye(n)).max()),
        )
    return Report(
        "shapovalov",
        [
            CheckRecord("contravariance", worst, tolerance, {"samples": samples}),
            CheckRecord("spherical-invariance", invariance, 1e-12, {"samples": samples}),
        ],
        seed=seed,
    )


@dataclasses.dataclass(frozen=True, eq=False)
class AngleData:
    """Pairings r_α (summing to 1) and log-ratios θ_αβ, α < β, 1-based keys."""

    r: np.ndarray
    theta: typing.Mapping[typing.Tuple[int, int], float]
    spectrum: SpectralData


def _angles_from_pairings(r, spectrum):
    if np.min(r) <= R_FLOOR:
        raise DegeneracyError(
            f"angle chart breaks down: pairing r_{int(np.argmin(r)) + 1} = {np.min(r):.3e}",
        )
    theta = {
        (a + 1, b + 1): float(np.log(r[a] / r[b]))
        for a, b in itertools.combinations(range(len(r)), 2)
    }
    return AngleData(r, theta, spectrum)


def angle_variables(b):
    """Angle data of b ∈ AN from the closed form r_α = (v_α · e_n)².

    >>> data = angle_variables(ANElement([[1.0, 1.0], [0.0, 1.0]]))
    >>> [round(float(x), 4) for x in data.r]
    [0.2764, 0.7236]
    """
    spectrum = spectral_decomposition(reflection_monodromy(b).matrix)
    r = spectrum.eigenvectors[-1, :] ** 2
    return _angles_from_pairings(r, spectrum)


def _sym2_basis(n):
    basis = []
    for i in range(n):
        for j in range(i, n):
            unit = np.zeros((n, n))
            if i == j:
                unit[i, i] = 1.0
            else:
                unit[i, j] = unit[j, i] = 1.0 / np.sqrt(2.0)
            basis.append(unit)
    return basis


def sym2_angle_variables(b):
    """Angle data computed in the explicit Sym²Rⁿ representation.

    M acts by S ↦ M S M. The spherical vector I is projected on the
    eigenlines of eigenvalue h_α² and paired with e_n e_nᵀ through the trace
    form.
    """
    monodromy = reflection_monodromy(b).matrix
    spectrum = spectral_decomposition(monodromy)
    n = spectrum.n
    basis = _sym2_basis(n)
    operator = np.array(
        [[np.trace(s @ monodromy @ t @ monodromy) for t in basis] for s in basis],
    )
    values, vectors = scipy.linalg.eigh(operator)
    spherical = np.array([np.trace(s @ spherical_vector(n)) for s in basis])
    extremal = np.zeros((n, n))
    extremal[n - 1, n - 1] = 1.0
    weight = np.array([np.trace(s @ extremal) for s in basis])
    r = np.empty(n)
    for alpha, h in enumerate(spectrum.eigenvalues):
        close = np.abs(values - h * h) <= 1e-8 * max(1.0, values.max())
        if np.count_nonzero(close) != 1:
            raise DegeneracyError(
                f"eigenvalue h_{alpha + 1}^2 is not simple on Sym^2",
            )
        line = vectors[:, close][:, 0]
        r[alpha] = (weight @ line) * (line @ spherical)
    return _angles_from_pairings(r, spectrum)


def eigenvalue_function(alpha):
    """g ↦ h_α(g gᵀ), the α-th largest eigenvalue, with analytic gradient."""

    def _pair(m):
        values, vectors = scipy.linalg.eigh(m @ m.T)
        return values[::-1][alpha - 1], vectors[:, ::-1][:, alpha - 1]

    def evaluate(m):
        return _pair(m)[0]

    def gradient(m):
        _, v = _pair(m)
        return 2.0 * np.outer(v, v) @ m

    return SmoothFunction(evaluate, gradient, f"h{alpha}")


def rate_eigenvalues(H, b):
    """Eigenvalues of ∇⁺H(b) on the eigenlines of b bᵀ, in descending order of h."""
    spectrum = spectral_decomposition(reflection_monodromy(b).matrix)
    grad = H.right_gradient(b)
    return np.array([v @ grad @ v for v in spectrum.eigenvectors.T])


def _fit(times, series):
    design = np.stack([times, np.ones_like(times)], axis=1)
    coefficients, *_ = np.linalg.lstsq(design, series, rcond=None)
    return coefficients[0], float(np.abs(design @ coefficients - series).max())


def measure_angle_rates(H, b0, times):
    """Fit θ_αβ(t) along the factorization flow.

    :return: ``(slopes, fit residuals, angle data per time)`` with slopes and
        residuals keyed by the pair ``(α, β)``
    """
    times = np.asarray(times, dtype=float)
    if times.size < 3 or np.any(np.diff(times) <= 0):
        raise InputError("time grid needs at least 3 strictly increasing points")
    samples = [angle_variables(factorization_flow(H, b0, t)) for t in times]
    slopes = {}
    residuals = {}
    for pair in samples[0].theta:
        series = np.array([data.theta[pair] for data in samples])
        slopes[pair], residuals[pair] = _fit(times, series)
    return slopes, residuals, samples


def verify_angle_linearity(H, b0, times, tolerances=None, seed=None):
    """Check that the angles move linearly and at the predicted relative rates.

    For a single-term Hamiltonian c H_k the ratio Δ = slope / (h_α^k - h_β^k)
    is measured for every pair and must be shared by all pairs. Independently
    every slope is compared with 2 (f(h_α) - f(h_β)) from the eigenvalues of
    the right gradient.
    """
    tolerances = {"angle-fit": 1e-6, "slope": 1e-6, **(tolerances or {})}
    b0 = b0 if isinstance(b0, ANElement) else ANElement(matrix_of(b0))
    slopes, residuals, samples = measure_angle_rates(H, b0, times)
    h = samples[0].spectrum.eigenvalues
    rates = rate_eigenvalues(H, b0)
    report = Report("angle-linearity", seed=seed)
    report.add(
        CheckRecord(
            "theta-linear-fit",
            max(residuals.values()),
            tolerances["angle-fit"],
            {"pairs": len(residuals)},
        ),
    )
    predicted = {
        (a, b): 2.0 * (rates[a - 1] - rates[b - 1]) for a, b in slopes
    }
    report.add(
        CheckRecord(
            "slope-vs-gradient-eigenvalues",
            max(relative_residual(slopes[p], predicted[p]) for p in slopes),
            tolerances["slope"],
        ),
    )
    if len(H.coefficients) == 1:
        k, c = next(iter(H.coefficients.items()))
        deltas = np.array(
            [slopes[(a, b)] / (h[a - 1] ** k - h[b - 1] ** k) for a, b in slopes],
        )
        spread = float((deltas.max() - deltas.min()) / abs(deltas.mean()))
        report.add(
            CheckRecord(
                "slope-ratio-shared",
                spread,
                tolerances["slope"],
                {"delta": float(deltas.mean()), "k": k},
            ),
        )
        report.add_note(
            "delta",
            "measured proportionality constant of the angle rates",
            delta=float(deltas.mean()),
            per_coefficient=float(deltas.mean()) / c,
            expected=4.0 * k,
        )
    return report


def _predicted_pairings(initial, rho, t):
    weights = initial * np.exp(t * (rho - rho.max()))
    return weights / weights.sum()


def angle_time_grid(H, b0, t_max=0.5, points=6, floor=ANGLE_FLOOR):
    """An evenly spaced grid [0, T] on which the angle chart stays usable.

    log r_α(t) is concave in t, so every pairing is smallest at an end of
    [0, T]. T is halved from *t_max* until the predicted pairings at T stay
    above *floor*, or above their initial minimum when that is smaller.

    >>> H = ReflectionHamiltonian.single(1, 2)
    >>> float(angle_time_grid(H, ANElement([[1.0, 1.0], [0.0, 1.0]]))[-1])
    0.5
    """
    b0 = b0 if isinstance(b0, ANElement) else ANElement(matrix_of(b0))
    rho = 2.0 * rate_eigenvalues(H, b0)
    initial = angle_variables(b0).r
    bound = min(floor, float(initial.min()))
    horizon = float(t_max)
    for _ in range(60):
        if float(_predicted_pairings(initial, rho, horizon).min()) >= bound:
            break
        horizon /= 2.0
    else:
        raise DegeneracyError(f"no usable angle window below t = {t_max} for {H.name}")
    if horizon < t_max:
        logger.debug("angle window for %s shortened to t = %.3e", H.name, horizon)
    return np.linspace(0.0, horizon, points)


def angle_prefactor_check(H, b0, times, tolerance=1e-6, seed=None):
    """Compare r_α(t) with r_α(0) e^{tρ_α} / Σ_β r_β(0) e^{tρ_β}, ρ_α = 2 f(h_α)."""
    b0 = b0 if isinstance(b0, ANElement) else ANElement(matrix_of(b0))
    rho = 2.0 * rate_eigenvalues(H, b0)
    initial = angle_variables(b0).r
    worst = 0.0
    for t in times:
        predicted = _predicted_pairings(initial, rho, t)
        measured = angle_variables(factorization_flow(H, b0, t)).r
        worst = max(worst, float(np.abs(measured - predicted).max()))
    return Report(
        "angle-prefactor",
        [CheckRecord("pairing-evolution", worst, tolerance, {"points": len(times)})],
        seed=seed,
    )


def _positive_diagonal(d, n):
    d = np.asarray(matrix_of(d), dtype=float)
    if d.ndim == 2:
        if d.shape != (n, n) or np.any(d - np.diag(np.diag(d)) != 0.0):
            raise InputError("D must be an n x n diagonal matrix")
        d = np.diag(d)
    if d.shape != (n,) or not np.all(np.isfinite(d)):
        raise InputError(f"D must have {n} finite diagonal entries")
    if np.any(d <= 0.0):
        raise InputError("D must have a positive diagonal")
    det = float(np.prod(d))
    if abs(det - 1.0) > 1e-9:
        raise InputError(f"D has det {det:.10g} != 1")
    return d


def level_set_translate(b, d):
    """Move b along its level set by the positive diagonal D.

    With b bᵀ = U Λ Uᵀ, P = U D Uᵀ = βᵀ β for β ∈ AN and
    b' = reverse_cholesky(β b bᵀ β⁻¹).

    :return: ``(b', β)``; β is the witness of b' b'ᵀ = β (b bᵀ) β⁻¹
    :raises NumericalError: when β b bᵀ β⁻¹ is not symmetric
    """
    b = b if isinstance(b, ANElement) else ANElement(matrix_of(b))
    d = _positive_diagonal(d, b.n)
    monodromy = reflection_monodromy(b).matrix
    spectrum = spectral_decomposition(monodromy)
    u = spectrum.eigenvectors
    beta = upper_cholesky((u * d) @ u.T)
    conjugated = beta.matrix @ monodromy @ np.linalg.inv(beta.matrix)
    asymmetry = np.linalg.norm(conjugated - conjugated.T) / max(
        1.0,
        np.linalg.norm(conjugated),
    )
    if asymmetry > SYMMETRY_TOL:
        raise NumericalError(f"translated matrix is not symmetric ({asymmetry:.3e})")
    return reverse_cholesky(0.5 * (conjugated + conjugated.T)), beta


def verify_level_set(b, diagonals, tolerance=1e-9, seed=None):
    """Spectrum preservation, witness residual, D = I and injectivity in D."""
    b = b if isinstance(b, ANElement) else ANElement(matrix_of(b))
    monodromy = reflection_monodromy(b).matrix
    spectrum = np.linalg.eigvalsh(monodromy)
    translated = []
    spectral = 0.0
    witness = 0.0
    for d in diagonals:
        moved, beta = level_set_translate(b, d)
        translated.append(moved.matrix)
        spectral = max(
            spectral,
            relative_residual(np.linalg.eigvalsh(reflection_monodromy(moved).matrix), spectrum),
        )
        witness = max(
            witness,
            relative_residual(
                moved.matrix @ moved.matrix.T,
                beta.matrix @ monodromy @ np.linalg.inv(beta.matrix),
            ),
        )
    identity, _ = level_set_translate(b, np.ones(b.n))
    distances = [
        float(np.linalg.norm(x - y)) for x, y in itertools.combinations(translated, 2)
    ]
    collisions = sum(1 for distance in distances if distance <= 1e-8)
    return Report(
        "level-set",
        [
            CheckRecord("spectrum-preserved", spectral, tolerance),
            CheckRecord("witness", witness, tolerance),
            CheckRecord(
                "identity-translation",
                relative_residual(identity.matrix, b.matrix),
                tolerance,
            ),
            CheckRecord(
                "injective-in-D",
                collisions,
                0.5,
                {"min_distance": min(distances) if distances else None},
            ),
        ],
        seed=seed,
    )


def level_set_composition_check(b, d1, d2):
    """Measure how far successive translations are from an action of A.

    Nothing here is asserted; the result is reported as information.

    :return: mapping with the commutator and composition gaps
    """
    first, _ = level_set_translate(level_set_translate(b, d1)[0], d2)
    second, _ = level_set_translate(level_set_translate(b, d2)[0], d1)
    product, _ = level_set_translate(
        b,
        _positive_diagonal(d1, len(first.matrix)) * _positive_diagonal(d2, len(first.matrix)),
    )
    return {
        "commutator": relative_residual(first.matrix, second.matrix),
        "composition": relative_residual(first.matrix, product.matrix),
    }


def _an_basis(n):
    basis = []
    for k in range(1, n):
        diagonal = np.zeros(n)
        diagonal[k - 1] = 1.0
        diagonal[k] = -1.0
        basis.append(np.diag(diagonal))
    for i, j in itertools.combinations(range(n), 2):
        unit = np.zeros((n, n))
        unit[i, j] = 1.0
        basis.append(unit)
    return basis


def orbit_leaf_intersection_dim(b):
    """dim of {ξM - Mξ} ∩ {XM + MXᵀ} at M = b bᵀ, ξ and X ranging over a ⊕ n.

    :raises NumericalError: when a singular value sits too close to the
        rank threshold
    """
    b = b if isinstance(b, ANElement) else ANElement(matrix_of(b))
    monodromy = reflection_monodromy(b).matrix
    spectral_decomposition(monodromy)
    basis = _an_basis(b.n)
    orbit = np.stack([(x @ monodromy - monodromy @ x).reshape(-1) for x in basis])
    image = np.stack([(x @ monodromy + monodromy @ x.T).reshape(-1) for x in basis])

    def rank(matrix):
        return numerical_rank(matrix, rtol=RANK_RTOL, band=RANK_BAND)

    dimension = rank(orbit) + rank(image) - rank(np.vstack([orbit, image]))
    logger.debug("orbit-leaf intersection dimension %d at n=%d", dimension, b.n)
    return dimension
