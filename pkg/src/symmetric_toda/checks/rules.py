# Copyright (c) 2024 symmetric-toda contributors.
# SPDX-License-Identifier: GPL-3.0-or-later
"""Sampled numerical checks grouped into verification suites.

Each :class:`Check` yields :class:`~symmetric_toda.checks.core.CheckRecord`
instances (and occasionally :class:`~symmetric_toda.checks.core.Note`
instances) from a :class:`CheckContext`. Records with the same name coming
from several sample points are collapsed to the worst one.
"""
import dataclasses
import itertools
import math
import types
import typing

import numpy as np

from .. import actionangle
from .. import bruhat
from .. import dynamics
from .. import poisson
from .. import rootdata
from .. import symspace
from ..config import DEFAULT_TOLERANCES
from ..groups import ANElement
from ..groups import random_an_element
from ..groups import random_group_element
from ..groups import random_positive_diagonal
from ..groups import random_rotation
from ..utils import derive_rng
from ..utils import relative_residual
from ..utils import traceless
from .core import CheckRecord
from .core import Note

# Points per check for the checks that integrate flows
FLOW_SAMPLES = 3
# Largest t * (spread of the gradient spectrum) in the RK4 cross-check
CROSSVAL_EXPONENT = 2.0
# Coordinate function triples in the bracket axioms, whatever the sample count
JACOBI_TRIPLES = 50


@dataclasses.dataclass(frozen=True)
class CheckContext:
    """What a check needs to know about the run."""

    n: int
    seed: int = 0
    tolerances: typing.Mapping[str, float] = DEFAULT_TOLERANCES
    samples: int = 20

    @classmethod
    def from_config(cls, config):
        return cls(
            n=config.n,
            seed=config.seed,
            tolerances=types.MappingProxyType(dict(config.tolerances)),
            samples=config.samples,
        )

    def rng(self, name):
        """An independent generator for the check called *name*."""
        return derive_rng(self.seed, name, self.n)

    def tolerance(self, key):
        return self.tolerances[key]

    @property
    def flow_samples(self):
        return min(self.samples, FLOW_SAMPLES)


def _exceeds(residual, kept):
    # NaN counts as the worst residual
    return not math.isnan(kept) and (math.isnan(residual) or residual > kept)


def worst_records(records):
    """Keep, for every record name, the record with the largest residual."""
    worst = {}
    for record in records:
        kept = worst.get(record.name)
        if kept is None or _exceeds(record.residual, kept.residual):
            worst[record.name] = record
    return list(worst.values())


def _items(report):
    yield from report.records
    for note in report.notes:
        values = {k: v for k, v in note.items() if k not in ("name", "message")}
        yield Note(note["name"], note["message"], values)


@dataclasses.dataclass
class Check:
    """A sampled check contributing records to a suite."""

    id: typing.ClassVar[str]
    name: typing.ClassVar[str]
    tolerance_key: typing.ClassVar[str]

    def run(self, ctx):  # noqa: U100 Unused argument
        """Yield records for the context."""
        raise NotImplementedError(
            "`run()` should be implemented in {}".format(type(self).__name__),
        )

    def records(self, ctx):
        """Records and notes of :meth:`run`, collapsed by name."""
        items = list(self.run(ctx))
        notes = [item for item in items if isinstance(item, Note)]
        return worst_records([i for i in items if isinstance(i, CheckRecord)]) + notes


class RIdentities(Check):
    """σ⊗σ anti-invariance, the reflection equation, r = Σ E_α ∧ Y_α and CYBE.

    The literal difference (σ⊗1)r - (1⊗σ)r does not vanish for σ(X) = -Xᵀ;
    it is reported as a note next to the vanishing sum.
    """

    id = "R1"
    name = "r-identities"
    tolerance_key = "algebra"

    def run(self, ctx):
        report = rootdata.verify_r_identities(
            ctx.n,
            ctx.tolerance(self.tolerance_key),
            seed=ctx.seed,
        )
        yield from _items(report)


class BracketAxioms(Check):
    """Antisymmetry and Jacobi on at least ``JACOBI_TRIPLES`` random triples."""

    id = "P1"
    name = "bracket-axioms"
    tolerance_key = "jacobi"

    def run(self, ctx):
        report = poisson.verify_bracket_axioms(
            ctx.n,
            ctx.rng(self.name),
            samples=max(ctx.samples, JACOBI_TRIPLES),
            tolerance=ctx.tolerance(self.tolerance_key),
        )
        yield from report.records


class SigmaTauProperties(Check):
    """Involutions, fixed points and the monodromy T on random samples."""

    id = "ST1"
    name = "sigma-tau-properties"
    tolerance_key = "group"

    def run(self, ctx):
        rng = ctx.rng(self.name)
        for _ in range(ctx.samples):
            residuals = symspace.sigma_tau_residuals(
                random_group_element(ctx.n, rng),
                random_group_element(ctx.n, rng),
                random_rotation(ctx.n, rng),
                random_an_element(ctx.n, rng),
            )
            for name, residual in residuals.items():
                yield CheckRecord(name, residual, ctx.tolerance(self.tolerance_key))


class IwasawaRoundTrip(Check):
    id = "ST2"
    name = "iwasawa-round-trip"
    tolerance_key = "group"

    def run(self, ctx):
        rng = ctx.rng(self.name)
        tolerance = ctx.tolerance(self.tolerance_key)
        for _ in range(ctx.samples):
            b = random_an_element(ctx.n, rng)
            k = random_rotation(ctx.n, rng)
            found_b, found_k = symspace.iwasawa_factorize(b.matrix @ k.matrix.T)
            yield CheckRecord(
                "iwasawa-round-trip",
                max(
                    relative_residual(found_b.matrix, b.matrix),
                    relative_residual(found_k.matrix, k.matrix),
                ),
                tolerance,
            )
            g = random_group_element(ctx.n, rng)
            found_b, found_k = symspace.iwasawa_factorize(g)
            yield CheckRecord(
                "iwasawa-reconstruction",
                relative_residual(found_b.matrix @ found_k.matrix.T, g.matrix),
                tolerance,
            )


class SigmaAntiPoisson(Check):
    id = "ST3"
    name = "sigma-antipoisson"
    tolerance_key = "bracket"

    def run(self, ctx):
        rng = ctx.rng(self.name)
        for _ in range(ctx.samples):
            report = poisson.verify_sigma_antipoisson(
                poisson.random_polynomial_function(ctx.n, rng, name="p"),
                poisson.random_polynomial_function(ctx.n, rng, name="q"),
                random_group_element(ctx.n, rng),
                tolerance=ctx.tolerance(self.tolerance_key),
            )
            yield from report.records


class TauPoisson(Check):
    id = "ST4"
    name = "tau-poisson"
    tolerance_key = "bracket"

    def run(self, ctx):
        rng = ctx.rng(self.name)
        for _ in range(ctx.samples):
            report = symspace.verify_tau_poisson(
                poisson.random_polynomial_function(ctx.n, rng, name="p"),
                poisson.random_polynomial_function(ctx.n, rng, name="q"),
                random_group_element(ctx.n, rng),
                tolerance=ctx.tolerance(self.tolerance_key),
            )
            yield from report.records


class ANTangency(Check):
    id = "A1"
    name = "an-tangency"
    tolerance_key = "tangency"

    def run(self, ctx):
        rng = ctx.rng(self.name)
        for _ in range(ctx.samples):
            report = poisson.verify_AN_tangency(
                random_an_element(ctx.n, rng),
                tolerance=ctx.tolerance(self.tolerance_key),
            )
            yield from report.records


class HamiltoniansCommute(Check):
    """{H_j, H_k} = 0 at random points of AN for all j < k <= n."""

    id = "K1"
    name = "hamiltonians-commute"
    tolerance_key = "bracket"

    def run(self, ctx):
        rng = ctx.rng(self.name)
        pairs = list(itertools.combinations(range(1, ctx.n + 1), 2))
        for _ in range(ctx.samples):
            b = random_an_element(ctx.n, rng)
            for j, k in pairs:
                report = poisson.verify_KGK_commutativity(
                    j,
                    k,
                    b,
                    tolerance=ctx.tolerance(self.tolerance_key),
                )
                yield from report.records


class CommutationCorollary(Check):
    """Central functions and the Ad_{B₊}-invariant ratio commute after T*."""

    id = "K2"
    name = "commutation-corollary"
    tolerance_key = "bracket"

    def run(self, ctx):
        if ctx.n < 3:
            return
        rng = ctx.rng(self.name)
        invariant = poisson.borel_invariant_ratio(ctx.n)
        for _ in range(ctx.samples):
            g = random_group_element(ctx.n, rng)
            for power in (1, 2):
                report = symspace.verify_commutation_corollary(
                    poisson.trace_power(power),
                    invariant,
                    g,
                    tolerance=ctx.tolerance(self.tolerance_key),
                )
                yield from report.records


class ReflectionMonodromyBracket(Check):
    """{T*f1, T*f2} = 1/2 {f1 + τ*f1, f2 + τ*f2}∘T for arbitrary f1, f2."""

    id = "M1"
    name = "rm-pb"
    tolerance_key = "bracket"

    def run(self, ctx):
        rng = ctx.rng(self.name)
        tolerance = ctx.tolerance(self.tolerance_key)
        fixed = [
            (poisson.trace_power(1), poisson.trace_power(2)),
            (poisson.coordinate_function(1, 1), poisson.coordinate_function(2, 2)),
            (poisson.trace_power(1), poisson.coordinate_function(1, 2)),
        ]
        for _ in range(ctx.samples):
            g = random_group_element(ctx.n, rng)
            pairs = fixed + [
                (
                    poisson.random_polynomial_function(ctx.n, rng, name="p"),
                    poisson.random_polynomial_function(ctx.n, rng, name="q"),
                ),
            ]
            for f1, f2 in pairs:
                yield from symspace.verify_rmpb(f1, f2, g, tolerance).records


class FactorTwoCorollary(Check):
    id = "F1"
    name = "factor2"
    tolerance_key = "bracket"

    def run(self, ctx):
        rng = ctx.rng(self.name)
        tolerance = ctx.tolerance(self.tolerance_key)
        g11 = poisson.coordinate_function(1, 1).symmetrized()
        g12 = poisson.coordinate_function(1, 2).symmetrized()
        for _ in range(ctx.samples):
            g = random_group_element(ctx.n, rng)
            pairs = [
                (g11, g12),
                (g11, g11),
                (
                    poisson.random_polynomial_function(ctx.n, rng, name="p").symmetrized(),
                    poisson.random_polynomial_function(ctx.n, rng, name="q").symmetrized(),
                ),
            ]
            for f1, f2 in pairs:
                yield from symspace.verify_factor2_corollary(f1, f2, g, tolerance).records


class TPushforward(Check):
    id = "T1"
    name = "t-pushforward"
    tolerance_key = "pushforward"

    def run(self, ctx):
        rng = ctx.rng(self.name)
        for _ in range(ctx.samples):
            report = symspace.verify_T_pushforwards(
                random_group_element(ctx.n, rng),
                tolerance=ctx.tolerance(self.tolerance_key),
            )
            yield from report.records


def _random_hamiltonian(n, rng):
    k = int(rng.integers(1, n))
    return dynamics.ReflectionHamiltonian.single(k, n, float(rng.uniform(0.5, 1.5)))


@dataclasses.dataclass
class FlowCheck(Check):
    """Base for checks that integrate flows from small random points of AN."""

    scale: typing.ClassVar[float] = 0.3

    def initial_points(self, ctx):
        rng = ctx.rng(self.name)
        for _ in range(ctx.flow_samples):
            yield _random_hamiltonian(ctx.n, rng), random_an_element(ctx.n, rng, self.scale)


REFERENCE_POINT = ((1.0, 1.0), (0.0, 1.0))


def reference_time_constant():
    """λ for H1 at b0 = [[1, 1], [0, 1]], n = 2."""
    return dynamics.calibrate_time_constant(
        dynamics.ReflectionHamiltonian.single(1, 2),
        ANElement(REFERENCE_POINT),
    )


class TimeConstant(FlowCheck):
    """The calibrated λ does not depend on H, b0 or n."""

    id = "D1"
    name = "time-constant"
    tolerance_key = "calibration"

    def run(self, ctx):
        reference = reference_time_constant()
        yield Note(
            "time-constant",
            "λ with vector_field_flow(t) = factorization_flow(λ t)",
            {"lambda": reference},
        )
        for H, b0 in self.initial_points(ctx):
            constant = dynamics.calibrate_time_constant(H, b0)
            yield CheckRecord(
                "time-constant-invariance",
                abs(constant - reference) / abs(reference),
                ctx.tolerance(self.tolerance_key),
                {"lambda": constant, "reference": reference},
            )


class CrossValidation(FlowCheck):
    """RK4 on the vector field against the factorization flow at λt.

    The time is shortened so that t times the spread of the gradient
    spectrum stays below ``CROSSVAL_EXPONENT``.
    """

    id = "D2"
    name = "flow-crossval"
    tolerance_key = "crossval"

    def run(self, ctx):
        reference = reference_time_constant()
        horizon = 0.5 if ctx.n <= 3 else 0.1
        for H, b0 in self.initial_points(ctx):
            spread = dynamics.gradient_spread(H, b0)
            t = min(horizon, CROSSVAL_EXPONENT / spread) if spread > 0 else horizon
            yield CheckRecord(
                "rk4-vs-factorization",
                dynamics.crossval_residual(H, b0, t, reference),
                ctx.tolerance(self.tolerance_key),
                {"t": t},
            )


class Isospectrality(FlowCheck):
    id = "D3"
    name = "isospectrality"
    tolerance_key = "isospectral"

    def run(self, ctx):
        for H, b0 in self.initial_points(ctx):
            yield CheckRecord(
                "isospectral",
                dynamics.spectrum_drift(H, b0, (0.5, 1.0, 2.0)),
                ctx.tolerance(self.tolerance_key),
            )


class Conservation(FlowCheck):
    id = "D4"
    name = "conservation"
    tolerance_key = "conservation"

    def run(self, ctx):
        for H, b0 in self.initial_points(ctx):
            yield CheckRecord(
                "conserved-hamiltonians",
                dynamics.conservation_drift(H, b0, (0.5, 1.0, 2.0)),
                ctx.tolerance(self.tolerance_key),
            )


class GroupProperty(FlowCheck):
    id = "D5"
    name = "group-property"
    tolerance_key = "group"

    def run(self, ctx):
        for H, b0 in self.initial_points(ctx):
            yield CheckRecord(
                "flow-group-property",
                dynamics.group_property_residual(H, b0, 0.4, 0.7),
                ctx.tolerance(self.tolerance_key),
            )


class FlowsCommute(FlowCheck):
    id = "D6"
    name = "flows-commute"
    tolerance_key = "commute"

    def run(self, ctx):
        if ctx.n < 3:
            return
        h1 = dynamics.ReflectionHamiltonian.single(1, ctx.n)
        h2 = dynamics.ReflectionHamiltonian.single(2, ctx.n)
        for _, b0 in self.initial_points(ctx):
            report = dynamics.verify_flow_commutativity(
                h1,
                h2,
                b0,
                0.7,
                tolerance=ctx.tolerance(self.tolerance_key),
            )
            yield from report.records


class GradientPairing(Check):
    """<∇∓H(g), X> matches d/dt H(g e^{tX}) and d/dt H(e^{tX} g)."""

    id = "D7"
    name = "gradient-pairing"
    tolerance_key = "bracket"

    def run(self, ctx):
        rng = ctx.rng(self.name)
        step = 1e-6
        for _ in range(ctx.samples):
            H = _random_hamiltonian(ctx.n, rng)
            g = random_group_element(ctx.n, rng).matrix
            x = traceless(rng.uniform(-1.0, 1.0, size=(ctx.n, ctx.n)))
            plus = np.eye(ctx.n) + step * x
            minus = np.eye(ctx.n) - step * x
            left = (H.value(g @ plus) - H.value(g @ minus)) / (2 * step)
            right = (H.value(plus @ g) - H.value(minus @ g)) / (2 * step)
            scale = max(1.0, abs(H.value(g)))
            yield CheckRecord(
                "left-gradient-pairing",
                abs(np.sum(dynamics.gradient(H, g, "left").matrix * x) - left) / scale,
                ctx.tolerance(self.tolerance_key),
            )
            yield CheckRecord(
                "right-gradient-pairing",
                abs(np.sum(dynamics.gradient(H, g, "right").matrix * x) - right) / scale,
                ctx.tolerance(self.tolerance_key),
            )


class AngleLinearity(FlowCheck):
    """θ_αβ is affine in t with slopes proportional to h_α^k - h_β^k."""

    id = "AA1"
    name = "angle-linearity"
    tolerance_key = "angle-fit"

    def run(self, ctx):
        rng = ctx.rng(self.name)
        tolerances = {
            "angle-fit": ctx.tolerance("angle-fit"),
            "slope": ctx.tolerance("slope"),
        }
        for k in range(1, min(2, ctx.n - 1) + 1):
            H = dynamics.ReflectionHamiltonian.single(k, ctx.n)
            for _ in range(ctx.flow_samples):
                b0 = random_an_element(ctx.n, rng, self.scale)
                report = actionangle.verify_angle_linearity(
                    H,
                    b0,
                    actionangle.angle_time_grid(H, b0),
                    tolerances,
                )
                for record in report.records:
                    record.name = f"H{k}-{record.name}"
                yield from _items(report)
        if ctx.n == 2:
            H = dynamics.ReflectionHamiltonian.single(1, 2)
            b0 = ANElement(REFERENCE_POINT)
            slopes, _, _ = actionangle.measure_angle_rates(
                H,
                b0,
                actionangle.angle_time_grid(H, b0),
            )
            yield CheckRecord(
                "reference-slope",
                relative_residual(abs(slopes[(1, 2)]), 4.0 * math.sqrt(5.0)),
                ctx.tolerance("slope"),
                {"slope": slopes[(1, 2)]},
            )


class AnglePrefactor(FlowCheck):
    id = "AA2"
    name = "angle-prefactor"
    tolerance_key = "angle-fit"

    def run(self, ctx):
        for H, b0 in self.initial_points(ctx):
            report = actionangle.angle_prefactor_check(
                H,
                b0,
                actionangle.angle_time_grid(H, b0),
                tolerance=ctx.tolerance(self.tolerance_key),
            )
            yield from report.records


class SpectralInvariants(Check):
    """Σ Q_α = I, Q_α Q_β = δ Q_α, reconstruction and Σ r_α = 1."""

    id = "AA3"
    name = "spectral-invariants"
    tolerance_key = "spectrum"

    def run(self, ctx):
        rng = ctx.rng(self.name)
        for _ in range(ctx.samples):
            b = random_an_element(ctx.n, rng)
            monodromy = symspace.reflection_monodromy(b).matrix
            spectrum = actionangle.spectral_decomposition(monodromy)
            for name, residual in spectrum.invariant_residuals(monodromy).items():
                yield CheckRecord(name, residual, ctx.tolerance(self.tolerance_key))
            yield CheckRecord(
                "sum-r",
                abs(float(np.sum(actionangle.angle_variables(b).r)) - 1.0),
                ctx.tolerance("sum-r"),
            )


class Sym2Angles(Check):
    """The closed form pairing agrees with the explicit Sym² computation."""

    id = "AA4"
    name = "sym2-angles"
    tolerance_key = "spectrum"

    def run(self, ctx):
        if ctx.n > 4:
            return
        rng = ctx.rng(self.name)
        for _ in range(ctx.samples):
            b = random_an_element(ctx.n, rng)
            yield CheckRecord(
                "sym2-vs-closed-form",
                relative_residual(
                    actionangle.sym2_angle_variables(b).r,
                    actionangle.angle_variables(b).r,
                ),
                ctx.tolerance(self.tolerance_key),
            )


class Shapovalov(Check):
    id = "AA5"
    name = "shapovalov"
    tolerance_key = "shapovalov"

    def run(self, ctx):
        report = actionangle.shapovalov_check(
            ctx.n,
            ctx.rng(self.name),
            samples=ctx.samples,
            tolerance=ctx.tolerance(self.tolerance_key),
        )
        yield from report.records


def _cells(n, rng):
    cells = {
        bruhat.identity(n),
        bruhat.coxeter_element(n),
        bruhat.simple_reflection(n, 1),
    }
    if n >= 3:
        cells.add(bruhat.WeylElement(tuple(int(x) + 1 for x in rng.permutation(n))))
    return sorted(cells, key=lambda u: u.permutation)


class LeafDimension(Check):
    """Measured bivector rank against l(u) + rank(u - id) in several cells."""

    id = "L1"
    name = "leaf-dimension"
    tolerance_key = "rank"

    def run(self, ctx):
        rng = ctx.rng(self.name)
        for u in _cells(ctx.n, rng):
            for _ in range(max(1, ctx.samples // 4)):
                b = bruhat.sample_cell_point(u, rng)
                report = bruhat.verify_leaf_dimension(
                    b,
                    tolerance=ctx.tolerance(self.tolerance_key),
                )
                yield from report.records
        yield CheckRecord(
            "coxeter-dimension",
            abs(bruhat.predicted_leaf_dimension(bruhat.coxeter_element(ctx.n)) - 2 * (ctx.n - 1)),
            ctx.tolerance(self.tolerance_key),
        )


class PredictedParity(Check):
    """Predicted leaf dimensions are even, exhaustively for n <= 5."""

    id = "L2"
    name = "predicted-parity"
    tolerance_key = "rank"

    def run(self, ctx):
        if ctx.n <= 5:
            elements = bruhat.all_elements(ctx.n)
        else:
            rng = ctx.rng(self.name)
            elements = [
                bruhat.WeylElement(tuple(int(x) + 1 for x in rng.permutation(ctx.n)))
                for _ in range(50)
            ]
        odd = sum(
            1 for u in elements if (u.length() + (ctx.n - len(u.cycles()))) % 2
        )
        yield CheckRecord(
            "even-leaf-dimensions",
            odd,
            ctx.tolerance(self.tolerance_key),
            {"elements": len(elements)},
        )


class CellRoundTrip(Check):
    """bruhat_cell recovers u from b₋ u b₋' and from sampled cell points."""

    id = "L3"
    name = "cell-round-trip"
    tolerance_key = "rank"

    def run(self, ctx):
        rng = ctx.rng(self.name)
        mismatches = 0
        trials = 0
        for u in _cells(ctx.n, rng):
            for _ in range(max(1, ctx.samples // 4)):
                lower = [
                    np.tril(rng.uniform(-1.0, 1.0, size=(ctx.n, ctx.n)), -1)
                    + random_positive_diagonal(ctx.n, rng)
                    for _ in range(2)
                ]
                product = lower[0] @ u.matrix @ lower[1]
                mismatches += bruhat.bruhat_cell(product) != u
                mismatches += bruhat.bruhat_cell(bruhat.sample_cell_point(u, rng)) != u
                trials += 2
        yield CheckRecord(
            "cell-round-trip",
            mismatches,
            ctx.tolerance(self.tolerance_key),
            {"trials": trials},
        )


class ActionInvolution(Check):
    """Eigenvalue functions of b bᵀ Poisson-commute on the Coxeter leaf."""

    id = "L4"
    name = "action-involution"
    tolerance_key = "bracket"

    def run(self, ctx):
        rng = ctx.rng(self.name)
        u = bruhat.coxeter_element(ctx.n)
        for _ in range(max(1, ctx.samples // 4)):
            report = bruhat.verify_action_involution(
                bruhat.sample_cell_point(u, rng),
                tolerance=ctx.tolerance(self.tolerance_key),
            )
            yield from report.records


class OrbitIntersection(Check):
    id = "O1"
    name = "orbit-intersection"
    tolerance_key = "rank"

    def run(self, ctx):
        rng = ctx.rng(self.name)
        for _ in range(ctx.samples):
            b = random_an_element(ctx.n, rng)
            dimension = actionangle.orbit_leaf_intersection_dim(b)
            yield CheckRecord(
                "intersection-dimension",
                abs(dimension - (ctx.n - 1)),
                ctx.tolerance(self.tolerance_key),
                {"dimension": dimension, "expected": ctx.n - 1},
            )


class LevelSet(Check):
    id = "O2"
    name = "level-set"
    tolerance_key = "spectrum"

    def run(self, ctx):
        rng = ctx.rng(self.name)
        for _ in range(max(1, ctx.samples // 4)):
            b = random_an_element(ctx.n, rng)
            diagonals = [np.diag(random_positive_diagonal(ctx.n, rng)) for _ in range(2)]
            report = actionangle.verify_level_set(
                b,
                diagonals,
                tolerance=ctx.tolerance(self.tolerance_key),
            )
            yield from report.records


class LevelSetComposition(Check):
    """Exploratory: do successive translations commute and compose?"""

    id = "O3"
    name = "level-set-composition"
    tolerance_key = "spectrum"

    def run(self, ctx):
        rng = ctx.rng(self.name)
        b = random_an_element(ctx.n, rng)
        d1, d2 = (np.diag(random_positive_diagonal(ctx.n, rng)) for _ in range(2))
        gaps = actionangle.level_set_composition_check(b, d1, d2)
        yield Note(
            "level-set-composition",
            "successive translations compared with each other and with D1 D2",
            gaps,
        )
