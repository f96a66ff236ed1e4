# Copyright (c) 2024 symmetric-toda contributors.
# SPDX-License-Identifier: GPL-3.0-or-later
"""
Weyl group elements of type A, double Bruhat cells of AN and leaf dimensions.

Permutations are written in one-line notation with 1-based values, u being
the tuple ``(u(1), ..., u(n))``. Its permutation matrix has a 1 at
``(i, u(i))``.

A point b ∈ B₊ lies in the cell B₊ ∩ B₋uB₋ for the u read off the ranks of
the upper right corners ``r(i, j) = rank b[1..i, j..n]``, which do not change
under multiplication by B₋ on either side.
"""
import dataclasses
import functools
import itertools
import logging
import typing

import numpy as np

from .actionangle import eigenvalue_function
from .checks.core import CheckRecord
from .checks.core import Report
from .errors import ConsistencyError
from .errors import InputError
from .errors import NumericalError
from .groups import ANElement
from .groups import matrix_of
from .groups import random_positive_diagonal
from .poisson import bivector_rank
from .poisson import bracket_scale
from .poisson import poisson_bracket
from .utils import numerical_rank
from .utils import relative_residual

logger = logging.getLogger(__name__)

RANK_RTOL = 1e-8
RANK_BAND = 100.0


@dataclasses.dataclass(frozen=True)
class WeylElement:
    """A permutation of {1, ..., n} in one-line notation.

    >>> WeylElement((2, 3, 1)).cycles()
    [(1, 2, 3)]
    >>> WeylElement((1, 1))
    Traceback (most recent call last):
    ...
    symmetric_toda.errors.InputError: (1, 1) is not a permutation of 1..2
    """

    permutation: typing.Tuple[int, ...]

    def __post_init__(self):
        permutation = tuple(int(x) for x in self.permutation)
        if sorted(permutation) != list(range(1, len(permutation) + 1)):
            raise InputError(
                f"{permutation} is not a permutation of 1..{len(permutation)}",
            )
        object.__setattr__(self, "permutation", permutation)

    @property
    def n(self):
        return len(self.permutation)

    def __call__(self, i):
        return self.permutation[i - 1]

    def __mul__(self, other):
        """Composition, (u * v)(i) = u(v(i))."""
        if other.n != self.n:
            raise InputError(f"cannot compose elements of S_{self.n} and S_{other.n}")
        return WeylElement(tuple(self(other(i)) for i in range(1, self.n + 1)))

    def inverse(self):
        inverse = [0] * self.n
        for i, value in enumerate(self.permutation, start=1):
            inverse[value - 1] = i
        return WeylElement(tuple(inverse))

    @property
    def matrix(self):
        matrix = np.zeros((self.n, self.n))
        for i, value in enumerate(self.permutation):
            matrix[i, value - 1] = 1.0
        return matrix

    def length(self):
        return sum(
            1
            for a, b in itertools.combinations(self.permutation, 2)
            if a > b
        )

    def cycles(self):
        """Disjoint cycles, each starting from its smallest entry.

        >>> WeylElement((2, 1, 4, 3)).cycles()
        [(1, 2), (3, 4)]
        """
        seen = set()
        cycles = []
        for start in range(1, self.n + 1):
            if start in seen:
                continue
            cycle = []
            position = start
            while position not in seen:
                seen.add(position)
                cycle.append(position)
                position = self(position)
            cycles.append(tuple(cycle))
        return cycles

    def reduced_word(self):
        """Positions k_1, ..., k_l with matrix(u) = S_{k_1} ... S_{k_l}.

        S_k is the permutation matrix of the adjacent transposition (k, k+1).
        The word is found by sorting the one-line notation with adjacent
        swaps, so it has length l(u).

        >>> WeylElement((2, 3, 1)).reduced_word()
        [2, 1]
        """
        line = list(self.permutation)
        word = []
        changed = True
        while changed:
            changed = False
            for k in range(1, self.n):
                if line[k - 1] > line[k]:
                    line[k - 1], line[k] = line[k], line[k - 1]
                    word.append(k)
                    changed = True
        return word

    def __str__(self):
        return str(list(self.permutation))


def identity(n):
    """
    >>> identity(3)
    WeylElement(permutation=(1, 2, 3))
    """
    return WeylElement(tuple(range(1, n + 1)))


def simple_reflection(n, k):
    permutation = list(range(1, n + 1))
    permutation[k - 1], permutation[k] = permutation[k], permutation[k - 1]
    return WeylElement(tuple(permutation))


def coxeter_element(n):
    """The n-cycle (2, 3, ..., n, 1).

    >>> str(coxeter_element(4))
    '[2, 3, 4, 1]'
    """
    return WeylElement(tuple(range(2, n + 1)) + (1,))


def all_elements(n):
    """Every element of S_n, in lexicographic order of the one-line notation."""
    return [WeylElement(p) for p in itertools.permutations(range(1, n + 1))]


def length(u):
    """Number of inversions of *u*.

    >>> length(coxeter_element(4))
    3
    """
    return u.length()


def torus_fixed_dimension(u):
    """dim ker(u - id) on the traceless diagonal matrices, #cycles(u) - 1.

    >>> torus_fixed_dimension(WeylElement((2, 1, 4, 3)))
    1
    """
    return len(u.cycles()) - 1


def predicted_leaf_dimension(u):
    """l(u) + rank(u - id) on the Cartan subalgebra.

    >>> predicted_leaf_dimension(coxeter_element(4))
    6
    >>> predicted_leaf_dimension(identity(3))
    0
    """
    dimension = u.length() + (u.n - 1) - torus_fixed_dimension(u)
    if dimension % 2:
        raise ConsistencyError(f"odd predicted leaf dimension {dimension} for u = {u}")
    return dimension


def corner_ranks(b):
    """``r[i, j] = rank b[1..i, j..n]`` for 0 <= i <= n and 1 <= j <= n + 1.

    Row 0 and column n + 1 are zero; rank thresholds are relative to the
    norm of b.
    """
    matrix = matrix_of(b)
    n = matrix.shape[0]
    floor = float(np.linalg.norm(matrix, 2))
    ranks = np.zeros((n + 1, n + 2), dtype=int)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            ranks[i, j] = numerical_rank(
                matrix[:i, j - 1 :],
                rtol=RANK_RTOL,
                floor=floor,
                band=RANK_BAND,
            )
    return ranks


def bruhat_cell(b):
    """The u with b ∈ B₋ u B₋.

    >>> bruhat_cell(ANElement([[1.0, 1.0], [0.0, 1.0]]))
    WeylElement(permutation=(2, 1))
    >>> bruhat_cell(np.diag([2.0, 0.5]))
    WeylElement(permutation=(1, 2))
    """
    ranks = corner_ranks(b)
    n = ranks.shape[0] - 1
    permutation = []
    for i in range(1, n + 1):
        hits = [
            j
            for j in range(1, n + 1)
            if ranks[i, j] - ranks[i - 1, j] - ranks[i, j + 1] + ranks[i - 1, j + 1] == 1
        ]
        if len(hits) != 1:
            raise NumericalError(f"corner ranks do not determine row {i}: {hits}")
        permutation.append(hits[0])
    try:
        return WeylElement(tuple(permutation))
    except InputError as e:
        raise NumericalError(f"corner ranks give no permutation: {e}") from e


def _elementary(n, k, t):
    x = np.eye(n)
    x[k - 1, k] = t
    return x


def sample_cell_point(u, rng, low=0.5, high=2.0):
    """A point of AN ∩ B₋uB₋, a diagonal matrix times Π x_k(t) over a reduced word.

    x_k(t) = I + t E_{k,k+1} with t drawn from ``[low, high]``.
    """
    point = random_positive_diagonal(u.n, rng)
    for k in u.reduced_word():
        point = point @ _elementary(u.n, k, rng.uniform(low, high))
    return ANElement.normalized(np.triu(point))


@dataclasses.dataclass(frozen=True)
class LeafClassification:
    u: WeylElement
    length: int
    torus_fixed_dimension: int
    predicted: int
    measured: int

    @property
    def matches(self):
        return self.predicted == self.measured

    def lines(self):
        yield f"u = {self.u}"
        yield f"length = {self.length}"
        yield f"torus fixed dimension = {self.torus_fixed_dimension}"
        yield f"predicted leaf dimension = {self.predicted}"
        yield f"measured bivector rank = {self.measured}"


def classify_leaf(b):
    b = b if isinstance(b, ANElement) else ANElement(matrix_of(b))
    u = bruhat_cell(b)
    return LeafClassification(
        u=u,
        length=u.length(),
        torus_fixed_dimension=torus_fixed_dimension(u),
        predicted=predicted_leaf_dimension(u),
        measured=bivector_rank(b, "AN"),
    )


def verify_leaf_dimension(b, tolerance=0.5, seed=None):
    """Compare the measured bivector rank with the dimension predicted by the cell."""
    leaf = classify_leaf(b)
    return Report(
        "leaf-dimension",
        [
            CheckRecord(
                f"leaf{leaf.u}",
                abs(leaf.measured - leaf.predicted),
                tolerance,
                {
                    "u": list(leaf.u.permutation),
                    "predicted": leaf.predicted,
                    "measured": leaf.measured,
                },
            ),
        ],
        seed=seed,
    )


@functools.lru_cache(maxsize=None)
def _eigenvalue_functions(n):
    return tuple(eigenvalue_function(alpha) for alpha in range(1, n + 1))


def verify_action_involution(b, tolerance=1e-6, seed=None):
    """Check {h_α, h_β}(b) = 0 for the eigenvalue functions of b bᵀ."""
    b = b if isinstance(b, ANElement) else ANElement(matrix_of(b))
    functions = _eigenvalue_functions(b.n)
    worst = 0.0
    for f1, f2 in itertools.combinations(functions, 2):
        value = poisson_bracket(f1, f2, b)
        worst = max(worst, relative_residual(value, 0.0, bracket_scale(f1, f2, b)))
    return Report(
        "action-involution",
        [CheckRecord("eigenvalue-brackets", worst, tolerance, {"n": b.n})],
        seed=seed,
    )
