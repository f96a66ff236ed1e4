# Copyright (c) 2024 symmetric-toda contributors.
# SPDX-License-Identifier: GPL-3.0-or-later
"""Elements of SL(n, R) and of its subgroups AN and SO(n)."""
import dataclasses
import logging
import typing

import numpy as np
import scipy.linalg
import scipy.stats

from .errors import InputError
from .utils import as_square_matrix
from .utils import traceless

logger = logging.getLogger(__name__)

DET_TOL = 1e-9
RESCALE_WINDOW = 1e-6
ORTHOGONALITY_TOL = 1e-9


def matrix_of(value):
    """Return the underlying array of a group element or array-like."""
    if isinstance(value, GroupElement):
        return value.matrix
    return np.asarray(value, dtype=float)


@dataclasses.dataclass(frozen=True, eq=False)
class GroupElement:
    """An element of SL(n, R).

    The matrix is copied and made read-only on construction.

    >>> GroupElement([[2.0, 0.0], [0.0, 0.5]]).n
    2
    >>> GroupElement([[2.0, 0.0], [0.0, 2.0]])
    Traceback (most recent call last):
    ...
    symmetric_toda.errors.InputError: group element has det 4 != 1
    """

    matrix: np.ndarray

    kind: typing.ClassVar[str] = "group element"

    def __post_init__(self):
        matrix = as_square_matrix(self.matrix, self.kind)
        self._validate(matrix)
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    def _validate(self, matrix):
        det = np.linalg.det(matrix)
        if abs(det - 1.0) > DET_TOL:
            raise InputError(f"{self.kind} has det {det:.10g} != 1")

    @property
    def n(self):
        return self.matrix.shape[0]

    @classmethod
    def normalized(cls, value):
        """Build an element after rescaling the determinant to 1.

        Rescaling is only applied when ``|det - 1| < 1e-6``; anything
        further away is rejected so that drift never silently compounds.
        """
        matrix = as_square_matrix(value, cls.kind)
        det = np.linalg.det(matrix)
        if not abs(det - 1.0) < RESCALE_WINDOW:
            raise InputError(
                f"{cls.kind} has det {det:.10g}, outside the rescale window",
            )
        if det != 1.0:
            matrix = matrix / det ** (1.0 / matrix.shape[0])
        return cls(matrix)

    def __matmul__(self, other):
        return matrix_of(self) @ matrix_of(other)

    def __repr__(self):
        return f"{type(self).__name__}({self.matrix.tolist()!r})"


class ANElement(GroupElement):
    """Upper triangular element of SL(n, R) with positive diagonal."""

    kind = "AN element"

    def _validate(self, matrix):
        if np.any(np.tril(matrix, -1) != 0.0):
            raise InputError(f"{self.kind} must be upper triangular")
        diagonal = np.diag(matrix)
        if np.any(diagonal <= 0.0):
            raise InputError(f"{self.kind} must have a positive diagonal")
        det = float(np.prod(diagonal))
        if abs(det - 1.0) > DET_TOL:
            raise InputError(f"{self.kind} has det {det:.10g} != 1")

    @classmethod
    def normalized(cls, value):
        matrix = as_square_matrix(value, cls.kind)
        # Factorizations leave rounding noise below the diagonal
        scale = max(1.0, float(np.abs(matrix).max()))
        if np.abs(np.tril(matrix, -1)).max(initial=0.0) > 1e-10 * scale:
            raise InputError(f"{cls.kind} must be upper triangular")
        return super().normalized(np.triu(matrix))


class OrthogonalElement(GroupElement):
    """Element of SO(n)."""

    kind = "orthogonal element"

    def _validate(self, matrix):
        n = matrix.shape[0]
        residual = np.linalg.norm(matrix.T @ matrix - np.eye(n))
        if residual > ORTHOGONALITY_TOL:
            raise InputError(
                f"{self.kind} has orthogonality residual {residual:.3e}",
            )
        super()._validate(matrix)

    @property
    def inverse(self):
        return OrthogonalElement(self.matrix.T)


def random_group_element(n, rng, scale=0.5):
    """Sample g = exp(X) for a random traceless X with entries in [-scale, scale]."""
    generator = traceless(rng.uniform(-1.0, 1.0, size=(n, n)) * scale)
    return GroupElement.normalized(scipy.linalg.expm(generator))


def random_an_element(n, rng, scale=1.0):
    """Sample a point of AN.

    Exponentiates a random upper triangular matrix with entries uniform in
    ``[-scale, scale]``, traceless on the diagonal, then normalizes the
    determinant.
    """
    generator = np.triu(rng.uniform(-1.0, 1.0, size=(n, n)) * scale)
    generator -= np.diag(np.full(n, np.trace(generator) / n))
    return ANElement.normalized(np.triu(scipy.linalg.expm(generator)))


def random_rotation(n, rng):
    """Sample a Haar-random element of SO(n)."""
    matrix = scipy.stats.special_ortho_group.rvs(n, random_state=rng)
    return OrthogonalElement(np.atleast_2d(matrix))


def random_positive_diagonal(n, rng, scale=0.5):
    """Sample a positive diagonal matrix of determinant 1."""
    logs = rng.uniform(-scale, scale, size=n)
    logs -= logs.mean()
    return np.diag(np.exp(logs))
