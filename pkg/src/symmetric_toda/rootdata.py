# Copyright (c) 2024 symmetric-toda contributors.
# SPDX-License-Identifier: GPL-3.0-or-later
"""Structure data of sl(n, R): roots, generators, pairing and r-matrices.

Conventions used throughout the package:

- Roots are 1-based index pairs ``(i, j)`` with ``i < j`` standing for
  e_i - e_j, ordered lexicographically.
- The invariant pairing is the trace form ``tr(XY)``.
- ``a ∧ b = a ⊗ b - b ⊗ a`` (no factor 1/2).
- Tensors in gl_n ⊗ gl_n are dense arrays ``T[i, j, k, l]`` holding the
  coefficient of ``E_ij ⊗ E_kl`` (0-based array indices).
"""
import dataclasses
import functools
import logging
import typing

import numpy as np

from .checks.core import CheckRecord
from .checks.core import Report
from .errors import InputError
from .utils import as_square_matrix
from .utils import matrix_unit

logger = logging.getLogger(__name__)

ALGEBRA_TOL = 1e-12


@dataclasses.dataclass(frozen=True)
class RootSystemA:
    """The root system of type A_{n-1}.

    >>> RootSystemA(3).positive_roots
    ((1, 2), (1, 3), (2, 3))
    """

    n: int

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 2:
            raise InputError(f"root system needs an integer n >= 2, got {self.n!r}")

    @functools.cached_property
    def positive_roots(self):
        return tuple(
            (i, j) for i in range(1, self.n + 1) for j in range(i + 1, self.n + 1)
        )

    @property
    def rank(self):
        return self.n - 1

    def validate_root(self, root):
        """Return *root* as a tuple or raise :class:`InputError`."""
        try:
            i, j = root
        except (TypeError, ValueError) as e:
            raise InputError(f"root must be an index pair, got {root!r}") from e
        if (i, j) not in self.positive_roots:
            raise InputError(f"({i}, {j}) is not a positive root for n={self.n}")
        return (i, j)

    def cartan_basis(self):
        """Trace-orthonormal basis of the traceless diagonal matrices.

        h_k = (E_11 + ... + E_kk - k E_{k+1,k+1}) / sqrt(k (k + 1))
        """
        basis = []
        for k in range(1, self.n):
            diagonal = np.zeros(self.n)
            diagonal[:k] = 1.0
            diagonal[k] = -float(k)
            basis.append(np.diag(diagonal / np.sqrt(k * (k + 1))))
        return basis


@dataclasses.dataclass(frozen=True, eq=False)
class AlgebraElement:
    """A traceless real matrix, optionally labelled with its root space."""

    matrix: np.ndarray
    label: typing.Optional[str] = None

    def __post_init__(self):
        matrix = as_square_matrix(self.matrix, "algebra element")
        n = matrix.shape[0]
        if abs(np.trace(matrix)) > ALGEBRA_TOL * n * max(1.0, np.abs(matrix).max()):
            raise InputError(f"algebra element has trace {np.trace(matrix):.3e}")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def n(self):
        return self.matrix.shape[0]

    def bracket(self, other):
        a = self.matrix
        b = _matrix(other)
        return AlgebraElement(a @ b - b @ a)

    def __add__(self, other):
        return AlgebraElement(self.matrix + _matrix(other))

    def __sub__(self, other):
        return AlgebraElement(self.matrix - _matrix(other))

    def __neg__(self):
        return AlgebraElement(-self.matrix, self.label)

    def __mul__(self, scalar):
        return AlgebraElement(float(scalar) * self.matrix)

    __rmul__ = __mul__


def _matrix(value):
    if isinstance(value, AlgebraElement):
        return value.matrix
    return np.asarray(value, dtype=float)


@dataclasses.dataclass(frozen=True, eq=False)
class RTensor:
    """An element of gl_n ⊗ gl_n stored densely as ``T[i, j, k, l]``."""

    tensor: np.ndarray

    def __post_init__(self):
        tensor = np.array(self.tensor, dtype=float)
        if tensor.ndim != 4 or len(set(tensor.shape)) != 1:
            raise InputError(f"r-tensor must have shape (n, n, n, n), got {tensor.shape}")
        tensor.setflags(write=False)
        object.__setattr__(self, "tensor", tensor)

    @classmethod
    def from_matrix(cls, matrix):
        """Inverse of :meth:`as_matrix`."""
        matrix = np.asarray(matrix, dtype=float)
        n = int(round(np.sqrt(matrix.shape[0])))
        return cls(matrix.reshape(n, n, n, n))

    @property
    def n(self):
        return self.tensor.shape[0]

    def as_matrix(self):
        """The n² x n² matrix with rows indexed by row-major vec(E_ij)."""
        n = self.n
        return self.tensor.reshape(n * n, n * n)

    def flip(self):
        """Swap the tensor factors."""
        return RTensor(self.tensor.transpose(2, 3, 0, 1))

    def skew_part(self):
        """``r - flip(r)``, the skew part in the a ∧ b = a ⊗ b - b ⊗ a convention."""
        return self - self.flip()

    def norm(self):
        return float(np.linalg.norm(self.tensor))

    def trace_contractions(self):
        """Norms of the contractions with the identity in each slot."""
        first = np.einsum("iikl->kl", self.tensor)
        second = np.einsum("ijkk->ij", self.tensor)
        return float(np.linalg.norm(first)), float(np.linalg.norm(second))

    def in_sl_tensor_sl(self, tol=ALGEBRA_TOL):
        return max(self.trace_contractions()) <= tol * max(1.0, self.norm())

    def __add__(self, other):
        return RTensor(self.tensor + other.tensor)

    def __sub__(self, other):
        return RTensor(self.tensor - other.tensor)

    def __neg__(self):
        return RTensor(-self.tensor)

    def __mul__(self, scalar):
        return RTensor(float(scalar) * self.tensor)

    __rmul__ = __mul__


def chevalley_generator(n, root, sign="+"):
    """Root vector E_α (sign ``+``) or E_{-α} (sign ``-``) for α = (i, j).

    >>> chevalley_generator(2, (1, 2)).matrix.tolist()
    [[0.0, 1.0], [0.0, 0.0]]
    >>> chevalley_generator(2, (1, 2), "-").matrix.tolist()
    [[0.0, 0.0], [1.0, 0.0]]
    """
    i, j = RootSystemA(n).validate_root(root)
    if sign == "+":
        return AlgebraElement(matrix_unit(n, i, j), label=f"E+({i},{j})")
    if sign == "-":
        return AlgebraElement(matrix_unit(n, j, i), label=f"E-({i},{j})")
    raise InputError(f"sign must be '+' or '-', got {sign!r}")


def y_generator(n, root):
    """Y_α = E_{-α} - E_α, an element of so(n).

    >>> y_generator(2, (1, 2)).matrix.tolist()
    [[0.0, -1.0], [1.0, 0.0]]
    """
    i, j = RootSystemA(n).validate_root(root)
    matrix = matrix_unit(n, j, i) - matrix_unit(n, i, j)
    return AlgebraElement(matrix, label=f"Y({i},{j})")


def killing_pairing(x, y):
    """The invariant pairing tr(XY).

    >>> h = np.diag([1.0, -1.0])
    >>> killing_pairing(h, h)
    2.0
    """
    a = _matrix(x)
    b = _matrix(y)
    if a.shape != b.shape or a.ndim != 2:
        raise InputError(f"cannot pair matrices of shapes {a.shape} and {b.shape}")
    return float(np.trace(a @ b))


def tensor_product(a, b):
    """The simple tensor a ⊗ b."""
    return RTensor(np.einsum("ij,kl->ijkl", _matrix(a), _matrix(b)))


def wedge(a, b):
    """a ∧ b = a ⊗ b - b ⊗ a."""
    a = _matrix(a)
    b = _matrix(b)
    return RTensor(np.einsum("ij,kl->ijkl", a, b) - np.einsum("ij,kl->ijkl", b, a))


def standard_r_matrix(n):
    """r = Σ_{α > 0} E_α ∧ E_{-α}.

    >>> r = standard_r_matrix(2)
    >>> float(r.tensor[0, 1, 1, 0]), float(r.tensor[1, 0, 0, 1])
    (1.0, -1.0)
    """
    tensor = np.zeros((n, n, n, n))
    for i, j in RootSystemA(n).positive_roots:
        tensor[i - 1, j - 1, j - 1, i - 1] = 1.0
        tensor[j - 1, i - 1, i - 1, j - 1] = -1.0
    return RTensor(tensor)


def iwasawa_form_r_matrix(n):
    """Σ_{α > 0} E_α ∧ Y_α, which equals :func:`standard_r_matrix`."""
    total = RTensor(np.zeros((n, n, n, n)))
    for root in RootSystemA(n).positive_roots:
        total = total + wedge(chevalley_generator(n, root), y_generator(n, root))
    return total


def quasitriangular_r_matrix(n):
    """r = 1/2 Σ h_i ⊗ h_i + Σ_{α > 0} E_α ⊗ E_{-α}.

    The h_i form a trace-orthonormal basis of the diagonal Cartan subalgebra.
    """
    roots = RootSystemA(n)
    tensor = np.zeros((n, n, n, n))
    for h in roots.cartan_basis():
        tensor += 0.5 * np.einsum("ij,kl->ijkl", h, h)
    for i, j in roots.positive_roots:
        tensor[i - 1, j - 1, j - 1, i - 1] += 1.0
    return RTensor(tensor)


def involution_on_algebra(x):
    """The Cartan involution σ(X) = -Xᵀ.

    >>> involution_on_algebra(np.diag([1.0, -1.0])).matrix.tolist()
    [[-1.0, 0.0], [0.0, 1.0]]
    """
    return AlgebraElement(0.0 - _matrix(x).T)


def linear_map_matrix(func, n):
    """Matrix L with vec(func(X)) = L vec(X), vec taken row-major."""
    columns = []
    for a in range(n):
        for b in range(n):
            unit = np.zeros((n, n))
            unit[a, b] = 1.0
            columns.append(np.asarray(func(unit), dtype=float).reshape(n * n))
    return np.stack(columns, axis=1)


def apply_slot_maps(r, first=None, second=None):
    """Apply linear maps factorwise, (first ⊗ second)(r).

    ``None`` stands for the identity in that slot.
    """
    n = r.n
    identity = np.eye(n * n)
    left = identity if first is None else linear_map_matrix(first, n)
    right = identity if second is None else linear_map_matrix(second, n)
    return RTensor.from_matrix(left @ r.as_matrix() @ right.T)


def _sigma(x):
    return -x.T


def cybe_tensor(r):
    """[r12, r13] + [r12, r23] + [r13, r23] as a dense 6-index array.

    Index ``[a, b, c, d, e, f]`` is the coefficient of E_ab ⊗ E_cd ⊗ E_ef.
    """
    n = r.n
    t = r.tensor
    eye = np.eye(n)
    r12 = np.einsum("abcd,ef->abcdef", t, eye)
    r13 = np.einsum("abef,cd->abcdef", t, eye)
    r23 = np.einsum("cdef,ab->abcdef", t, eye)

    def product(x, y):
        return np.einsum("axcyez,xbydzf->abcdef", x, y, optimize=True)

    def commutator(x, y):
        return product(x, y) - product(y, x)

    return commutator(r12, r13) + commutator(r12, r23) + commutator(r13, r23)


def cybe_residual(r):
    """Norm of the classical Yang-Baxter tensor of *r*."""
    return float(np.linalg.norm(cybe_tensor(r)))


def borel_membership_residual(r):
    """Norm of the components of *r* outside b₊ ⊗ b₋."""
    n = r.n
    upper = np.triu(np.ones((n, n)))
    lower = np.tril(np.ones((n, n)))
    mask = 1.0 - np.einsum("ij,kl->ijkl", upper, lower)
    return float(np.linalg.norm(r.tensor * mask))


def r_identity_residuals(n):
    """Residual norms of the algebraic identities satisfied by the standard r.

    The right hand side of the reflection equation is measured as the sum
    (σ⊗1)r + (1⊗σ)r, which vanishes for σ(X) = -Xᵀ.

    :return: mapping of identity name to residual norm; the
        ``reflection-rhs-difference`` entry is informational (see
        :func:`symmetric_toda.checks.rules.RIdentities`)
    """
    r = standard_r_matrix(n)
    sigma_sigma = apply_slot_maps(r, _sigma, _sigma)
    sigma_first = apply_slot_maps(r, _sigma, None)
    sigma_second = apply_slot_maps(r, None, _sigma)
    quasi = quasitriangular_r_matrix(n)
    return {
        "sigma-sigma-antiinvariance": (sigma_sigma + r).norm(),
        "reflection-lhs": (sigma_sigma + r).norm(),
        "reflection-rhs-sum": (sigma_first + sigma_second).norm(),
        "reflection-rhs-difference": (sigma_first - sigma_second).norm(),
        "r-equals-sum-e-wedge-y": (iwasawa_form_r_matrix(n) - r).norm(),
        "r-skew": (r + r.flip()).norm(),
        "r-in-sl-tensor-sl": max(r.trace_contractions()),
        "quasitriangular-skew-part": (quasi.skew_part() - r).norm(),
        "quasitriangular-cybe": cybe_residual(quasi),
        "quasitriangular-in-b-plus-b-minus": borel_membership_residual(quasi),
    }


def verify_r_identities(n, tolerance=ALGEBRA_TOL, seed=0):
    """Check the r-matrix identities and return a report.

    :return: :class:`~symmetric_toda.checks.core.Report`
    """
    residuals = r_identity_residuals(n)
    literal = residuals.pop("reflection-rhs-difference")
    records = [
        CheckRecord(name, value, tolerance, {"n": n})
        for name, value in residuals.items()
    ]
    report = Report("r-identities", records, seed=seed)
    report.add_note(
        "reflection-rhs-difference",
        "(σ⊗1)r - (1⊗σ)r equals 2(σ⊗1)r for σ(X) = -Xᵀ; the sum vanishes",
        residual=literal,
    )
    return report
