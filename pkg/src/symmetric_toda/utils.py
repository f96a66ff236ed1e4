# Copyright (c) 2024 symmetric-toda contributors.
# SPDX-License-Identifier: GPL-3.0-or-later
import json
import logging
import zlib

import numpy as np
import scipy.linalg

from .errors import InputError
from .errors import NumericalError

logger = logging.getLogger(__name__)


def as_square_matrix(value, what="matrix"):
    """Coerce *value* to a finite, square float array.

    >>> as_square_matrix([[1, 2], [3, 4]]).dtype
    dtype('float64')

    :param value: array-like
    :param what: description used in error messages
    :return: a fresh :class:`numpy.ndarray`
    :raises InputError: when the value is not a finite square matrix
    """
    try:
        matrix = np.array(value, dtype=float)
    except (TypeError, ValueError) as e:
        raise InputError(f"{what} is not numeric: {e}") from e
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise InputError(f"{what} must be square, got shape {matrix.shape}")
    if matrix.shape[0] < 1:
        raise InputError(f"{what} is empty")
    if not np.all(np.isfinite(matrix)):
        raise InputError(f"{what} has non-finite entries")
    return matrix


def traceless(matrix):
    """Project onto the traceless matrices, S - (tr S / n) I.

    >>> traceless(np.eye(3)).tolist()
    [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]
    """
    matrix = np.asarray(matrix, dtype=float)
    n = matrix.shape[0]
    return matrix - (np.trace(matrix) / n) * np.eye(n)


def matrix_unit(n, i, j):
    """The n x n matrix unit E_ij with 1-based indices."""
    unit = np.zeros((n, n))
    unit[i - 1, j - 1] = 1.0
    return unit


def relative_residual(lhs, rhs, scale=0.0):
    """Distance between two values relative to their size.

    The denominator is ``max(1, |lhs|, |rhs|, scale)`` so that residuals of
    identities whose sides are both zero are measured against *scale*, the
    size of the terms that cancelled.

    >>> relative_residual(2.0, 2.0)
    0.0
    >>> relative_residual(0.0, 0.5, scale=4.0)
    0.125
    """
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    diff = float(np.linalg.norm(lhs - rhs))
    denom = max(
        1.0,
        float(np.linalg.norm(lhs)),
        float(np.linalg.norm(rhs)),
        float(scale),
    )
    return diff / denom


def numerical_rank(matrix, rtol=1e-8, floor=0.0, band=None):
    """Rank of *matrix* by singular value thresholding.

    Singular values at or below ``rtol * max(s_max, floor)`` count as zero.
    *floor* keeps matrices that are zero up to rounding from being measured
    against their own noise.

    :param band: when given, singular values inside
        ``(threshold / band, threshold * band)`` make the rank ambiguous
    :return: integer rank
    :raises NumericalError: on an ambiguous rank
    """
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    if matrix.size == 0:
        return 0
    values = scipy.linalg.svdvals(matrix)
    top = float(values.max()) if values.size else 0.0
    threshold = rtol * max(top, floor)
    if threshold == 0.0:
        return 0
    rank = int(np.count_nonzero(values > threshold))
    logger.debug(
        "rank %d of %s matrix, threshold %.3e, singular values %s",
        rank,
        matrix.shape,
        threshold,
        np.array2string(values, precision=3),
    )
    if band is not None:
        near = values[(values > threshold / band) & (values < threshold * band)]
        if near.size:
            raise NumericalError(
                f"rank is ambiguous: singular value {near[0]:.3e} lies within a "
                f"factor {band:g} of the threshold {threshold:.3e}",
            )
    return rank


def derive_rng(seed, *keys):
    """Build an independent, reproducible generator for a named purpose.

    >>> a = derive_rng(7, "bracket").uniform()
    >>> b = derive_rng(7, "bracket").uniform()
    >>> a == b
    True
    """
    entropy = [int(seed)] + [zlib.crc32(str(key).encode("utf8")) for key in keys]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def matrix_to_json(matrix):
    """Serialize a matrix as ``{"n": int, "rows": [[...]]}``."""
    matrix = np.asarray(matrix, dtype=float)
    return {"n": int(matrix.shape[0]), "rows": matrix.tolist()}


def matrix_from_json(data, what="matrix"):
    """Parse the ``{"n": int, "rows": [[...]]}`` matrix format.

    :raises InputError: when the document does not follow the format
    """
    if not isinstance(data, dict) or "rows" not in data:
        raise InputError(f"{what}: expected an object with 'n' and 'rows'")
    matrix = as_square_matrix(data["rows"], what)
    n = data.get("n", matrix.shape[0])
    if not isinstance(n, int) or n != matrix.shape[0]:
        raise InputError(f"{what}: 'n' does not match the number of rows")
    return matrix


def load_matrix(path, what="matrix"):
    """Read a JSON matrix file.

    :param path: :class:`pathlib.Path` to the file
    :raises InputError: on unreadable or malformed files
    """
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read {what} from {path}: {e}") from e
    return matrix_from_json(data, what)


def load_json(path, what="document"):
    """Read an arbitrary JSON document, mapping failures to :class:`InputError`."""
    try:
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read {what} from {path}: {e}") from e


def dump_json(data, path=None):
    """Write *data* as indented JSON to *path*, or return the text."""
    text = json.dumps(data, indent=2, sort_keys=False, default=_json_default)
    if path is None:
        return text
    with open(path, "w", encoding="utf-8") as f:
        f.write(text + "\n")
    return text


def _json_default(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"{type(value).__name__} is not JSON serializable")
