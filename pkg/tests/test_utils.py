# Copyright (c) 2024 symmetric-toda contributors.
# SPDX-License-Identifier: GPL-3.0-or-later
import json

import numpy as np
import pytest

from symmetric_toda.errors import InputError
from symmetric_toda.errors import NumericalError
from symmetric_toda.utils import as_square_matrix
from symmetric_toda.utils import derive_rng
from symmetric_toda.utils import dump_json
from symmetric_toda.utils import load_json
from symmetric_toda.utils import load_matrix
from symmetric_toda.utils import matrix_from_json
from symmetric_toda.utils import matrix_unit
from symmetric_toda.utils import numerical_rank
from symmetric_toda.utils import relative_residual


@pytest.mark.parametrize(
    "value",
    [
        [],
        [[1.0, 2.0]],
        [[1.0, "x"], [0.0, 1.0]],
        [[1.0, float("nan")], [0.0, 1.0]],
        [[1.0, 2.0], [3.0]],
    ],
)
def test_as_square_matrix_rejects(value):
    with pytest.raises(InputError):
        as_square_matrix(value)


def test_matrix_unit():
    unit = matrix_unit(3, 1, 3)
    assert unit[0, 2] == 1.0
    assert unit.sum() == 1.0


def test_relative_residual_scale():
    assert relative_residual([3.0, 4.0], [0.0, 0.0]) == pytest.approx(1.0)
    assert relative_residual(1e-3, 0.0) == pytest.approx(1e-3)
    assert relative_residual(1e-3, 0.0, scale=10.0) == pytest.approx(1e-4)


def test_numerical_rank():
    assert numerical_rank(np.diag([1.0, 1e-3, 0.0])) == 2
    assert numerical_rank(np.zeros((3, 3))) == 0
    assert numerical_rank(np.zeros((0, 0))) == 0
    assert numerical_rank(np.full((2, 2), 1e-20), floor=1.0) == 0


def test_numerical_rank_ambiguous():
    with pytest.raises(NumericalError, match="ambiguous"):
        numerical_rank(np.diag([1.0, 1e-8]), rtol=1e-8, band=10.0)


def test_derive_rng_streams_differ():
    first = derive_rng(1, "a", 3).uniform(size=4)
    assert np.array_equal(first, derive_rng(1, "a", 3).uniform(size=4))
    assert not np.array_equal(first, derive_rng(1, "a", 4).uniform(size=4))
    assert not np.array_equal(first, derive_rng(2, "a", 3).uniform(size=4))


def test_matrix_from_json():
    matrix = matrix_from_json({"n": 2, "rows": [[1, 0], [0, 1]]})
    assert np.array_equal(matrix, np.eye(2))
    with pytest.raises(InputError, match="'n' does not match"):
        matrix_from_json({"n": 3, "rows": [[1, 0], [0, 1]]})
    with pytest.raises(InputError, match="expected an object"):
        matrix_from_json([[1, 0], [0, 1]])


def test_load_matrix_errors(tmp_path):
    corrupt = tmp_path / "corrupt.json"
    corrupt.write_text("{not json")
    with pytest.raises(InputError, match="cannot read"):
        load_matrix(corrupt)
    with pytest.raises(InputError, match="cannot read"):
        load_matrix(tmp_path / "missing.json")
    with pytest.raises(InputError):
        load_json(corrupt)


def test_dump_json_numpy(tmp_path):
    path = tmp_path / "out.json"
    data = {"matrix": np.eye(2), "value": np.float64(0.5), "count": np.int64(3)}
    text = dump_json(data, path)
    assert json.loads(path.read_text()) == json.loads(text)
    assert json.loads(text) == {
        "matrix": [[1.0, 0.0], [0.0, 1.0]],
        "value": 0.5,
        "count": 3,
    }
    with pytest.raises(TypeError):
        dump_json({"bad": object()})
