import numpy as np
import pytest

from residcopula.dataset import ObservationSet, load_csv, save_csv
from residcopula.errors import (
    EmptyInput,
    MissingColumn,
    NonFiniteValue,
    NonNumericCell,
    RowCountTooSmall,
    ShapeMismatch,
)


def write(path, text):
    path.write_text(text)
    return path


def test_observation_set_shapes_and_names(rng):
    data = ObservationSet(y=rng.normal(size=(5, 3)), x=rng.normal(size=5))
    assert (data.n, data.d, data.q) == (5, 3, 1)
    assert data.column_names() == ["y1", "y2", "y3", "x1"]


def test_observation_set_is_read_only(rng):
    y = rng.normal(size=(4, 2))
    data = ObservationSet(y=y, x=rng.normal(size=(4, 1)))
    y[0, 0] = 99.0
    assert data.y[0, 0] != 99.0
    with pytest.raises(ValueError):
        data.y[0, 0] = 1.0


@pytest.mark.parametrize(
    "y, x, err",
    [
        (np.zeros((3, 1)), np.zeros((3, 1)), ShapeMismatch),
        (np.zeros((3, 2)), np.zeros((4, 1)), ShapeMismatch),
        (np.zeros((1, 2)), np.zeros((1, 1)), RowCountTooSmall),
        (np.array([[0.0, np.nan], [1.0, 2.0]]), np.zeros((2, 1)), NonFiniteValue),
    ],
)
def test_observation_set_validation(y, x, err):
    with pytest.raises(err):
        ObservationSet(y=y, x=x)


def test_load_binds_columns_by_name(tmp_path):
    path = write(tmp_path / "d.csv", "x1,y2,junk,y1\n1,20,a,10\n2,21,b,11\n3,22,c,12\n")
    data = load_csv(path, d=2, q=1)
    np.testing.assert_array_equal(data.y, [[10, 20], [11, 21], [12, 22]])
    np.testing.assert_array_equal(data.x[:, 0], [1, 2, 3])


def test_missing_column(tmp_path):
    path = write(tmp_path / "d.csv", "y1,x1\n1,2\n3,4\n")
    with pytest.raises(MissingColumn, match="y2"):
        load_csv(path, d=2, q=1)


def test_non_numeric_cell_reports_location(tmp_path):
    path = write(tmp_path / "d.csv", "y1,y2,x1\n1,2,3\n4,oops,6\n")
    with pytest.raises(NonNumericCell) as info:
        load_csv(path, d=2, q=1)
    assert info.value.row == 2 and info.value.col == "y2"


def test_non_finite_and_short_files(tmp_path):
    with pytest.raises(NonFiniteValue):
        load_csv(write(tmp_path / "a.csv", "y1,y2,x1\n1,inf,3\n4,5,6\n"), 2, 1)
    with pytest.raises(RowCountTooSmall):
        load_csv(write(tmp_path / "b.csv", "y1,y2,x1\n1,2,3\n"), 2, 1)
    with pytest.raises(MissingColumn):
        load_csv(write(tmp_path / "c.csv", ""), 2, 1)
    with pytest.raises(EmptyInput):
        load_csv(tmp_path / "nope.csv", 2, 1)


def test_csv_round_trip_is_exact(tmp_path, rng):
    data = ObservationSet(y=rng.standard_t(3, size=(50, 3)) * 1e3, x=rng.normal(size=(50, 2)))
    save_csv(data, tmp_path / "r.csv")
    back = load_csv(tmp_path / "r.csv", 3, 2)
    np.testing.assert_array_equal(back.y, data.y)
    np.testing.assert_array_equal(back.x, data.x)
