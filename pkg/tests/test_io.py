import numpy as np
import pytest

from prefsort.core import DecisionMatrix
from prefsort.errors import InvalidInputError
from prefsort.io import format_dataset_csv, parse_dataset_csv


def test_round_trip():
    matrix = DecisionMatrix(
        ("a1", "a2"), np.array([[1.5, 2.0], [3.25, -1.0]]), ("g1", "g2")
    )
    labels = {"a1": 1, "a2": 2}
    text = format_dataset_csv(matrix, labels)
    back, labels2 = parse_dataset_csv(text)
    assert back.alternative_ids == matrix.alternative_ids
    assert np.array_equal(back.performances, matrix.performances)
    assert labels2 == labels
    assert format_dataset_csv(back, labels2) == text


def test_unlabelled():
    matrix, labels = parse_dataset_csv("id,g1\nrow1,4.5\nrow2,1.0\n")
    assert labels is None
    assert matrix.n == 2


def test_header_only_rejected():
    with pytest.raises(InvalidInputError):
        parse_dataset_csv("id,g1,label\n")


def test_duplicate_ids_rejected():
    with pytest.raises(InvalidInputError, match="duplicate"):
        parse_dataset_csv("id,g1\na,1\na,2\n")


def test_bad_cell_diagnoses_row_and_column():
    with pytest.raises(InvalidInputError, match="row 3, column 2"):
        parse_dataset_csv("id,g1\na,1\nb,oops\n")


def test_bad_label():
    with pytest.raises(InvalidInputError, match="label"):
        parse_dataset_csv("id,g1,label\na,1,high\n")
    with pytest.raises(InvalidInputError, match="label"):
        parse_dataset_csv("id,g1,label\na,1,0\n")


def test_ragged_row_rejected():
    with pytest.raises(InvalidInputError, match="expected 3 cells"):
        parse_dataset_csv("id,g1,label\na,1\n")
