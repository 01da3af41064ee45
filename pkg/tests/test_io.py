import csv

import numpy as np
import pytest

from elasticlb import ValidationError
from elasticlb.io import NN_COLUMNS, load_ucr_tsv, write_results_csv


def test_load_tab_comma_space(tmp_path):
    for sep in ("\t", ",", "  "):
        p = tmp_path / "D_TRAIN.tsv"
        p.write_text(sep.join(["1", "0.5", "1.5"]) + "\n\n" + sep.join(["2", "-1", "3e-1"]) + "\n")
        d = load_ucr_tsv(str(p))
        assert d.name == "D_TRAIN" and len(d) == 2
        assert d.labels == [1, 2]
        np.testing.assert_array_equal(d.values[1], [-1.0, 0.3])


def test_string_labels_and_znorm(tmp_path):
    p = tmp_path / "x.tsv"
    p.write_text("a\t1\t2\t3\nb\t4\t4\t4\n")
    d = load_ucr_tsv(str(p), znorm=True)
    assert d.labels == ["a", "b"]
    assert abs(d.values[0].mean()) < 1e-12 and np.all(d.values[1] == 0)


@pytest.mark.parametrize("text,where", [("1\t2\n2\t1\t3\n", ":2:"), ("1\tfoo\n", ":1:"), ("1\tnan\n", ":1:"),
                                         ("", "no series"), ("1\n", ":1:")])
def test_load_errors(tmp_path, text, where):
    p = tmp_path / "bad.tsv"
    p.write_text(text)
    with pytest.raises(ValidationError, match=where):
        load_ucr_tsv(str(p))


def test_missing_file():
    with pytest.raises(OSError):
        load_ucr_tsv("/nonexistent/file.tsv")


def test_csv_round_trip(tmp_path):
    p = tmp_path / "out.csv"
    rows = [{"dataset": "A", "measure": "erp", "bound": "bglb", "pruning_ratio": 1 / 3, "dp_calls": 7}]
    write_results_csv(str(p), rows, NN_COLUMNS)
    raw = p.read_bytes()
    assert b"\r\n" not in raw
    with open(p, newline="") as fh:
        got = list(csv.DictReader(fh))
    assert list(got[0].keys()) == NN_COLUMNS
    assert got[0]["pruning_ratio"] == "0.333333333333" and got[0]["dp_calls"] == "7"
    assert got[0]["speedup"] == ""


def test_csv_header_only_and_unknown_column(tmp_path):
    p = tmp_path / "e.csv"
    write_results_csv(str(p), [], ["a", "b"])
    assert p.read_text() == "a,b\n"
    with pytest.raises(ValidationError):
        write_results_csv(str(p), [{"zzz": 1}], ["a"])
