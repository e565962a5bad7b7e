import csv
import json
import math

import numpy as np
import pytest

from qslkit import Table, format_value, table_payload, write_csv, write_json


def test_table_rejects_ragged_rows():
    with pytest.raises(ValueError):
        Table("t", ("a", "b"), [(1.0, 2.0), (3.0,)])


def test_column_coerces_missing_and_flags():
    t = Table(
        "t",
        ("x", "ok", "label"),
        [(1.5, True, "A"), (None, False, "B")],
    )
    x = t.column("x")
    assert x[0] == 1.5 and math.isnan(x[1])
    np.testing.assert_array_equal(t.column("ok"), [1.0, 0.0])
    assert np.isnan(t.column("label")).all()


def test_format_value_round_trips_doubles():
    rng = np.random.default_rng(3)
    for v in rng.uniform(-1e6, 1e6, 200):
        assert float(format_value(float(v))) == float(v)
    assert float(format_value(math.pi)) == math.pi
    assert format_value(None) == "nan"
    assert format_value(True) == "true"
    assert format_value(np.bool_(False)) == "false"
    assert format_value(7) == "7"
    assert format_value(np.int64(-3)) == "-3"


def test_write_csv_reads_back(tmp_path):
    t = Table(
        "vals",
        ("t", "theta", "hit"),
        [(0.0, 0.25, True), (1.0, math.pi, False), (2.0, None, True)],
    )
    p = write_csv(tmp_path / "vals.csv", t)
    with open(p, encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "theta", "hit"]
    assert rows[1] == ["0", "0.25", "true"]
    assert float(rows[2][1]) == math.pi
    assert rows[3][1] == "nan"
    assert len(rows) == 4
    # decimal separator is a dot regardless of locale conventions
    assert "," not in rows[2][1]


def test_write_json_is_strict(tmp_path):
    payload = {
        "tau": math.inf,
        "gap": float("nan"),
        "neg": -math.inf,
        "arr": np.array([1.0, 2.0]),
        "n": np.int32(4),
        "flag": np.bool_(True),
    }
    p = write_json(tmp_path / "out.json", payload)
    back = json.loads(p.read_text(encoding="utf-8"))
    assert back["tau"] == "inf"
    assert back["gap"] == "nan"
    assert back["neg"] == "-inf"
    assert back["arr"] == [1.0, 2.0]
    assert back["n"] == 4
    assert back["flag"] is True


def test_table_payload_shape(tmp_path):
    t = Table("grid", ("a", "b"), [(1, math.nan)])
    payload = table_payload(t)
    assert payload["name"] == "grid"
    assert payload["header"] == ["a", "b"]
    assert payload["rows"] == [[1, "nan"]]
    # payload survives strict serialization
    write_json(tmp_path / "t.json", payload)
