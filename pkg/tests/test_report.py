import json

import numpy as np
import pandas as pd
import pytest

from isoq import __version__
from isoq.report import read_table, table_header, write_table


@pytest.fixture
def table():
    return pd.DataFrame(
        {"trial": [0, 1], "value": [1 / 3, np.pi], "passed": [True, False]}
    )


def test_csv_has_provenance_header(tmp_path, table):
    path = write_table(table, tmp_path / "sub" / "out.csv", "hiding-pgm", 42)
    with open(path) as handle:
        first, columns = handle.readline().strip(), handle.readline().strip()
    assert first == table_header("hiding-pgm", 42)
    assert first == f"# experiment=hiding-pgm version={__version__} seed=42"
    assert columns == "trial,value,passed"
    back = read_table(path)
    assert back["value"].iloc[0] == pytest.approx(1 / 3, rel=1e-11)
    assert list(back["trial"]) == [0, 1]


def test_json_table(tmp_path, table):
    path = write_table(table, tmp_path / "out.json", "codes-params", 7, fmt="json")
    with open(path) as handle:
        payload = json.load(handle)
    assert payload["experiment"] == "codes-params"
    assert payload["seed"] == 7
    assert payload["rows"][1]["passed"] is False
    assert read_table(path).shape == (2, 3)


def test_unknown_format(tmp_path, table):
    with pytest.raises(ValueError):
        write_table(table, tmp_path / "out.txt", "x", 0, fmt="parquet")
