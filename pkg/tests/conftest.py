import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sqlscope.schema import Attribute, Kind, Role, Schema
from sqlscope.table import build_table


@pytest.fixture
def toy_binary_table():
    """10 rows, 4 positives; the 'hot' server extent {0,1,2,3,4} holds 4 of them.

    The numeric column is deliberately uninformative so the server selector is
    the unique depth-1 quality maximum.
    """
    x_values = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0, 5.0, 3.0]
    rows = []
    for i in range(10):
        server = "hot" if i < 5 else "cold"
        positive = i in (0, 1, 2, 3)  # 4 positives, all on the hot server's first rows
        rows.append([server, x_values[i], positive])
    schema = Schema(
        [
            Attribute("server", Kind.NOMINAL),
            Attribute("x", Kind.NUMERIC),
            Attribute("y", Kind.BOOLEAN, Role.TARGET),
        ]
    )
    return build_table(schema, rows)


@pytest.fixture
def numeric_target_table():
    """Five rows with target [1,2,3,10,14]; rows 3,4 are the deviant pair."""
    rows = [
        ["a", 1.0],
        ["a", 2.0],
        ["b", 3.0],
        ["b", 10.0],
        ["b", 14.0],
    ]
    schema = Schema(
        [Attribute("g", Kind.NOMINAL), Attribute("t", Kind.NUMERIC, Role.TARGET)]
    )
    return build_table(schema, rows)


def mask_of(table, rows):
    m = np.zeros(table.row_count, dtype=bool)
    for r in rows:
        m[r] = True
    return m


@pytest.fixture
def make_mask():
    return mask_of
