import json
import pathlib

import pytest

DATA = pathlib.Path(__file__).with_name("data")


@pytest.fixture(scope="session")
def oracles():
    """Frozen high-precision reference values (see generate_oracles.py)."""
    return json.loads((DATA / "oracles.json").read_text())
