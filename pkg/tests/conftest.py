from pathlib import Path

import pytest

from sidewalk_guide.scenario import load_scenario

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "sidewalk_guide" / "data"


@pytest.fixture(scope="session")
def standard_scenario():
    return load_scenario(DATA_DIR / "scenarios" / "standard.yaml")


@pytest.fixture(scope="session")
def empty_scenario():
    return load_scenario(DATA_DIR / "scenarios" / "empty_10m.yaml")


@pytest.fixture(scope="session")
def scenarios_dir():
    return DATA_DIR / "scenarios"
