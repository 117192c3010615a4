import sys
from pathlib import Path

import pytest

REPO = Path(__file__).resolve().parent.parent
DATA = REPO / "data"

sys.path.insert(0, str(REPO / "tools"))


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


def dataset(n: int) -> Path:
    path = DATA / f"cubic{n}.g6"
    if not path.exists():
        pytest.skip(f"dataset {path} not generated (run tools/generate_datasets.py)")
    return path
