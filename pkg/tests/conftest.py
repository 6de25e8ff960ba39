import os
from pathlib import Path

import numpy as np
import pytest

from helpers import CRITERIA

HERE = Path(__file__).parent


@pytest.fixture
def xor_data():
    X = np.array([[0, 0], [0, 1], [1, 0], [1, 1]] * 250, dtype=np.uint8)
    return X, (X[:, 0] ^ X[:, 1]).astype(np.uint8)


@pytest.fixture(scope="session")
def bankruptcy_path():
    """Real UCI Qualitative_Bankruptcy.data.txt, if available."""
    candidates = [os.environ.get("IWTM_BANKRUPTCY_CSV"),
                  HERE / "data" / "Qualitative_Bankruptcy.data.txt"]
    for c in candidates:
        if c and Path(c).is_file():
            return Path(c)
    return None


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(CRITERIA, key=lambda k: int(k.split()[0])):
        terminalreporter.write_line(CRITERIA[key])
