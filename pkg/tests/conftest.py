from pathlib import Path

import numpy as np
import pytest

from chdef.chgeom import HermitianForm
from chdef.figure8 import build_family


@pytest.fixture(scope="session")
def fam():
    return build_family()


@pytest.fixture()
def std4():
    return HermitianForm(np.diag([1.0, 1.0, 1.0, -1.0]))


@pytest.fixture(scope="session")
def data_dir():
    return Path(__file__).parent / "data"
