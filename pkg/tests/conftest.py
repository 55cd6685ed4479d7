import numpy as np
import pytest

from contextuality import builders


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def pr():
    return builders.pr_box()


@pytest.fixture
def pm():
    return builders.pm_box()


@pytest.fixture
def mermin():
    return builders.mermin_box()


@pytest.fixture
def kcbs():
    return builders.kcbs_box()
