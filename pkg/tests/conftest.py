import pytest

from helpers import GridCache


@pytest.fixture(scope="session")
def grid() -> GridCache:
    return GridCache()
