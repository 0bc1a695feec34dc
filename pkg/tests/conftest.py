import pathlib

import pytest

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


@pytest.fixture
def fixture_path():
    def get(name):
        return FIXTURES / name
    return get
