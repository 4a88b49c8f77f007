import os

import pytest

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES, name)


def read_fixture(name: str) -> str:
    with open(fixture_path(name), encoding="utf-8") as f:
        return f.read()


@pytest.fixture
def mortgage_spec():
    from multiverse import parse_spec

    return parse_spec(read_fixture("mortgage.py"), "mortgage.py")


@pytest.fixture
def steegen_spec():
    from multiverse import parse_spec

    return parse_spec(read_fixture("steegen.py"), "steegen.py")


@pytest.fixture
def hurricane_spec():
    from multiverse import parse_spec

    return parse_spec(read_fixture("hurricane.py"), "hurricane.py")
