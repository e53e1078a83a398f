import pytest
from pareto_cat.services.instance_loader import load_fixture


@pytest.fixture(scope="session")
def chain3():
    return load_fixture("chain3")


@pytest.fixture(scope="session")
def cycle2():
    return load_fixture("cycle2")


@pytest.fixture(scope="session")
def staircase():
    return load_fixture("staircase")
