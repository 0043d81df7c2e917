import pytest

from cm_lab import EvalConfig


@pytest.fixture(scope="session")
def cfg50() -> EvalConfig:
    return EvalConfig(precision_digits=50)


@pytest.fixture(scope="session")
def cfg30() -> EvalConfig:
    return EvalConfig(precision_digits=30)
