import pytest

from pseudoherm import _backend


@pytest.fixture(scope="session", autouse=True)
def _warm_backend():
    # jit compilation must not count against runtime-capped tests
    _backend.warmup()
