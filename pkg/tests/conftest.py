import pytest

from sembgs import _kernels


@pytest.fixture(scope="session", autouse=True)
def compiled_kernels():
    # Pay the one-off JIT cost before anything is timed.
    _kernels.warmup()
