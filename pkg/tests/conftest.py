import pytest

from mvgamma import kernels


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    """Run the decorated test once per available kernel backend."""
    previous = kernels.use_backend(request.param)
    yield request.param
    kernels.use_backend(previous)
