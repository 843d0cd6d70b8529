import pytest

from stringtop import fixture_path, kernel
from stringtop.fileformat import parse_algebra
from stringtop.pd import standard_models


@pytest.fixture(params=sorted(kernel.BACKENDS))
def backend(request):
    """Run a test once per available elimination backend."""
    previous = kernel.use_backend(request.param)
    yield request.param
    kernel.use_backend(previous)


@pytest.fixture(scope="session")
def models():
    return standard_models()


def load(name):
    return parse_algebra(fixture_path(name))


@pytest.fixture(scope="session")
def fixture_file():
    return load
