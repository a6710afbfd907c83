import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from nanoplasmon import specfun  # noqa: E402


@pytest.fixture(params=specfun.available_backends())
def backend(request):
    """Run a test once per available Bessel backend."""
    previous = specfun.use_backend(request.param)
    yield request.param
    specfun.use_backend(previous)
