import pytest

from merchmath import make_gaussian, make_tabulated
from merchmath.maxent import MaxEntModel


@pytest.fixture
def std_normal():
    return make_gaussian(0.0, 1.0)


@pytest.fixture(params=["gaussian", "tabulated", "maxent"])
def any_dist(request):
    return {
        "gaussian": make_gaussian(0.3, 1.7),
        "tabulated": make_tabulated([-1.0, 0.0, 0.5, 2.0], [0.2, 0.5, 0.3]),
        "maxent": MaxEntModel(1.3, 0.7),
    }[request.param]
