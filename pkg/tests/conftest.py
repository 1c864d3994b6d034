import math

import numpy as np
import pytest

from interpjc import ModelPreset, coherent_state

PRESETS = [ModelPreset("JCM"), ModelPreset("BSM"), ModelPreset("SM", 1.0), ModelPreset("RLM", 1.0)]


def poisson_pmf(k, mean):
    """Independent Poisson pmf by direct factorial arithmetic."""
    if mean == 0:
        return 1.0 if k == 0 else 0.0
    return math.exp(-mean) * mean**k / math.factorial(k)


def poisson_moment(order, mean, kmax=150):
    return math.fsum(k**order * poisson_pmf(k, mean) for k in range(kmax))


@pytest.fixture
def coherent3():
    return coherent_state(3.0, cutoff=40)


@pytest.fixture(params=PRESETS, ids=str)
def preset_params(request):
    return request.param.params()


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)
