import numpy as np
import pytest
from scipy import stats


def pytest_addoption(parser):
    parser.addoption('--runslow', action='store_true', default=False, help='roda também os testes lentos')


def pytest_collection_modifyitems(config, items):
    if config.getoption('--runslow'):
        return
    skip_slow = pytest.mark.skip(reason='precisa de --runslow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def assert_matches_distribution(counts, probs):
    """Qui-quadrado com p > 0.001"""
    observed = np.asarray(counts, dtype=float)
    probs = np.asarray(probs, dtype=float)
    expected = probs / probs.sum() * observed.sum()
    result = stats.chisquare(observed, expected)
    assert result.pvalue > 1e-3, f"chi2 = {result.statistic:.2f}, p = {result.pvalue:.2e}"


# (valores Q, temperatura, flags)
REFLECTION_SCENARIOS = [
    ({0: 0.1, 1: -0.3, 2: 0.4, 3: 0.0, 4: -0.8, 5: 0.2, 6: 0.05}, 1.0, {0, 2, 5}),
    ({0: 0.9, 1: -0.5, 2: -0.2, 3: 0.3, 4: -0.9, 5: 0.6, 6: -0.1}, 0.5, {1, 2, 4, 6}),
    ({1: 0.2, 2: 0.1, 4: -0.4, 6: 0.3}, 2.0, {2, 4}),
]
