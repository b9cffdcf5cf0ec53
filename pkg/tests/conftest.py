"""Shared fixtures."""

import numpy as np
import pytest

from ramplab.config import get_settings
from ramplab.dataset import design_from_arrays


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """Every test sees settings built from its own environment."""
    monkeypatch.setenv("RAMPLAB_JOBS", "1")
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def results_file(tmp_path, monkeypatch):
    """Point the simulation store at a temporary file."""
    path = tmp_path / "results.json"
    monkeypatch.setenv("RAMPLAB_RESULTS_FILE", str(path))
    get_settings.cache_clear()
    return path


@pytest.fixture
def make_design():
    """
    Factory for the symmetric design: x1 = (v + e)/sqrt(2), x2 = 1[v/2 + r > 0],
    y = 1[b0 + b1 x1 + b2 x2 + u > 0] with u ~ U(-a, a).
    """

    def make(n=1000, seed=1, beta=(0.1, 0.2, -0.3), a=0.5):
        rng = np.random.default_rng(seed)
        v, e, r = rng.standard_normal((3, n))
        x1 = (v + e) / np.sqrt(2.0)
        x2 = (v / 2.0 + r > 0).astype(float)
        u = a * (2.0 * rng.random(n) - 1.0)
        y = (beta[0] + beta[1] * x1 + beta[2] * x2 + u > 0).astype(float)
        return design_from_arrays(y, {"x1": x1, "x2": x2})

    return make


@pytest.fixture
def sym_design(make_design):
    return make_design()


@pytest.fixture
def interior_design():
    """Every OLS fitted value lies well inside (0, 1)."""
    rng = np.random.default_rng(3)
    n = 400
    x = rng.uniform(-1.0, 1.0, n)
    y = (rng.random(n) < 0.5 + 0.1 * x).astype(float)
    return design_from_arrays(y, {"x": x})


@pytest.fixture
def small_design():
    """N=25, K=3 instance for brute-force oracles."""
    rng = np.random.default_rng(11)
    n = 25
    x1 = rng.normal(0.5, 0.4, n)
    x2 = rng.normal(0.0, 1.0, n)
    y = (rng.random(n) < np.clip(x1 + 0.1 * x2, 0.05, 0.95)).astype(float)
    return design_from_arrays(y, {"x1": x1, "x2": x2})
