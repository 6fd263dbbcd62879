import json
from pathlib import Path

import pytest

from specsharp.calibration import WeightCache, build_problem, solve_weights
from specsharp.perception import TransferModel

DATA_DIR = Path(__file__).parent / "data"
DEFAULT_GRID = [float(d) for d in range(10, 101, 10)]
DEFAULT_LEVELS = 6


@pytest.fixture(scope="session")
def default_model():
    return TransferModel()


@pytest.fixture(scope="session")
def default_grid_results(default_model):
    """Full-quality calibration over the default grid: (problem, solution) pairs.

    This is the expensive shared fixture (512^2 noise, 8 seeds, 10
    distances); everything acceptance-grade reuses it.
    """
    results = []
    for d in DEFAULT_GRID:
        problem = build_problem(default_model, d, levels=DEFAULT_LEVELS)
        results.append((problem, solve_weights(problem)))
    return results


@pytest.fixture(scope="session")
def default_cache(default_model, default_grid_results):
    return WeightCache(
        levels=DEFAULT_LEVELS,
        a=0.05,
        b=0.6,
        model_hash=default_model.content_hash(),
        entries=tuple(ws for _, ws in default_grid_results),
    )


@pytest.fixture(scope="session")
def default_cache_file(default_cache, tmp_path_factory):
    path = tmp_path_factory.mktemp("cache") / "weights.json"
    default_cache.save(path)
    return path


@pytest.fixture(scope="session")
def testcard_path():
    return DATA_DIR / "testcard.png"


@pytest.fixture(scope="session")
def golden():
    return json.loads((DATA_DIR / "golden.json").read_text())


@pytest.fixture(scope="session")
def golden_cache_path():
    return DATA_DIR / "golden_cache.json"
