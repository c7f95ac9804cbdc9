from pathlib import Path

import pytest

from commgraph.cache import LatticeCache
from commgraph.config import Settings

EXAMPLES = Path(__file__).parent.joinpath("examples")


@pytest.fixture
def settings(tmp_path) -> Settings:
    return Settings(cache_dir=tmp_path.joinpath("cache"))


@pytest.fixture
def cache(settings) -> LatticeCache:
    return LatticeCache(settings=settings)
