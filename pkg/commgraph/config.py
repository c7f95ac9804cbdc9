"""
Runtime limits and locations shared by every module
"""

import os
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field

CACHE_ENV_VAR = "COMMGRAPH_CACHE"
DEFAULT_CACHE_DIR = "./.commgraph-cache"


class Settings(BaseModel):
    """Caps, cache location and default random seed"""

    model_config = ConfigDict(frozen=True)

    # Element codes are uint64 base-degree numbers, exact up to degree 16
    degree_cap: int = Field(16, ge=1, le=16)
    order_cap: int = Field(5040, ge=1)
    subgroup_cap: int = Field(200_000, ge=1)
    # Largest complement on which p-subgroups are enumerated for classified vertices
    complement_cap: int = Field(7, ge=0)
    cache_dir: Path = Path(DEFAULT_CACHE_DIR)
    seed: int = 20150101

    @classmethod
    def from_env(cls, **overrides) -> "Settings":
        """Build settings, taking the cache directory from the environment

        Args:
            **overrides: Field values that take precedence over the environment

        Returns:
            Settings: Resolved settings
        """
        values = {"cache_dir": Path(os.environ.get(CACHE_ENV_VAR, DEFAULT_CACHE_DIR))}
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


DEFAULT_SETTINGS = Settings()
