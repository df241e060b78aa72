import os
from functools import lru_cache

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field

# Load environment variables
load_dotenv()


class Settings(BaseModel):
    """Runtime bounds and defaults, read from the environment."""

    model_config = ConfigDict(frozen=True)

    budget: int = Field(10**8, ge=1, description="Search node budget")
    max_group_order: int = Field(12, ge=1, description="Largest |G| accepted by enumerations")
    table_max_order: int = Field(12, ge=1, description="Largest |G| for which a Cayley table is materialized")
    carrier_max_order: int = Field(21, ge=1, description="Largest |G| for which a carrier is addressable at all")
    naive_max_carrier: int = Field(8, ge=1, description="Largest carrier size for the naive permutation oracle")
    parallelism: int = Field(1, ge=1, description="Worker processes for group sweeps")
    log_level: str = Field("WARNING", description="loguru level for the CLI")


def _int_env(name: str, default: int) -> int:
    value = os.getenv(name)
    if value is None or value.strip() == "":
        return default
    return int(value)


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Build the settings once per process."""
    return Settings(
        budget=_int_env("POWMON_BUDGET", 10**8),
        max_group_order=_int_env("POWMON_MAX_GROUP_ORDER", 12),
        table_max_order=_int_env("POWMON_TABLE_MAX_ORDER", 12),
        naive_max_carrier=_int_env("POWMON_NAIVE_MAX_CARRIER", 8),
        parallelism=_int_env("POWMON_PARALLELISM", 1),
        log_level=os.getenv("LOG_LEVEL", "WARNING"),
    )
