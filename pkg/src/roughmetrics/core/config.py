"""Configuration management for roughmetrics."""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path
from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class NumericsConfig(BaseSettings):
    """Tolerances shared by every inequality check."""

    tolerance: float = Field(default=1e-9, ge=0.0, description="Default inequality tolerance")
    feasibility_tolerance: float = Field(
        default=1e-12, ge=0.0, description="Slack allowed on kernel-vs-alpha comparisons"
    )
    psd_tolerance: float = Field(
        default=1e-9, ge=0.0, description="Relative eigenvalue tolerance for Gram PSD tests"
    )
    lp_bracket_max: float = Field(
        default=64.0, gt=1.0, description="Upper end of the L^p exponent bisection bracket"
    )

    model_config = SettingsConfigDict(env_prefix="ROUGHMETRICS_NUMERICS_")


class SearchConfig(BaseSettings):
    """Subset and clique search limits."""

    budget: int = Field(default=2_000_000, gt=0, description="Maximum search nodes per run")
    max_dense_points: int = Field(
        default=160, gt=2, description="Largest space accepted by the dense triple table"
    )
    exhaustive_limit: int = Field(
        default=24, gt=0, description="Point count up to which clique searches ignore the budget"
    )

    model_config = SettingsConfigDict(env_prefix="ROUGHMETRICS_SEARCH_")


class WitnessConfig(BaseSettings):
    """Witness engine parameters."""

    ramsey_c: float = Field(default=1.0, gt=0.0, description="Constant of the Ramsey upper bound")
    lemma_tolerance: float = Field(
        default=1e-9, ge=0.0, description="Tolerance of the per-step weighted-sum inequality"
    )

    model_config = SettingsConfigDict(env_prefix="ROUGHMETRICS_WITNESS_")


class Settings(BaseSettings):
    """Main configuration."""

    numerics: NumericsConfig = Field(default_factory=NumericsConfig)
    search: SearchConfig = Field(default_factory=SearchConfig)
    witness: WitnessConfig = Field(default_factory=WitnessConfig)

    threads: int = Field(
        default=1,
        ge=1,
        description="Worker threads for parallel search (ROUGHMETRICS_THREADS)",
    )
    verbose: bool = Field(default=False, description="Enable verbose logging")
    log_dir: Path = Field(default=Path(".roughmetrics/logs"), description="Log directory")

    model_config = SettingsConfigDict(
        env_prefix="ROUGHMETRICS_",
        env_nested_delimiter="__",
        extra="ignore",
    )

    @classmethod
    def load_from_file(cls, config_path: Path) -> Settings:
        """Load configuration from YAML file."""
        import yaml

        if not config_path.exists():
            raise FileNotFoundError(f"Config file not found: {config_path}")

        with open(config_path) as f:
            config_data = yaml.safe_load(f) or {}

        return cls(**config_data)

    def save_to_file(self, config_path: Path) -> None:
        """Save configuration to YAML file."""
        import yaml

        config_path.parent.mkdir(parents=True, exist_ok=True)

        config_dict = self.model_dump(mode="json", exclude_none=True)

        with open(config_path, "w") as f:
            yaml.dump(config_dict, f, default_flow_style=False, sort_keys=False)


_config_path: Optional[Path] = None


def use_config_file(path: Optional[Path]) -> None:
    """
    Read process settings from a YAML file, or from the environment again when None.

    Values in the file take precedence over ROUGHMETRICS_* variables.

    Raises:
        FileNotFoundError: If the file does not exist
    """
    global _config_path
    if path is not None and not path.exists():
        raise FileNotFoundError(f"Config file not found: {path}")
    _config_path = path
    get_settings.cache_clear()


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Return the process-wide settings instance."""
    if _config_path is not None:
        return Settings.load_from_file(_config_path)
    return Settings()
