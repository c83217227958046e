"""Process-level settings via environment variables."""

from __future__ import annotations

from pydantic_settings import BaseSettings


class OdcalSettings(BaseSettings):
    """Loaded from ODCAL_* env vars or a .env file."""

    log_level: str = "INFO"
    log_format: str = "%(asctime)s %(name)s %(levelname)s %(message)s"

    # Used when neither --out nor the experiment document names a directory
    default_output_dir: str = "runs"

    # Replication thread-pool size applied when a SimConfig leaves workers at 1
    sim_workers: int = 1

    model_config = {"env_prefix": "ODCAL_", "env_file": ".env", "env_file_encoding": "utf-8", "extra": "ignore"}
