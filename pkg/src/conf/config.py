import json
import logging
import os
from typing import Any

from pydantic import Field, ValidationError, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from src.conf import messages
from src.conf.exceptions import ConfigFileNotFoundException, InvalidConfigException
from src.schemas.configs import RunConfig

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


class Settings(BaseSettings):
    log_level: str = "INFO"
    default_seed: int = Field(default=0, ge=0)
    workers: int = Field(default=1, ge=1)
    output_dir: str = "runs"

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: Any):
        level = str(v).upper()
        if level not in ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]:
            raise ValueError("log_level must be one of DEBUG, INFO, WARNING, ERROR, CRITICAL")
        return level

    model_config = SettingsConfigDict(
        env_prefix="LQM_", extra="ignore", env_file=".env", env_file_encoding="utf-8"
    )


def load_settings_from_file(settings_file: str) -> Settings:
    if not os.path.exists(settings_file):
        raise ConfigFileNotFoundException(
            messages.CONFIG_FILE_NOT_FOUND.format(path=settings_file)
        )
    return Settings(_env_file=settings_file)


def load_run_config(config_file: str) -> RunConfig:
    """
    Reads a JSON run config and validates it against the RunConfig schema.
    Unknown keys and out-of-range hyperparameters are rejected.

    :param config_file: str: Path to the JSON document
    :return: RunConfig: The validated config
    """
    if not os.path.exists(config_file):
        raise ConfigFileNotFoundException(
            messages.CONFIG_FILE_NOT_FOUND.format(path=config_file)
        )
    with open(config_file, encoding="utf-8") as f:
        try:
            document = json.load(f)
        except json.JSONDecodeError as err:
            raise InvalidConfigException(
                messages.INVALID_RUN_CONFIG.format(path=config_file, errors=err)
            ) from err
    try:
        return RunConfig.model_validate(document)
    except ValidationError as err:
        details = "; ".join(
            f"{'.'.join(str(p) for p in e['loc'])}: {e['msg']}" for e in err.errors()
        )
        raise InvalidConfigException(
            messages.INVALID_RUN_CONFIG.format(path=config_file, errors=details)
        ) from err


def configure_logging(level: str | None = None) -> None:
    root = logging.getLogger()
    root.handlers.clear()
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(handler)
    root.setLevel(level or settings.log_level)


settings = Settings()
