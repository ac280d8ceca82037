"""Configuration management for maxbpd."""

import os
import yaml
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union


class ConfigError(Exception):
    """Exception raised for configuration errors."""
    pass


class Config:
    """Loads the YAML configuration, applying defaults and environment overrides."""

    DEFAULTS = {
        "max_grid_size": 16,
        "enumeration_bound": 5,
        "jobs": 1,
        "svg_cell_size": 40,
        "png_cell_size": 32,
    }

    ENV_OVERRIDES = {
        "MAXBPD_MAX_GRID_SIZE": "max_grid_size",
        "MAXBPD_ENUMERATION_BOUND": "enumeration_bound",
        "MAXBPD_JOBS": "jobs",
    }

    # Enumeration beyond six rows is out of reach for the row-profile search.
    ENUMERATION_CEILING = 6

    def __init__(self, path: Optional[Union[str, Path]] = None):
        """Initialize configuration paths."""
        self.explicit_config_file = Path(path) if path else None

        # User config directory
        self.user_config_dir = Path.home() / ".config" / "maxbpd"
        self.user_config_file = self.user_config_dir / "config.yaml"

        # Local config file
        self.local_config_file = Path("maxbpd.yaml")

        self.config: Dict[str, Any] = {}
        self.logger = logging.getLogger(__name__)

    def load(self) -> Dict[str, Any]:
        """
        Load and validate the configuration.

        Checks for a config file in the following order:
        1. The path given to the constructor
        2. Local directory (./maxbpd.yaml)
        3. User's config directory (~/.config/maxbpd/config.yaml)

        Built-in defaults fill anything the file leaves out, and MAXBPD_*
        environment variables override both.

        Returns:
            Dict containing configuration values

        Raises:
            ConfigError: If a file is unreadable or a value is invalid.
        """
        data: Dict[str, Any] = {}
        if self.explicit_config_file is not None:
            if not self.explicit_config_file.exists():
                raise ConfigError(f"Config file {self.explicit_config_file} does not exist")
            self.logger.debug(f"Loading configuration from {self.explicit_config_file}")
            data = self._load_file(self.explicit_config_file)
        elif self.local_config_file.exists():
            self.logger.debug(f"Loading configuration from local file: {self.local_config_file}")
            data = self._load_file(self.local_config_file)
        elif self.user_config_file.exists():
            self.logger.debug(f"Loading configuration from user config file: {self.user_config_file}")
            data = self._load_file(self.user_config_file)
        else:
            self.logger.debug("No configuration file found, using defaults")

        self.config = {**self.DEFAULTS, **data}
        self._apply_environment()
        self._validate_config()
        return self.config

    def _load_file(self, config_file: Path) -> Dict[str, Any]:
        """Read one YAML file into a mapping."""
        try:
            with open(config_file, "r") as f:
                data = yaml.safe_load(f)
        except yaml.YAMLError:
            raise ConfigError("Config file is not valid YAML")
        except OSError:
            raise ConfigError(f"Unable to read config file at {config_file}")

        if data is None:
            raise ConfigError("Config file is empty or not valid YAML")
        if not isinstance(data, dict):
            raise ConfigError("Config file must contain a mapping of settings")

        unknown = sorted(set(data) - set(self.DEFAULTS))
        if unknown:
            raise ConfigError(f"Unknown config field '{unknown[0]}'")
        return data

    def _apply_environment(self) -> None:
        for variable, key in self.ENV_OVERRIDES.items():
            value = os.environ.get(variable)
            if value is None or value.strip() == "":
                continue
            try:
                self.config[key] = int(value)
            except ValueError:
                raise ConfigError(f"Environment variable {variable} must be an integer, got '{value}'")
            self.logger.debug(f"{key} overridden by {variable}={value}")

    def _validate_config(self) -> None:
        """Validate that every field is a positive integer and the bounds are consistent."""
        for field in self.DEFAULTS:
            value = self.config.get(field)
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"Field '{field}' must be an integer")
            if value < 1:
                raise ConfigError(f"Field '{field}' must be positive")

        if self.config["enumeration_bound"] > self.ENUMERATION_CEILING:
            raise ConfigError(
                f"Field 'enumeration_bound' cannot exceed {self.ENUMERATION_CEILING}"
            )
        if self.config["enumeration_bound"] > self.config["max_grid_size"]:
            raise ConfigError("Field 'enumeration_bound' cannot exceed 'max_grid_size'")

    def __getitem__(self, key: str) -> Any:
        if not self.config:
            self.load()
        return self.config[key]
