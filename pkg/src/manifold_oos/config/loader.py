"""
Configuration Loader for manifold-oos.

This module provides a multi-source configuration loader that supports
loading from CLI arguments, environment variables, YAML files, and defaults.
"""

import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from manifold_oos.exceptions import ConfigurationError

logger = logging.getLogger(__name__)

ENV_PREFIX = "MANIFOLD_OOS_"

# Keys whose values must be strictly positive when present
POSITIVE_KEYS = ("epsilon", "curvature_c", "threshold", "workers", "grid", "num_queries")


class ConfigLoader:
    """
    Multi-source configuration loader.

    Loads configuration from multiple sources with precedence:
    1. CLI arguments (highest priority)
    2. Environment variables
    3. YAML configuration file
    4. Default values (lowest priority)
    """

    # Target type for each known key; None-valued CLI args are ignored
    KEY_TYPES: Dict[str, type] = {
        "epsilon": float,
        "curvature_c": float,
        "scheme": str,
        "seed": int,
        "grid": int,
        "num_queries": int,
        "err": float,
        "threshold": float,
        "workers": int,
        "max_doublings": int,
        "log_level": str,
    }

    def __init__(
        self,
        config_path: Optional[str] = None,
        defaults: Optional[Dict[str, Any]] = None,
    ):
        """
        Initialize the configuration loader.

        Args:
            config_path: Path to YAML configuration file
            defaults: Default configuration values
        """
        self.config_path = config_path
        self.defaults = defaults or self._get_default_config()
        self._config: Dict[str, Any] = {}

    def _get_default_config(self) -> Dict[str, Any]:
        """
        Get default configuration values.

        Returns:
            Dictionary of default configuration
        """
        return {
            "epsilon": None,
            "curvature_c": None,
            "scheme": "tangent",
            "seed": 0,
            "grid": 30,
            "num_queries": 100,
            "err": 1e-3,
            "threshold": 1.0,
            "workers": 4,
            "max_doublings": 4,
            "log_level": "INFO",
        }

    def load(self, cli_args: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        """
        Load configuration from all sources.

        Args:
            cli_args: CLI arguments dictionary (highest priority)

        Returns:
            Merged configuration dictionary

        Raises:
            ConfigurationError: If a value cannot be converted or is out of range
        """
        config = self.defaults.copy()

        if self.config_path:
            yaml_config = self._parse_yaml()
            if yaml_config:
                config = self._merge_config(config, self._convert(yaml_config, "YAML"))

        env_config = self._parse_env()
        config = self._merge_config(config, env_config)

        if cli_args:
            present = {k: v for k, v in cli_args.items() if v is not None}
            config = self._merge_config(config, present)

        self.validate(config)
        self._config = config
        logger.debug(f"Configuration loaded: {len(config)} keys")

        return config

    def _parse_yaml(self) -> Dict[str, Any]:
        """
        Parse YAML configuration file.

        Returns:
            Configuration dictionary from YAML file

        Raises:
            ConfigurationError: If the file exists but is not valid YAML
        """
        config_path = Path(self.config_path)
        if not config_path.exists():
            logger.warning(f"Config file not found: {self.config_path}")
            return {}

        try:
            with open(config_path, "r", encoding="utf-8") as f:
                config = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigurationError(f"Error parsing YAML config: {e}") from e

        if config and isinstance(config, dict):
            logger.info(f"Loaded config from {self.config_path}")
            return {str(k).replace("-", "_"): v for k, v in config.items()}

        return {}

    def _parse_env(self) -> Dict[str, Any]:
        """
        Parse configuration from environment variables.

        Returns:
            Configuration dictionary from environment
        """
        raw: Dict[str, Any] = {}
        for config_key in self.KEY_TYPES:
            value = os.environ.get(f"{ENV_PREFIX}{config_key.upper()}")
            if value is not None:
                raw[config_key] = value
        return self._convert(raw, "environment")

    def _convert(self, values: Dict[str, Any], source: str) -> Dict[str, Any]:
        converted: Dict[str, Any] = {}
        for key, value in values.items():
            target = self.KEY_TYPES.get(key)
            if target is None or value is None:
                converted[key] = value
                continue
            try:
                converted[key] = target(value)
            except (TypeError, ValueError) as e:
                raise ConfigurationError(
                    f"Invalid value for '{key}' from {source}: {value!r}"
                ) from e
        return converted

    def _merge_config(
        self, base: Dict[str, Any], override: Dict[str, Any]
    ) -> Dict[str, Any]:
        """
        Merge two configuration dictionaries.

        Args:
            base: Base configuration
            override: Override configuration (takes precedence)

        Returns:
            Merged configuration dictionary
        """
        result = base.copy()
        result.update(override)
        return result

    def validate(self, config: Dict[str, Any]) -> None:
        """
        Check range constraints of a merged configuration.

        Raises:
            ConfigurationError: If an override is not positive or err is negative
        """
        for key in POSITIVE_KEYS:
            value = config.get(key)
            if value is not None and value <= 0:
                raise ConfigurationError(f"'{key}' must be positive, got {value}")
        err = config.get("err")
        if err is not None and err < 0:
            raise ConfigurationError(f"'err' must be nonnegative, got {err}")
        max_doublings = config.get("max_doublings")
        if max_doublings is not None and max_doublings < 0:
            raise ConfigurationError(
                f"'max_doublings' must be nonnegative, got {max_doublings}"
            )

    def get(self, key: str, default: Any = None) -> Any:
        """
        Get a configuration value.

        Args:
            key: Configuration key
            default: Default value if key not found

        Returns:
            Configuration value or default
        """
        return self._config.get(key, default)
