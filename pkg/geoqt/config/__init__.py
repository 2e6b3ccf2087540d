# SPDX-License-Identifier: BUSL-1.1
"""Configuration system: YAML run-config loading and validation."""

from geoqt.config.resources import RunConfig, OperatorSpec, resource_from_dict, resource_to_dict
from geoqt.config.loader import ConfigStore
from geoqt.config.validation import (
    validate_run_config, ConfigError, ValidationError, ValidationResult,
)

__all__ = [
    "RunConfig", "OperatorSpec", "resource_from_dict", "resource_to_dict",
    "ConfigStore", "validate_run_config", "ConfigError", "ValidationError",
    "ValidationResult",
]
