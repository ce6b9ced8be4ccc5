"""Batch verification harness: configuration, criteria battery, CLI."""
from .config import ConfigError, ExperimentConfig, load_config
from .battery import CRITERIA, Row, run_criterion

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "CRITERIA", "Row", "run_criterion"]
