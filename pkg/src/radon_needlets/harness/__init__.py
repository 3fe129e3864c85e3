"""Error metrics, the comparison study, and the command-line interface."""
from .config import ConfigError, ExperimentConfig, load_config, parse_config
from .experiment import run_experiment
from .io import emit_csv, emit_images, read_csv
from .metrics import lp_error

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "emit_csv",
    "emit_images",
    "load_config",
    "lp_error",
    "parse_config",
    "read_csv",
    "run_experiment",
]
