"""Experiment runner, configuration files and MatrixMarket I/O behind the ``lodo`` command."""

from .config import ExperimentConfig, dump_config, load_config, parse_config
from .matrix_market import load_matrix_market, write_matrix_market
from .runner import ExitCode, RunResult, reduce_only, run_experiment, sweep, validate_only

__all__ = [
    'ExitCode',
    'ExperimentConfig',
    'RunResult',
    'dump_config',
    'load_config',
    'load_matrix_market',
    'parse_config',
    'reduce_only',
    'run_experiment',
    'sweep',
    'validate_only',
    'write_matrix_market',
]
