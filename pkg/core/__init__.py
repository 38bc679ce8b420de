"""
Core utilities for rotor-optomechanics experiments.

Problem-independent framework code: run configuration, experiment base
class, result tables, CSV and plot output.
"""

from .base_experiment import BaseExperiment, RunConfig, default_jobs
from .schemas import ResultTable
from .plot_utils import PlotRenderer
from .output_writer import OutputWriter, format_value

__all__ = [
    "BaseExperiment",
    "RunConfig",
    "default_jobs",
    "ResultTable",
    "PlotRenderer",
    "OutputWriter",
    "format_value",
]
