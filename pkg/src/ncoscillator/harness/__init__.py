"""Config-driven runs, sweeps, figure targets and the invariant suite."""

from .config import ExperimentConfig, load_config, parse_config
from .figures import FIGURE_IDS, reproduce_figure
from .runner import ep_solve, run
from .sweep import sweep

__all__ = ["ExperimentConfig", "load_config", "parse_config", "FIGURE_IDS", "reproduce_figure",
           "ep_solve", "run", "sweep"]
