"""Experiment matrix, summaries, regression and plan drawings."""

from .experiments import MatrixConfig, Summary, cell_seed, load_results, run_matrix, summarize
from .ols import OlsFit, RankDeficiencyError, design_matrix, ols_fit, regress
from .render import grid_layout, render_plan

__all__ = ["MatrixConfig", "Summary", "cell_seed", "load_results", "run_matrix", "summarize",
           "OlsFit", "RankDeficiencyError", "design_matrix", "ols_fit", "regress", "grid_layout",
           "render_plan"]
