"""Platoon-forming heuristic on top of solo insertion routes."""

from .platoon import SearchConfig
from .solo import solve_solo, solo_routes
from .solver import ModularResult, solve_modular

__all__ = ["SearchConfig", "solve_solo", "solo_routes", "ModularResult", "solve_modular"]
