"""Exhaustive oracle for tiny instances and the MILP exporter."""

from .milp import MilpArtifact, export_milp, solve_milp
from .oracle import OracleLimits, OracleRefusal, OracleResult, brute_force_solve

__all__ = ["MilpArtifact", "export_milp", "solve_milp", "OracleLimits", "OracleRefusal",
           "OracleResult", "brute_force_solve"]
