"""Node-link topology synthesis: program construction, LP/MILP solvers and the oracle."""

from .milp import MilpOptions, SynthesisResult, solve_milp
from .oracle import MAX_ORACLE_LINKS, OracleResult, brute_force_optimum
from .pipeline import SynthesisRun, extract_topology, solve_relaxation, synthesize
from .program import LinearProgram, build_node_link_program, flow_key, install_key
from .simplex import LpSolution, LpStatus, SimplexOptions, solve_lp

__all__ = [
    "LinearProgram",
    "LpSolution",
    "LpStatus",
    "MAX_ORACLE_LINKS",
    "MilpOptions",
    "OracleResult",
    "SimplexOptions",
    "SynthesisResult",
    "SynthesisRun",
    "brute_force_optimum",
    "build_node_link_program",
    "extract_topology",
    "flow_key",
    "install_key",
    "solve_lp",
    "solve_milp",
    "solve_relaxation",
    "synthesize",
]
