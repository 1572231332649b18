"""homcirc: linear circuit analysis with homogeneous branch descriptions.

Branches are projective triads (p:q:s) with p*v - q*i = s; circuits
solve through the seed reduction [A P; B Q] u = [A Q; -B P] sbar, which
is valid for every parameter assignment, including shorts, opens and
ideal sources.  Non-degeneracy is decided by the tree-enumerator
polynomial in its two-variables-per-branch form.
"""

__version__ = "0.1.0"

from .elements import Configuration, Triad, OPEN, SHORT
from .errors import CircuitError
from .graph import CutCyclePair, Digraph, default_pair, fundamental_pair
from .kirchhoff import KirchhoffPolynomial, is_degenerate, kirchhoff_polynomial
from .netlist import Netlist, parse_netlist
from .solver import (
    Fault,
    SolveResult,
    assemble_branch_current,
    assemble_branch_voltage,
    assemble_full,
    assemble_homogeneous_symmetric,
    assemble_partial,
    fault_sweep,
    solve_model,
    thevenin,
)

__all__ = [
    "__version__",
    "CircuitError",
    "Configuration",
    "CutCyclePair",
    "Digraph",
    "Fault",
    "KirchhoffPolynomial",
    "Netlist",
    "OPEN",
    "SHORT",
    "SolveResult",
    "Triad",
    "assemble_branch_current",
    "assemble_branch_voltage",
    "assemble_full",
    "assemble_homogeneous_symmetric",
    "assemble_partial",
    "default_pair",
    "fault_sweep",
    "fundamental_pair",
    "is_degenerate",
    "kirchhoff_polynomial",
    "parse_netlist",
    "solve_model",
    "thevenin",
]
