"""Parallel chip-firing games on graphs: simulation, cycle analysis and claim sweeps."""

from .analysis import activity, complement, firing_sequence, is_clumpy, is_compliant, is_dense
from .engine import BudgetExceeded, CycleSummary, find_cycle, simulate, step
from .graph import Graph, GraphError, complete, complete_bipartite, cycle, parse_graph, path
from .report import VerificationReport

__version__ = "0.1.0"
