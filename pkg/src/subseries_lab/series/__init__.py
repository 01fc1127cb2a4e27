"""Term streams, index sets, partial sums and verdicts."""

from .catalog import INSTANCES, STREAM_NAMES, get_instance, get_stream
from .indexsets import (ALL, EMPTY_SET, ExplicitBlocks, IndexSet, Residues, SignCell, are_disjoint,
                        difference, evens, intersection, is_subset, odds, union)
from .oracle import EmpiricalConfig, OracleEntry, Provenance, VerdictOracle
from .streams import FunctionStream, NegatedStream, PeriodicStream, TermStream, parse_term
from .tameness import is_tame, phi, sign_partition, tame_phi_family
from .traces import PartialSumTrace, TrendPolicy, empirical_verdict, partial_sum_trace
from .verdicts import ABS, COND, MINUS, OSC, PLUS, UNKNOWN, Verdict, verdict_union

__all__ = [
    "INSTANCES", "STREAM_NAMES", "get_instance", "get_stream",
    "ALL", "EMPTY_SET", "ExplicitBlocks", "IndexSet", "Residues", "SignCell", "are_disjoint",
    "difference", "evens", "intersection", "is_subset", "odds", "union",
    "EmpiricalConfig", "OracleEntry", "Provenance", "VerdictOracle",
    "FunctionStream", "NegatedStream", "PeriodicStream", "TermStream", "parse_term",
    "is_tame", "phi", "sign_partition", "tame_phi_family",
    "PartialSumTrace", "TrendPolicy", "empirical_verdict", "partial_sum_trace",
    "ABS", "COND", "MINUS", "OSC", "PLUS", "UNKNOWN", "Verdict", "verdict_union",
]
