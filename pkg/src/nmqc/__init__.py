"""Compile Boolean functions into non-adaptive GHZ measurement programs."""

__version__ = "0.1.0"

from .boolfn import AnfForm, BooleanFunction, SymmetricFunction, csf, parse_function
from .polynomial import MultilinearPoly, granularity, sparsity, verify_mod2
from .constructions import (
    compare_all,
    construct_csf,
    construct_ef,
    construct_fr,
    construct_kr,
    construct_sc,
)
from .assignment import MeasurementAssignment, assignment_from_poly, clifford_level, evaluate_deterministic
from .circuits import emit_netlist, total_cost
from .feasibility import decide_symmetric_support, smith_normal_form

__all__ = [
    "AnfForm", "BooleanFunction", "SymmetricFunction", "csf", "parse_function",
    "MultilinearPoly", "granularity", "sparsity", "verify_mod2",
    "compare_all", "construct_csf", "construct_ef", "construct_fr", "construct_kr", "construct_sc",
    "MeasurementAssignment", "assignment_from_poly", "clifford_level", "evaluate_deterministic",
    "emit_netlist", "total_cost", "decide_symmetric_support", "smith_normal_form",
]
