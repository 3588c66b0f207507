"""Compiler and error-bounded resource estimator for LCU block encodings and QSP on Rydberg atoms."""

from .ebgc import (
    CircuitIR,
    CoefficientTree,
    Gate,
    ResourceReport,
    account,
    depth_of_gate,
    ebgc_of_gate,
)
from .lcu import (
    LcuPlan,
    compile_block_encoding,
    compile_controlled_walk,
    compile_lcu,
    compile_state_prep,
    compile_walk,
    grouped_plan,
    ohe_plan,
    walk_cost_formulas,
)
from .pauli import HamiltonianSpec, PauliTerm, build_disordered_heisenberg, parse_hamiltonian_json
from .qsp import QspSequence, assemble_qsp_protocol, qsp_evaluate, query_complexity

__version__ = "0.1.0"

__all__ = [
    "CircuitIR", "CoefficientTree", "Gate", "ResourceReport", "account", "depth_of_gate",
    "ebgc_of_gate", "LcuPlan", "compile_block_encoding", "compile_controlled_walk", "compile_lcu",
    "compile_state_prep", "compile_walk", "grouped_plan", "ohe_plan", "walk_cost_formulas",
    "HamiltonianSpec", "PauliTerm", "build_disordered_heisenberg", "parse_hamiltonian_json",
    "QspSequence", "assemble_qsp_protocol", "qsp_evaluate", "query_complexity",
]
