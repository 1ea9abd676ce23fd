"""
A small language for circuits of states, effects and transformations.
"""
from opt_foundry.circuits.ast import (  # noqa: F401
    BindingMismatch,
    CircuitError,
    CircuitSyntaxError,
    DuplicateDeclaration,
    UnknownName,
    WireMismatch,
    format_expr,
    format_program,
)
from opt_foundry.circuits.evaluator import Evaluator, load_bindings, run_program, scalar_in_range  # noqa: F401
from opt_foundry.circuits.laws import law_check  # noqa: F401
from opt_foundry.circuits.parser import parse_circuit, parse_expression  # noqa: F401
from opt_foundry.circuits.typecheck import WireType, typecheck  # noqa: F401
