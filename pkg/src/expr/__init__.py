"""
Expression language for attribute values and constraints.
"""

from .ast import (
    BUILTIN_NAMES,
    Binary,
    Call,
    Expr,
    Identifier,
    Literal,
    Unary,
    called_functions,
    dependencies,
    print_expression,
)
from .evaluator import BUILTINS, EvaluationContext, evaluate
from .parser import parse_expression
from .values import Location, Value, coerce_to_type, round_half_up

__all__ = [
    "BUILTINS",
    "BUILTIN_NAMES",
    "Binary",
    "Call",
    "EvaluationContext",
    "Expr",
    "Identifier",
    "Literal",
    "Location",
    "Unary",
    "Value",
    "called_functions",
    "coerce_to_type",
    "dependencies",
    "evaluate",
    "parse_expression",
    "print_expression",
    "round_half_up",
]
