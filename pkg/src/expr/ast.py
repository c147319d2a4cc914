"""
Abstract syntax tree of the expression language and its canonical printer.
"""

import json
from dataclasses import dataclass
from typing import Any, Set, Tuple, Union

ARITHMETIC_OPS = ("+", "-", "*", "/")
COMPARISON_OPS = ("<", "<=", ">", ">=", "==", "!=")
BOOLEAN_OPS = ("and", "or")
SET_OPS = ("&",)
UNARY_OPS = ("-", "not")
BUILTIN_NAMES = ("dtt", "stops", "len", "set")


@dataclass(frozen=True)
class Literal:
    value: Any


@dataclass(frozen=True)
class Identifier:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    """Arithmetic, set intersection, comparison or boolean operator."""

    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    name: str
    args: Tuple["Expr", ...] = ()


Expr = Union[Literal, Identifier, Unary, Binary, Call]


def print_expression(expr: Expr) -> str:
    """
    Render an expression as canonical, fully parenthesized text.

    The output parses back to a tree that evaluates to the same value.
    """
    if isinstance(expr, Literal):
        value = expr.value
        if isinstance(value, bool):
            return "True" if value else "False"
        if isinstance(value, str):
            return json.dumps(value)
        if value < 0:
            return f"(-{-value!r})"
        return repr(value)
    if isinstance(expr, Identifier):
        return expr.name
    if isinstance(expr, Unary):
        operand = print_expression(expr.operand)
        return f"(not {operand})" if expr.op == "not" else f"(-{operand})"
    if isinstance(expr, Binary):
        return f"({print_expression(expr.left)} {expr.op} {print_expression(expr.right)})"
    if isinstance(expr, Call):
        return f"{expr.name}({', '.join(print_expression(a) for a in expr.args)})"
    raise TypeError(f"Not an expression node: {expr!r}")


def dependencies(expr: Expr) -> Set[str]:
    """Free identifiers of an expression; function names are not included."""
    if isinstance(expr, Identifier):
        return {expr.name}
    if isinstance(expr, Unary):
        return dependencies(expr.operand)
    if isinstance(expr, Binary):
        return dependencies(expr.left) | dependencies(expr.right)
    if isinstance(expr, Call):
        found: Set[str] = set()
        for arg in expr.args:
            found |= dependencies(arg)
        return found
    return set()


def called_functions(expr: Expr) -> Set[str]:
    if isinstance(expr, Unary):
        return called_functions(expr.operand)
    if isinstance(expr, Binary):
        return called_functions(expr.left) | called_functions(expr.right)
    if isinstance(expr, Call):
        found = {expr.name}
        for arg in expr.args:
            found |= called_functions(arg)
        return found
    return set()
