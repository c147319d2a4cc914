"""
Expression evaluator.

Evaluation is pure: it reads identifiers from an environment mapping and
reaches the network only through the EvaluationContext passed in.
"""

import logging
import operator
from typing import Any, Callable, Dict, Mapping, Sequence

from ..config.models import DEFAULT_MAX_WALKING, DEFAULT_WALK_SPEED, MAX_WALKING, WALK_SPEED
from ..utils.exceptions import (
    DivisionByZeroError,
    ExpressionError,
    ExpressionTypeError,
    UnboundIdentifierError,
    UnknownFunctionError,
)
from .ast import Binary, Call, Expr, Identifier, Literal, Unary, print_expression
from .values import Location, Value, is_number

logger = logging.getLogger(__name__)


class EvaluationContext:
    """
    Network services available to builtin functions.

    The base context has no network; generation plugs in a context backed by
    the loaded drive/walk networks and station set.
    """

    def travel_time(self, a: Location, b: Location) -> float:
        raise ExpressionError("dtt() needs a road network")

    def stations_near(self, a: Location, max_walk: float, walk_speed: float) -> frozenset:
        raise ExpressionError("stops() needs a station set")


Builtin = Callable[[Sequence[Value], Mapping[str, Value], EvaluationContext], Value]


def _arity(name: str, args: Sequence[Value], count: int) -> None:
    if len(args) != count:
        raise ExpressionTypeError(f"{name}() takes {count} argument(s), {len(args)} given")


def _builtin_dtt(args, env, ctx):
    _arity("dtt", args, 2)
    a, b = args
    if not isinstance(a, Location) or not isinstance(b, Location):
        raise ExpressionTypeError(f"dtt() expects two locations, got {a!r}, {b!r}")
    return ctx.travel_time(a, b)


def _builtin_stops(args, env, ctx):
    _arity("stops", args, 1)
    (a,) = args
    if not isinstance(a, Location):
        raise ExpressionTypeError(f"stops() expects a location, got {a!r}")
    max_walk = env.get(MAX_WALKING, DEFAULT_MAX_WALKING)
    walk_speed = env.get(WALK_SPEED, DEFAULT_WALK_SPEED)
    return ctx.stations_near(a, float(max_walk), float(walk_speed))


def _builtin_len(args, env, ctx):
    _arity("len", args, 1)
    (x,) = args
    if not isinstance(x, (tuple, frozenset, str)):
        raise ExpressionTypeError(f"len() expects an array or set, got {x!r}")
    return len(x)


def _builtin_set(args, env, ctx):
    _arity("set", args, 1)
    (x,) = args
    if not isinstance(x, (tuple, frozenset)):
        raise ExpressionTypeError(f"set() expects an array, got {x!r}")
    return frozenset(x)


BUILTINS: Dict[str, Builtin] = {
    "dtt": _builtin_dtt,
    "stops": _builtin_stops,
    "len": _builtin_len,
    "set": _builtin_set,
}

_ARITHMETIC = {
    "+": operator.add,
    "-": operator.sub,
    "*": operator.mul,
}
_ORDERING = {
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
}


def _numeric(value: Any, op: str) -> Any:
    if not is_number(value):
        raise ExpressionTypeError(f"operator '{op}' needs numbers, got {value!r}")
    return value


def evaluate(
    expr: Expr,
    env: Mapping[str, Value],
    ctx: EvaluationContext = None,
) -> Value:
    """
    Evaluate an expression.

    Args:
        expr: Parsed expression
        env: Attribute and parameter values by name
        ctx: Network services for dtt() and stops()

    Returns:
        The resulting value; numeric operations on an int and a float give a float

    Raises:
        UnboundIdentifierError: An identifier has no value in env
        ExpressionTypeError: An operator or function got operands of the wrong type
        DivisionByZeroError: Division by zero
        UnknownFunctionError: Call to a function outside the builtin set
    """
    if ctx is None:
        ctx = EvaluationContext()

    if isinstance(expr, Literal):
        return expr.value

    if isinstance(expr, Identifier):
        if expr.name not in env:
            raise UnboundIdentifierError(expr.name)
        return env[expr.name]

    if isinstance(expr, Unary):
        operand = evaluate(expr.operand, env, ctx)
        if expr.op == "not":
            return not bool(operand)
        return -_numeric(operand, "-")

    if isinstance(expr, Call):
        builtin = BUILTINS.get(expr.name)
        if builtin is None:
            raise UnknownFunctionError(expr.name)
        args = [evaluate(arg, env, ctx) for arg in expr.args]
        return builtin(args, env, ctx)

    if isinstance(expr, Binary):
        op = expr.op
        if op == "and":
            return bool(evaluate(expr.left, env, ctx)) and bool(evaluate(expr.right, env, ctx))
        if op == "or":
            return bool(evaluate(expr.left, env, ctx)) or bool(evaluate(expr.right, env, ctx))

        left = evaluate(expr.left, env, ctx)
        right = evaluate(expr.right, env, ctx)

        if op in _ARITHMETIC:
            return _ARITHMETIC[op](_numeric(left, op), _numeric(right, op))
        if op == "/":
            if _numeric(right, op) == 0:
                raise DivisionByZeroError(f"division by zero in '{print_expression(expr)}'")
            return _numeric(left, op) / right
        if op == "&":
            if not isinstance(left, frozenset) or not isinstance(right, frozenset):
                raise ExpressionTypeError(f"operator '&' needs two sets, got {left!r}, {right!r}")
            return left & right
        if op in _ORDERING:
            return _ORDERING[op](_numeric(left, op), _numeric(right, op))
        if op == "==":
            return left == right
        if op == "!=":
            return left != right

    raise ExpressionTypeError(f"cannot evaluate {expr!r}")
