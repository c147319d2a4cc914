"""
Lark grammar for attribute expressions and constraints.

The language is the subset of Python expressions used by configuration files:
numbers, identifiers, arithmetic, comparisons, boolean operators, set
intersection and calls to the builtin functions. Precedence, loosest first:
or, and, not, comparison, &, + -, * /, unary minus, call/atom. A comparison
takes exactly two operands, so `a < b < c` is a syntax error.
"""

import json
from functools import lru_cache

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedEOF, UnexpectedInput, VisitError

from ..utils.exceptions import ExpressionSyntaxError
from .ast import Binary, Call, Expr, Identifier, Literal, Unary

EXPRESSION_GRAMMAR = r"""
?start: or_expr

?or_expr: and_expr
        | or_expr "or" and_expr         -> or_

?and_expr: not_expr
         | and_expr "and" not_expr      -> and_

?not_expr: comparison
         | "not" not_expr               -> not_

?comparison: intersect
           | intersect COMP_OP intersect -> compare

?intersect: sum
          | intersect "&" sum           -> intersect_

?sum: product
    | sum "+" product                   -> add
    | sum "-" product                   -> sub

?product: unary
        | product "*" unary             -> mul
        | product "/" unary             -> div

?unary: atom
      | "-" unary                       -> neg

?atom: NUMBER                           -> number
     | ESCAPED_STRING                   -> string
     | "True"                           -> true
     | "False"                          -> false
     | NAME "(" [arguments] ")"         -> call
     | NAME                             -> identifier
     | "(" or_expr ")"

arguments: or_expr ("," or_expr)*

COMP_OP: "<=" | ">=" | "==" | "!=" | "<" | ">"

%import common.CNAME -> NAME
%import common.NUMBER
%import common.ESCAPED_STRING
%import common.WS
%ignore WS
"""

_parser = Lark(EXPRESSION_GRAMMAR, parser="lalr", propagate_positions=True)


@v_args(inline=True)
class TreeToExpr(Transformer):
    """Transforms a lark parse tree into expression nodes."""

    def number(self, token: Token) -> Literal:
        text = str(token)
        if any(c in text for c in ".eE"):
            return Literal(float(text))
        return Literal(int(text))

    def string(self, token: Token) -> Literal:
        return Literal(json.loads(str(token)))

    def true(self) -> Literal:
        return Literal(True)

    def false(self) -> Literal:
        return Literal(False)

    def identifier(self, token: Token) -> Identifier:
        return Identifier(str(token))

    def call(self, name: Token, arguments=None) -> Call:
        return Call(str(name), tuple(arguments or ()))

    def arguments(self, *args: Expr):
        return list(args)

    def neg(self, operand: Expr) -> Unary:
        return Unary("-", operand)

    def not_(self, operand: Expr) -> Unary:
        return Unary("not", operand)

    def compare(self, left: Expr, op: Token, right: Expr) -> Binary:
        return Binary(str(op), left, right)

    def add(self, left, right):
        return Binary("+", left, right)

    def sub(self, left, right):
        return Binary("-", left, right)

    def mul(self, left, right):
        return Binary("*", left, right)

    def div(self, left, right):
        return Binary("/", left, right)

    def intersect_(self, left, right):
        return Binary("&", left, right)

    def and_(self, left, right):
        return Binary("and", left, right)

    def or_(self, left, right):
        return Binary("or", left, right)


@lru_cache(maxsize=1024)
def parse_expression(text: str) -> Expr:
    """
    Parse expression text into an AST.

    Args:
        text: Expression or constraint source, e.g. "earliest_departure + 1800"

    Returns:
        Root node of the expression tree

    Raises:
        ExpressionSyntaxError: If the text is empty or not in the language
    """
    if not text or not text.strip():
        raise ExpressionSyntaxError(text, 0, "empty expression")
    try:
        tree = _parser.parse(text)
        return TreeToExpr().transform(tree)
    except UnexpectedEOF as e:
        raise ExpressionSyntaxError(text, len(text), "unexpected end of input") from e
    except UnexpectedInput as e:
        offset = getattr(e, "pos_in_stream", None)
        if offset is None:
            offset = len(text)
        raise ExpressionSyntaxError(text, offset, e.__class__.__name__) from e
    except VisitError as e:
        raise ExpressionSyntaxError(text, 0, str(e.orig_exc)) from e
