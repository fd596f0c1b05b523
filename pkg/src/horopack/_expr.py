"""A small evaluator for the exact numeric expressions stored in the catalog.

Accepts numbers, ``+ - * / **``, unary signs, parentheses, the constant
``pi`` and the function ``sqrt``.  Anything else is rejected, so
catalog strings can never run arbitrary code.
"""

from __future__ import annotations

import ast
import math
import operator

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_FUNCS = {"sqrt": math.sqrt}
_CONSTS = {"pi": math.pi}


class ExpressionError(ValueError):
    pass


def _eval(node):
    if isinstance(node, ast.Expression):
        return _eval(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
            and not isinstance(node.value, bool):
        return float(node.value)
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval(node.left), _eval(node.right))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
        return _UNARY[type(node.op)](_eval(node.operand))
    if isinstance(node, ast.Name) and node.id in _CONSTS:
        return _CONSTS[node.id]
    if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
            and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords):
        arg = _eval(node.args[0])
        if node.func.id == "sqrt" and arg < 0:
            raise ExpressionError(f"sqrt of negative number {arg!r}")
        return _FUNCS[node.func.id](arg)
    raise ExpressionError(f"unsupported syntax: {ast.dump(node)[:60]}")


def evaluate(text) -> float:
    """Value of an expression string such as ``"sqrt(sqrt(2) - 1)"``."""
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return float(text)
    if not isinstance(text, str):
        raise ExpressionError(f"expected a string, got {type(text).__name__}")
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {text!r}") from exc
    try:
        value = _eval(tree)
    except ZeroDivisionError as exc:
        raise ExpressionError(f"division by zero in {text!r}") from exc
    if not math.isfinite(value):
        raise ExpressionError(f"non-finite value in {text!r}")
    return value
