"""Tiny expression language for the CLI: ``+ - * ^``, names and integer literals."""
from __future__ import annotations

import ast
import re

from .errors import ExpressionError
from .rings import CoefRing
from .series import GradedSeries

_NAME = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


def parse(text: str) -> ast.AST:
    src = text.replace("^", "**").strip()
    if not src:
        raise ExpressionError("empty expression")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {text!r}") from exc
    for node in ast.walk(tree):
        if isinstance(node, (ast.Expression, ast.Load, ast.Name, ast.Add, ast.Sub, ast.Mult, ast.Pow,
                             ast.USub, ast.UAdd)):
            continue
        if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Add, ast.Sub, ast.Mult, ast.Pow)):
            continue
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            continue
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
            continue
        raise ExpressionError(f"unsupported syntax in {text!r}")
    return tree.body


def names(text: str) -> list:
    return sorted({n.id for n in ast.walk(parse(text)) if isinstance(n, ast.Name)})


def generator_dim(name: str, p: int | None = None) -> int:
    """Dimension convention for generators introduced on the command line."""
    m = re.fullmatch(r"([a-z]+)(\d+)", name)
    if not m:
        return 1
    letter, i = m.group(1), int(m.group(2))
    if letter == "t":
        return (p or 2) ** i - 1
    if letter == "v":
        return (p or 2) ** i - 1
    return i


def evaluate(text: str, ring: CoefRing, vars=None, trunc: int | None = None):
    """Evaluate to a ``GradedSeries`` (when ``vars`` is given) or a ring element."""
    tree = parse(text)
    series_names = {v if isinstance(v, str) else v.name for v in (vars or ())}

    def leaf_name(n):
        if n in series_names:
            return GradedSeries.gen(ring, vars, trunc, n)
        if ring.has_generator(n):
            el = ring.gen(n)
            return GradedSeries.constant(ring, vars, trunc, el) if vars else el
        raise ExpressionError(f"unknown name {n!r}")

    def ev(node):
        if isinstance(node, ast.Name):
            return leaf_name(node.id)
        if isinstance(node, ast.Constant):
            return GradedSeries.constant(ring, vars, trunc, node.value) if vars else ring.scalar(node.value)
        if isinstance(node, ast.UnaryOp):
            val = ev(node.operand)
            return -val if isinstance(node.op, ast.USub) else val
        a = ev(node.left)
        if isinstance(node.op, ast.Pow):
            if not isinstance(node.right, ast.Constant) or node.right.value < 0:
                raise ExpressionError("exponents must be non-negative integer literals")
            return a ** node.right.value
        b = ev(node.right)
        if isinstance(node.op, ast.Add):
            return a + b
        if isinstance(node.op, ast.Sub):
            return a - b
        return a * b

    return ev(tree)
