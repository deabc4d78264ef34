"""Pretty-printer producing canonical constraint text.

parse(pretty(ast)) is structurally identical to ast; parentheses are emitted
only where precedence requires them.
"""

from __future__ import annotations

from .nodes import (
    BoolOp,
    Call,
    Compare,
    ConstraintDef,
    Iterate,
    Literal,
    Navigate,
    Node,
    Not,
    SelfRef,
    TemporalOp,
    VarRef,
)

# Higher binds tighter. Primaries sit above comparison.
_PREC_OR = 1
_PREC_AND = 2
_PREC_CMP = 3
_PREC_PRIMARY = 4


def _prec(node: Node) -> int:
    if isinstance(node, BoolOp):
        return _PREC_OR if node.op in ("or", "xor") else _PREC_AND
    if isinstance(node, Compare):
        return _PREC_CMP
    return _PREC_PRIMARY


def pretty(node: Node) -> str:
    return _fmt(node, 0)


def pretty_constraint(definition: ConstraintDef) -> str:
    return (
        f"context {definition.context_type} inv {definition.name}: "
        f"{pretty(definition.root)}"
    )


def _fmt(node: Node, parent_prec: int) -> str:
    text = _fmt_bare(node)
    if _prec(node) < parent_prec:
        return f"({text})"
    return text


def _fmt_bare(node: Node) -> str:
    if isinstance(node, Literal):
        if isinstance(node.value, bool):
            return "true" if node.value else "false"
        if isinstance(node.value, str):
            return f"'{node.value}'"
        return str(node.value)
    if isinstance(node, SelfRef):
        return "self"
    if isinstance(node, VarRef):
        return node.name
    if isinstance(node, Navigate):
        return f"{_fmt(node.obj, _PREC_PRIMARY)}.{node.prop}"
    if isinstance(node, Call):
        sep = "->" if node.arrow else "."
        args = ", ".join(_fmt(a, 0) for a in node.args)
        return f"{_fmt(node.obj, _PREC_PRIMARY)}{sep}{node.name}({args})"
    if isinstance(node, Iterate):
        return (
            f"{_fmt(node.obj, _PREC_PRIMARY)}->{node.op}"
            f"({node.var} | {_fmt(node.body, 0)})"
        )
    if isinstance(node, Compare):
        # Comparison operands are primaries; parenthesize anything looser.
        left = _fmt(node.left, _PREC_PRIMARY)
        right = _fmt(node.right, _PREC_PRIMARY)
        return f"{left} {node.op} {right}"
    if isinstance(node, BoolOp):
        prec = _prec(node)
        # Left-associative: the right operand needs parens at equal precedence.
        left = _fmt(node.left, prec)
        right = _fmt(node.right, prec + 1)
        return f"{left} {node.op} {right}"
    if isinstance(node, Not):
        return f"not({_fmt(node.child, 0)})"
    if isinstance(node, TemporalOp):
        args = ", ".join(_fmt(a, 0) for a in node.args)
        return f"{node.op}({args})"
    raise TypeError(f"unknown node {node!r}")
