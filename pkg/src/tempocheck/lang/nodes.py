"""AST node classes for the constraint expression language.

Structural equality deliberately ignores the annotation fields filled in by
the resolver (static type, temporal-containment flag) so that round-trip
tests can compare freshly parsed trees against resolved ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

TEMPORAL_OPS = ("next", "eventually", "always", "until", "atLeastOnce", "everytime")
UNARY_TEMPORAL = ("next", "eventually", "always")
BINARY_TEMPORAL = ("until", "atLeastOnce", "everytime")
ITERATOR_OPS = ("forAll", "exists", "select", "collect")
COLLECTION_CALLS = ("size", "isEmpty", "includes", "at", "first")
VALUE_BUILTINS = ("isDefined", "size", "contains")
COMPARE_OPS = ("=", "<>", "<", "<=", ">", ">=")
BOOL_OPS = ("and", "or", "xor")


@dataclass(eq=True)
class Node:
    """Common annotation slots; subclasses carry the structure."""

    # Filled by the resolver; excluded from structural equality.
    static_type: object = field(default=None, compare=False, repr=False, init=False)
    has_temporal: bool = field(default=False, compare=False, repr=False, init=False)


@dataclass(eq=True)
class Literal(Node):
    value: Union[bool, int, str]


@dataclass(eq=True)
class SelfRef(Node):
    pass


@dataclass(eq=True)
class VarRef(Node):
    name: str


@dataclass(eq=True)
class Navigate(Node):
    obj: Node
    prop: str


@dataclass(eq=True)
class Call(Node):
    """Builtin feature call: `.name(args)` (arrow=False) or `->name(args)`."""

    obj: Node
    name: str
    args: tuple[Node, ...]
    arrow: bool


@dataclass(eq=True)
class Iterate(Node):
    """Collection iterator: obj->op(var | body)."""

    obj: Node
    op: str
    var: str
    body: Node


@dataclass(eq=True)
class Compare(Node):
    op: str
    left: Node
    right: Node


@dataclass(eq=True)
class BoolOp(Node):
    op: str
    left: Node
    right: Node


@dataclass(eq=True)
class Not(Node):
    child: Node


@dataclass(eq=True)
class TemporalOp(Node):
    op: str
    args: tuple[Node, ...]


@dataclass(eq=True)
class ConstraintDef:
    """A named, context-typed constraint with its source text and AST."""

    name: str
    context_type: str
    source: str
    root: Node


def children(node: Node) -> tuple[Node, ...]:
    if isinstance(node, Navigate):
        return (node.obj,)
    if isinstance(node, Call):
        return (node.obj, *node.args)
    if isinstance(node, Iterate):
        return (node.obj, node.body)
    if isinstance(node, Compare):
        return (node.left, node.right)
    if isinstance(node, BoolOp):
        return (node.left, node.right)
    if isinstance(node, Not):
        return (node.child,)
    if isinstance(node, TemporalOp):
        return node.args
    return ()


def walk(node: Node):
    yield node
    for c in children(node):
        yield from walk(c)


def contains_temporal(node: Node) -> bool:
    return any(isinstance(n, TemporalOp) for n in walk(node))
