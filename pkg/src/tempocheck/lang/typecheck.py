"""Static checking of parsed constraints against an artifact schema.

Annotates every node with its static type and whether its subtree contains a
temporal operator, and verifies that the whole constraint is Boolean.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import (
    ArityError,
    TypeCheckError,
    UnknownPropertyError,
    UnknownTypeError,
)
from ..schema import Schema
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

BOOL = "bool"
INT = "int"
REAL = "real"
STRING = "string"


@dataclass(frozen=True)
class RefType:
    target: str

    def __str__(self) -> str:
        return f"ref({self.target})"


@dataclass(frozen=True)
class ListType:
    elem: object

    def __str__(self) -> str:
        return f"list({self.elem})"


def _kind_to_type(kind: str, target: str | None):
    if kind in (BOOL, INT, REAL, STRING):
        return kind
    if kind == "ref":
        return RefType(target)  # type: ignore[arg-type]
    if kind == "list-ref":
        return ListType(RefType(target))  # type: ignore[arg-type]
    if kind == "list-string":
        return ListType(STRING)
    raise AssertionError(kind)


def _numeric(t: object) -> bool:
    return t in (INT, REAL)


def _eq_comparable(a: object, b: object) -> bool:
    if a == b:
        return True
    if _numeric(a) and _numeric(b):
        return True
    return False


def resolve_constraint(definition: ConstraintDef, schema: Schema) -> ConstraintDef:
    """Resolve names and check types in place; returns the definition."""
    if not schema.has_type(definition.context_type):
        raise UnknownTypeError(f"unknown context type {definition.context_type!r}")
    env = {"self": RefType(definition.context_type)}
    checker = _Checker(schema)
    root_type = checker.check(definition.root, env)
    if root_type is not BOOL:
        raise TypeCheckError(
            f"constraint {definition.name!r} has result type {root_type}, not Boolean"
        )
    return definition


def resolve_expression(node: Node, schema: Schema, context_type: str) -> Node:
    """Resolve a bare Boolean expression against a context type."""
    if not schema.has_type(context_type):
        raise UnknownTypeError(f"unknown context type {context_type!r}")
    t = _Checker(schema).check(node, {"self": RefType(context_type)})
    if t is not BOOL:
        raise TypeCheckError(f"expression has result type {t}, not Boolean")
    return node


class _Checker:
    def __init__(self, schema: Schema):
        self.schema = schema

    def check(self, node: Node, env: dict[str, object]):
        t = self._check(node, env)
        node.static_type = t
        return t

    def _check(self, node: Node, env: dict[str, object]):
        if isinstance(node, Literal):
            if isinstance(node.value, bool):
                return BOOL
            if isinstance(node.value, int):
                return INT
            return STRING

        if isinstance(node, SelfRef):
            return env["self"]

        if isinstance(node, VarRef):
            if node.name not in env:
                raise TypeCheckError(f"unknown name {node.name!r}")
            return env[node.name]

        if isinstance(node, Navigate):
            obj_t = self.check(node.obj, env)
            node.has_temporal = node.obj.has_temporal
            if not isinstance(obj_t, RefType):
                raise TypeCheckError(
                    f"cannot navigate {node.prop!r} on a value of type {obj_t}"
                )
            prop = self.schema.property(obj_t.target, node.prop)
            if prop is None:
                raise UnknownPropertyError(
                    f"type {obj_t.target!r} has no property {node.prop!r}"
                )
            return _kind_to_type(prop.kind, prop.target)

        if isinstance(node, Call):
            return self._check_call(node, env)

        if isinstance(node, Iterate):
            obj_t = self.check(node.obj, env)
            if not isinstance(obj_t, ListType):
                raise TypeCheckError(f"{node.op} requires a collection, got {obj_t}")
            if node.var in env:
                raise TypeCheckError(f"iterator variable {node.var!r} shadows a name")
            inner = dict(env)
            inner[node.var] = obj_t.elem
            body_t = self.check(node.body, inner)
            node.has_temporal = node.obj.has_temporal or node.body.has_temporal
            if node.op in ("forAll", "exists", "select") and body_t is not BOOL:
                raise TypeCheckError(f"{node.op} body must be Boolean, got {body_t}")
            if node.op in ("forAll", "exists"):
                return BOOL
            if node.op == "select":
                return obj_t
            return ListType(body_t)  # collect

        if isinstance(node, Compare):
            lt = self.check(node.left, env)
            rt = self.check(node.right, env)
            node.has_temporal = node.left.has_temporal or node.right.has_temporal
            if node.op in ("=", "<>"):
                if not _eq_comparable(lt, rt):
                    raise TypeCheckError(f"cannot compare {lt} {node.op} {rt}")
            else:
                if not (_numeric(lt) and _numeric(rt)):
                    raise TypeCheckError(
                        f"ordering comparison needs numeric operands, got {lt} and {rt}"
                    )
            return BOOL

        if isinstance(node, BoolOp):
            lt = self.check(node.left, env)
            rt = self.check(node.right, env)
            node.has_temporal = node.left.has_temporal or node.right.has_temporal
            if lt is not BOOL or rt is not BOOL:
                raise TypeCheckError(f"{node.op!r} needs Boolean operands")
            return BOOL

        if isinstance(node, Not):
            t = self.check(node.child, env)
            node.has_temporal = node.child.has_temporal
            if t is not BOOL:
                raise TypeCheckError("'not' needs a Boolean operand")
            return BOOL

        if isinstance(node, TemporalOp):
            for arg in node.args:
                at = self.check(arg, env)
                if at is not BOOL:
                    raise TypeCheckError(
                        f"{node.op!r} argument must be Boolean, got {at}"
                    )
            node.has_temporal = True
            return BOOL

        raise AssertionError(f"unhandled node {node!r}")

    def _check_call(self, node: Call, env: dict[str, object]):
        obj_t = self.check(node.obj, env)
        arg_ts = [self.check(a, env) for a in node.args]
        node.has_temporal = node.obj.has_temporal or any(
            a.has_temporal for a in node.args
        )

        def need_args(n: int) -> None:
            if len(node.args) != n:
                raise ArityError(
                    f"{node.name}() takes {n} argument{'s' if n != 1 else ''},"
                    f" got {len(node.args)}"
                )

        if node.arrow:
            if not isinstance(obj_t, ListType):
                raise TypeCheckError(
                    f"'->{node.name}' requires a collection, got {obj_t}"
                )
            if node.name == "size":
                need_args(0)
                return INT
            if node.name == "isEmpty":
                need_args(0)
                return BOOL
            if node.name == "includes":
                need_args(1)
                if not _eq_comparable(obj_t.elem, arg_ts[0]):
                    raise TypeCheckError(
                        f"includes() argument type {arg_ts[0]} does not match"
                        f" element type {obj_t.elem}"
                    )
                return BOOL
            if node.name == "at":
                need_args(1)
                if arg_ts[0] is not INT:
                    raise TypeCheckError("at() takes an integer index")
                return obj_t.elem
            if node.name == "first":
                need_args(0)
                return obj_t.elem
            raise TypeCheckError(f"unknown collection operation {node.name!r}")

        if node.name == "isDefined":
            need_args(0)
            if isinstance(obj_t, ListType):
                raise TypeCheckError("isDefined() does not apply to collections")
            return BOOL
        if node.name == "size":
            need_args(0)
            if obj_t is not STRING:
                raise TypeCheckError(f".size() applies to strings, got {obj_t}")
            return INT
        if node.name == "contains":
            need_args(1)
            if obj_t is not STRING or arg_ts[0] is not STRING:
                raise TypeCheckError(".contains() applies to strings")
            return BOOL
        raise TypeCheckError(f"unknown builtin {node.name!r}")
