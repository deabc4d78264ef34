"""Constraint language: AST, parser, printer, static checks."""

from .nodes import ConstraintDef, Node
from .parser import (
    parse_constraint_source,
    parse_expression,
    split_constraint_blocks,
)
from .printer import pretty, pretty_constraint
from .typecheck import resolve_constraint, resolve_expression

__all__ = [
    "ConstraintDef",
    "Node",
    "parse_constraint_source",
    "parse_expression",
    "split_constraint_blocks",
    "pretty",
    "pretty_constraint",
    "resolve_constraint",
    "resolve_expression",
]


def parse_constraint(source: str, schema, default_name: str | None = None) -> ConstraintDef:
    """Parse and statically check one constraint against a schema."""
    definition = parse_constraint_source(source, default_name)
    return resolve_constraint(definition, schema)
