"""DECLARE-style pattern library: named templates over the temporal operators.

Each pattern expands purely syntactically: placeholders A and B in the
template are replaced by caller-supplied Boolean condition expressions. The
core set follows the published adaptations verbatim; the remaining patterns
are compositional derivations validated exhaustively against the reference
evaluator (see tests). Derived patterns can be excluded when only the
verbatim set is wanted.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ArityError, UnknownPatternError
from .lang.nodes import (
    BoolOp,
    Call,
    Compare,
    Iterate,
    Navigate,
    Node,
    Not,
    TemporalOp,
    VarRef,
)
from .lang.parser import parse_expression

_VERBATIM: dict[str, tuple[int, str]] = {
    "existence": (1, "eventually(A)"),
    "absence2": (1, "atLeastOnce(A, always(A) or not(atLeastOnce(not(A), A)))"),
    "alternating-precedence": (
        2,
        "until(not(B), A) and everytime(B, always(B) or until(not(B), A))",
    ),
    "alternating-succession": (
        2,
        "everytime(A, eventually(B) and (always(A) or until(not(A), B)))"
        " and until(not(B), A)"
        " and everytime(B, always(B) or until(not(B), A))",
    ),
    "chain-response": (2, "until(not(B), A) and everytime(A, until(A, B))"),
    "chain-precedence": (
        2,
        "everytime(A, always(A or eventually(B)) or not(eventually(B)))"
        " and until(not(B), A)",
    ),
    "chain-succession": (
        2,
        "everytime(A, until(A, B)) and everytime(B, until(B, A))",
    ),
    "negation-succession": (2, "atLeastOnce(A, not(eventually(B)))"),
    "negation-chain-succession": (
        2,
        "everytime(A, not(until(A, B))) and everytime(B, not(until(A, B)))",
    ),
}

# Compositional derivations; episode counting uses nested eventually chains
# because the trigger operators report vacuously true while waiting, which
# would misreport an unfinished count as satisfied.
_DERIVED: dict[str, tuple[int, str]] = {
    "response": (2, "everytime(A, eventually(B))"),
    "precedence": (2, "until(not(B), A)"),
    "succession": (2, "everytime(A, eventually(B)) and until(not(B), A)"),
    "responded-existence": (2, "atLeastOnce(A, eventually(B))"),
    "co-existence": (
        2,
        "atLeastOnce(A, eventually(B)) and atLeastOnce(B, eventually(A))",
    ),
    "existence2": (1, "eventually(A and eventually(not(A) and eventually(A)))"),
    "existence3": (
        1,
        "eventually(A and eventually(not(A) and"
        " eventually(A and eventually(not(A) and eventually(A)))))",
    ),
    "exclusive-choice": (2, "eventually(A) xor eventually(B)"),
    "not-co-existence": (2, "not(eventually(A) and eventually(B))"),
}


@dataclass(frozen=True)
class PatternDef:
    name: str
    arity: int
    template: Node
    derived: bool


def _build_library() -> dict[str, PatternDef]:
    lib: dict[str, PatternDef] = {}
    for table, derived in ((_VERBATIM, False), (_DERIVED, True)):
        for name, (arity, text) in table.items():
            lib[name] = PatternDef(name, arity, parse_expression(text), derived)
    return lib


_LIBRARY = _build_library()


def pattern_names(verbatim_only: bool = False) -> list[str]:
    return sorted(
        name for name, p in _LIBRARY.items() if not (verbatim_only and p.derived)
    )


def get_pattern(name: str, verbatim_only: bool = False) -> PatternDef:
    canonical = name.strip().lower().replace("_", "-").replace(" ", "-")
    pattern = _LIBRARY.get(canonical)
    if pattern is None:
        raise UnknownPatternError(f"unknown pattern {name!r}")
    if verbatim_only and pattern.derived:
        raise UnknownPatternError(
            f"pattern {name!r} is a derived composition, excluded in verbatim-only mode"
        )
    return pattern


def expand_pattern(
    name: str,
    cond_a: Node,
    cond_b: Node | None = None,
    verbatim_only: bool = False,
) -> Node:
    """Substitute the conditions into the named template."""
    pattern = get_pattern(name, verbatim_only)
    given = 1 if cond_b is None else 2
    if given != pattern.arity:
        raise ArityError(
            f"pattern {pattern.name!r} takes {pattern.arity} condition(s), got {given}"
        )
    return _substitute(pattern.template, {"A": cond_a, "B": cond_b})


def expand_pattern_text(
    name: str,
    cond_a: str,
    cond_b: str | None = None,
    verbatim_only: bool = False,
) -> Node:
    return expand_pattern(
        name,
        parse_expression(cond_a),
        parse_expression(cond_b) if cond_b is not None else None,
        verbatim_only,
    )


def _substitute(node: Node, bindings: dict[str, Node | None]) -> Node:
    if isinstance(node, VarRef) and node.name in bindings:
        replacement = bindings[node.name]
        assert replacement is not None
        return replacement
    if isinstance(node, Navigate):
        return Navigate(_substitute(node.obj, bindings), node.prop)
    if isinstance(node, Call):
        return Call(
            _substitute(node.obj, bindings),
            node.name,
            tuple(_substitute(a, bindings) for a in node.args),
            node.arrow,
        )
    if isinstance(node, Iterate):
        return Iterate(
            _substitute(node.obj, bindings), node.op, node.var,
            _substitute(node.body, bindings),
        )
    if isinstance(node, Compare):
        return Compare(
            node.op, _substitute(node.left, bindings), _substitute(node.right, bindings)
        )
    if isinstance(node, BoolOp):
        return BoolOp(
            node.op, _substitute(node.left, bindings), _substitute(node.right, bindings)
        )
    if isinstance(node, Not):
        return Not(_substitute(node.child, bindings))
    if isinstance(node, TemporalOp):
        return TemporalOp(node.op, tuple(_substitute(a, bindings) for a in node.args))
    return node  # literals, self, unrelated vars
