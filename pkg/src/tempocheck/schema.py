"""Artifact type schema: type definitions, property kinds, validation."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import SchemaError

SCALAR_KINDS = ("bool", "int", "real", "string")
PROPERTY_KINDS = SCALAR_KINDS + ("ref", "list-ref", "list-string")


@dataclass(frozen=True)
class PropertyDef:
    name: str
    kind: str
    target: str | None = None  # target type name, for ref / list-ref

    @property
    def is_list(self) -> bool:
        return self.kind.startswith("list-")


@dataclass
class TypeDef:
    name: str
    properties: dict[str, PropertyDef] = field(default_factory=dict)


class Schema:
    """Immutable-after-construction map of artifact type names to properties."""

    def __init__(self, types: list[TypeDef]):
        self.types: dict[str, TypeDef] = {}
        for t in types:
            if t.name in self.types:
                raise SchemaError(f"duplicate type {t.name!r}")
            self.types[t.name] = t
        for t in types:
            for p in t.properties.values():
                if p.kind not in PROPERTY_KINDS:
                    raise SchemaError(f"{t.name}.{p.name}: unknown kind {p.kind!r}")
                if p.kind in ("ref", "list-ref"):
                    if p.target is None:
                        raise SchemaError(f"{t.name}.{p.name}: ref kind needs a target type")
                    if p.target not in self.types:
                        raise SchemaError(
                            f"{t.name}.{p.name}: target type {p.target!r} not declared"
                        )
                elif p.target is not None:
                    raise SchemaError(f"{t.name}.{p.name}: only ref kinds take a target")

    def has_type(self, name: str) -> bool:
        return name in self.types

    def type(self, name: str) -> TypeDef:
        return self.types[name]

    def property(self, type_name: str, prop: str) -> PropertyDef | None:
        t = self.types.get(type_name)
        if t is None:
            return None
        return t.properties.get(prop)


def make_type(name: str, **props: str | tuple[str, str]) -> TypeDef:
    """Shorthand for tests and generators: make_type('Req', status='string',
    parent=('ref', 'Req'))."""
    out: dict[str, PropertyDef] = {}
    for pname, spec in props.items():
        if isinstance(spec, tuple):
            kind, target = spec
            out[pname] = PropertyDef(pname, kind, target)
        else:
            out[pname] = PropertyDef(pname, spec)
    return TypeDef(name, out)
