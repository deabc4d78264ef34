"""Loading and saving of the on-disk formats.

Schema (JSON):      {"types": [{"name", "properties": [{"name", "kind", "target"?}]}]}
Artifact dump:      [{"id", "type", "properties": {...}}]
Change log (JSONL): {"seq", "ts", "op", "artifact", "type"?, "property"?, "value"?}
Constraints (text): `context T inv name: expr` blocks separated by blank lines,
                    `--` line comments.

Reference values are carried as plain id strings in JSON and wrapped into Ref
on load, guided by the schema's property kinds.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import TempocheckError
from .graph import Artifact, Change, ChangeSet, Ref
from .lang import parse_constraint_source, resolve_constraint, split_constraint_blocks
from .lang.nodes import ConstraintDef
from .schema import PropertyDef, Schema, TypeDef


class FormatError(TempocheckError):
    """Input file does not match its documented format."""


_OP_NAMES = {
    "create": "createArtifact",
    "delete": "deleteArtifact",
    "set": "setProperty",
    "add": "addToList",
    "remove": "removeFromList",
}


def load_schema(path: str | Path) -> Schema:
    data = _load_json(path)
    if not isinstance(data, dict) or not isinstance(data.get("types"), list):
        raise FormatError(f"{path}: schema file must be an object with a 'types' array")
    types = []
    for i, raw in enumerate(data["types"]):
        name = raw.get("name")
        if not isinstance(name, str):
            raise FormatError(f"{path}: types[{i}] has no name")
        props = {}
        for j, p in enumerate(raw.get("properties", [])):
            pname, kind = p.get("name"), p.get("kind")
            if not isinstance(pname, str) or not isinstance(kind, str):
                raise FormatError(f"{path}: {name}.properties[{j}] needs name and kind")
            props[pname] = PropertyDef(pname, kind, p.get("target"))
        types.append(TypeDef(name, props))
    return Schema(types)


def save_schema(schema: Schema, path: str | Path) -> None:
    data = {
        "types": [
            {
                "name": t.name,
                "properties": [
                    {"name": p.name, "kind": p.kind}
                    | ({"target": p.target} if p.target else {})
                    for p in t.properties.values()
                ],
            }
            for t in schema.types.values()
        ]
    }
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def load_artifacts(path: str | Path, schema: Schema) -> list[Artifact]:
    data = _load_json(path)
    if not isinstance(data, list):
        raise FormatError(f"{path}: artifact dump must be a JSON array")
    out = []
    for i, raw in enumerate(data):
        aid, type_name = raw.get("id"), raw.get("type")
        if not isinstance(aid, str) or not isinstance(type_name, str):
            raise FormatError(f"{path}: artifacts[{i}] needs string 'id' and 'type'")
        if not schema.has_type(type_name):
            raise FormatError(f"{path}: artifacts[{i}]: unknown type {type_name!r}")
        props = raw.get("properties", {})
        if not isinstance(props, dict):
            raise FormatError(f"{path}: artifacts[{i}]: properties must be an object")
        decoded = {
            p: _decode_value(schema, type_name, p, v, f"{path}: artifacts[{i}]")
            for p, v in props.items()
        }
        out.append(Artifact(aid, type_name, {p: v for p, v in decoded.items() if v is not None}))
    return out


def save_artifacts(artifacts: list[Artifact], path: str | Path) -> None:
    data = [
        {"id": a.id, "type": a.type_name, "properties": _encode_props(a.properties)}
        for a in artifacts
    ]
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def load_change_log(path: str | Path, schema: Schema) -> list[dict]:
    """Raw change records, ordered as on disk. Each: seq, ts, Change."""
    records = []
    text = Path(path).read_text()
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        where = f"{path}:{lineno}"
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{where}: bad JSON: {exc}") from None
        try:
            seq = int(raw["seq"])
            ts = str(raw.get("ts", ""))
            op = _OP_NAMES[raw["op"]]
            aid = str(raw["artifact"])
        except (KeyError, TypeError, ValueError):
            raise FormatError(f"{where}: record needs seq, op, artifact") from None
        type_name = raw.get("type")
        prop = raw.get("property")
        value = raw.get("value")
        if op == "createArtifact":
            if not isinstance(type_name, str) or not schema.has_type(type_name):
                raise FormatError(f"{where}: create needs a known 'type'")
            props = value or {}
            if not isinstance(props, dict):
                raise FormatError(f"{where}: create value must be a property map")
            decoded = {
                p: _decode_value(schema, type_name, p, v, where) for p, v in props.items()
            }
            change = Change(op, aid, type_name=type_name,
                            value={p: v for p, v in decoded.items() if v is not None})
        elif op == "deleteArtifact":
            change = Change(op, aid)
        else:
            if not isinstance(prop, str):
                raise FormatError(f"{where}: {raw['op']} needs a 'property'")
            target_type = _artifact_type_hint(raw, where)
            change = Change(op, aid, prop=prop,
                            value=_decode_change_value(schema, target_type, prop, op, value, where))
        records.append({"seq": seq, "ts": ts, "change": change, "line": lineno})
    return records


def _artifact_type_hint(raw: dict, where: str) -> str | None:
    t = raw.get("type")
    return t if isinstance(t, str) else None


def save_change_log(records: list[dict], path: str | Path) -> None:
    lines = []
    for rec in records:
        change: Change = rec["change"]
        out: dict = {"seq": rec["seq"], "ts": rec["ts"]}
        rev = {v: k for k, v in _OP_NAMES.items()}
        out["op"] = rev[change.op]
        out["artifact"] = change.artifact_id
        if change.op == "createArtifact":
            out["type"] = change.type_name
            out["value"] = _encode_props(change.value or {})
        elif change.op != "deleteArtifact":
            out["property"] = change.prop
            out["value"] = _encode_value(change.value)
        lines.append(json.dumps(out, sort_keys=True))
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))


def load_constraints(path: str | Path, schema: Schema) -> list[ConstraintDef]:
    text = Path(path).read_text()
    defs: list[ConstraintDef] = []
    names = set()
    for index, (lineno, block) in enumerate(split_constraint_blocks(text), start=1):
        try:
            definition = parse_constraint_source(block, default_name=f"c{index}")
            resolve_constraint(definition, schema)
        except TempocheckError as exc:
            raise FormatError(f"{path}:{lineno}: {exc}") from None
        if definition.name in names:
            raise FormatError(f"{path}:{lineno}: duplicate constraint name {definition.name!r}")
        names.add(definition.name)
        defs.append(definition)
    return defs


# -- value coding ----------------------------------------------------------------


def _decode_value(schema: Schema, type_name: str, prop: str, value, where: str):
    pd = schema.property(type_name, prop)
    if pd is None:
        raise FormatError(f"{where}: type {type_name!r} has no property {prop!r}")
    if value is None:
        return None
    if pd.kind == "ref":
        if not isinstance(value, str):
            raise FormatError(f"{where}: {prop} expects an id string")
        return Ref(value)
    if pd.kind == "list-ref":
        if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
            raise FormatError(f"{where}: {prop} expects an array of id strings")
        return [Ref(v) for v in value]
    if pd.kind == "list-string":
        if not isinstance(value, list):
            raise FormatError(f"{where}: {prop} expects an array of strings")
        return list(value)
    return value


def _decode_change_value(schema: Schema, type_hint: str | None, prop: str, op: str, value, where: str):
    """Change records may omit the artifact type; infer the ref-ness of the
    property from any type declaring it (property kinds must then agree)."""
    kinds = set()
    if type_hint is not None:
        pd = schema.property(type_hint, prop)
        if pd is None:
            raise FormatError(f"{where}: type {type_hint!r} has no property {prop!r}")
        kinds = {(pd.kind, pd.target)}
    else:
        for t in schema.types.values():
            pd = t.properties.get(prop)
            if pd is not None:
                kinds.add((pd.kind, pd.target))
    if not kinds:
        raise FormatError(f"{where}: no type declares property {prop!r}")
    if len({k for k, _ in kinds}) > 1:
        raise FormatError(
            f"{where}: property {prop!r} is ambiguous across types; add a 'type' field"
        )
    kind = next(iter(kinds))[0]
    if value is None:
        return None
    if op in ("addToList", "removeFromList"):
        if kind == "list-ref":
            if not isinstance(value, str):
                raise FormatError(f"{where}: {prop} element expects an id string")
            return Ref(value)
        return value
    if kind == "ref":
        if not isinstance(value, str):
            raise FormatError(f"{where}: {prop} expects an id string")
        return Ref(value)
    if kind == "list-ref":
        if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
            raise FormatError(f"{where}: {prop} expects an array of id strings")
        return [Ref(v) for v in value]
    return value


def _encode_value(value):
    if isinstance(value, Ref):
        return value.target
    if isinstance(value, list):
        return [_encode_value(v) for v in value]
    return value


def _encode_props(props: dict) -> dict:
    return {p: _encode_value(v) for p, v in sorted(props.items())}


def _load_json(path: str | Path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: bad JSON: {exc}") from None
    except OSError as exc:
        raise FormatError(f"{path}: {exc}") from None
