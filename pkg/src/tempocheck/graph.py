"""In-memory artifact graph and atomic change-set application.

Values are plain Python objects: None (unset), bool, int, float, str, Ref,
or list thereof. Change sets are validated up front and applied atomically;
the returned ChangedTuples is exactly the before/after snapshot diff, so a
write that rewrites an identical value does not count as a change.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    ChangeSetError,
    StaleSequenceError,
    UnknownArtifactError,
)
from .schema import PropertyDef, Schema


@dataclass(frozen=True)
class Ref:
    """Reference to an artifact by id."""

    target: str

    def __repr__(self) -> str:
        return f"Ref({self.target!r})"


@dataclass
class Artifact:
    id: str
    type_name: str
    properties: dict[str, object] = field(default_factory=dict)


@dataclass(frozen=True)
class Change:
    op: str  # createArtifact | deleteArtifact | setProperty | addToList | removeFromList
    artifact_id: str
    type_name: str | None = None  # createArtifact only
    prop: str | None = None
    value: object = None


@dataclass(frozen=True)
class ChangeSet:
    sequence: int
    timestamp: str
    changes: tuple[Change, ...]


@dataclass
class ChangedTuples:
    """Result of applying a change set: value-level diff plus lifecycle info."""

    changed: set[tuple[str, str]] = field(default_factory=set)
    created: list[str] = field(default_factory=list)
    deleted: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return bool(self.changed or self.created or self.deleted)


def create(artifact_id: str, type_name: str, properties: dict | None = None) -> Change:
    return Change("createArtifact", artifact_id, type_name=type_name, value=properties or {})


def delete(artifact_id: str) -> Change:
    return Change("deleteArtifact", artifact_id)


def set_prop(artifact_id: str, prop: str, value: object) -> Change:
    return Change("setProperty", artifact_id, prop=prop, value=value)


def add_to_list(artifact_id: str, prop: str, value: object) -> Change:
    return Change("addToList", artifact_id, prop=prop, value=value)


def remove_from_list(artifact_id: str, prop: str, value: object) -> Change:
    return Change("removeFromList", artifact_id, prop=prop, value=value)


class ArtifactGraph:
    """Single-writer artifact store keyed by id."""

    def __init__(self, schema: Schema):
        self.schema = schema
        self.artifacts: dict[str, Artifact] = {}
        self.last_sequence: int | None = None

    # -- reads ---------------------------------------------------------------

    def has_artifact(self, artifact_id: str) -> bool:
        return artifact_id in self.artifacts

    def artifact(self, artifact_id: str) -> Artifact:
        try:
            return self.artifacts[artifact_id]
        except KeyError:
            raise UnknownArtifactError(f"unknown artifact {artifact_id!r}") from None

    def read_property(self, artifact_id: str, prop: str) -> object:
        """Current value, None when unset; list properties read as []."""
        art = self.artifact(artifact_id)
        pd = self._property_def(art.type_name, prop)
        value = art.properties.get(prop)
        if value is None and pd.is_list:
            return []
        return value

    def snapshot(self) -> dict[str, tuple[str, dict[str, object]]]:
        """Deep-enough copy for diffing and the oracle (lists copied)."""
        return {
            aid: (
                art.type_name,
                {p: (list(v) if isinstance(v, list) else v) for p, v in art.properties.items()},
            )
            for aid, art in self.artifacts.items()
        }

    # -- change sets ----------------------------------------------------------

    def apply_change_set(self, cs: ChangeSet) -> ChangedTuples:
        if self.last_sequence is not None and cs.sequence <= self.last_sequence:
            raise StaleSequenceError(
                f"change set sequence {cs.sequence} does not advance past {self.last_sequence}"
            )
        self._validate(cs)
        result = ChangedTuples()
        for change in cs.changes:
            self._apply(change, result)
        self.last_sequence = cs.sequence
        return result

    def bootstrap(self, artifacts: list[Artifact]) -> None:
        """Install initial artifacts without running them through a change set."""
        for art in artifacts:
            if art.id in self.artifacts:
                raise ChangeSetError(f"duplicate artifact id {art.id!r} in initial dump")
            for prop, value in art.properties.items():
                pd = self._property_def(art.type_name, prop)
                self._check_value(pd, value, art.id)
            self.artifacts[art.id] = art

    # -- internals -----------------------------------------------------------

    def _property_def(self, type_name: str, prop: str) -> PropertyDef:
        pd = self.schema.property(type_name, prop)
        if pd is None:
            raise ChangeSetError(f"type {type_name!r} has no property {prop!r}")
        return pd

    def _validate(self, cs: ChangeSet) -> None:
        """Two-phase application: reject the whole set before touching state."""
        touched: set[tuple[str, str]] = set()
        pending_create: dict[str, str] = {}
        pending_delete: set[str] = set()

        def type_of(aid: str) -> str:
            if aid in pending_create:
                return pending_create[aid]
            return self.artifact(aid).type_name

        def current_list(aid: str, prop: str) -> list:
            if aid in pending_create:
                for c in cs.changes:
                    if c.op == "createArtifact" and c.artifact_id == aid:
                        value = (c.value or {}).get(prop)
                        return list(value) if isinstance(value, list) else []
            value = self.artifacts[aid].properties.get(prop)
            return list(value) if isinstance(value, list) else []

        def touch(aid: str, prop: str) -> None:
            key = (aid, prop)
            if key in touched:
                raise ChangeSetError(
                    f"change set {cs.sequence} touches {aid}.{prop} more than once"
                )
            touched.add(key)

        for change in cs.changes:
            aid = change.artifact_id
            if change.op == "createArtifact":
                if self.has_artifact(aid) or aid in pending_create:
                    raise ChangeSetError(f"artifact {aid!r} already exists")
                if change.type_name is None or not self.schema.has_type(change.type_name):
                    raise ChangeSetError(
                        f"create {aid!r}: unknown type {change.type_name!r}"
                    )
                props = change.value or {}
                if not isinstance(props, dict):
                    raise ChangeSetError(f"create {aid!r}: initial properties must be a map")
                for prop, value in props.items():
                    pd = self._property_def(change.type_name, prop)
                    self._check_value(pd, value, aid)
                    touch(aid, prop)
                pending_create[aid] = change.type_name
            elif change.op == "deleteArtifact":
                if aid in pending_delete:
                    raise ChangeSetError(f"artifact {aid!r} deleted twice")
                if aid not in pending_create:
                    self.artifact(aid)
                pending_delete.add(aid)
            elif change.op in ("setProperty", "addToList", "removeFromList"):
                if aid in pending_delete:
                    raise ChangeSetError(f"change to deleted artifact {aid!r}")
                pd = self._property_def(type_of(aid), change.prop or "")
                if change.op == "setProperty":
                    self._check_value(pd, change.value, aid)
                else:
                    if not pd.is_list:
                        raise ChangeSetError(
                            f"{aid}.{change.prop} is not a list property"
                        )
                    self._check_element(pd, change.value, aid)
                    if change.op == "removeFromList" and change.value not in current_list(
                        aid, change.prop or ""
                    ):
                        raise ChangeSetError(
                            f"removeFromList: {change.value!r} not in {aid}.{change.prop}"
                        )
                touch(aid, change.prop or "")
            else:
                raise ChangeSetError(f"unknown change op {change.op!r}")

    def _apply(self, change: Change, result: ChangedTuples) -> None:
        aid = change.artifact_id
        if change.op == "createArtifact":
            props = dict(change.value or {})
            self.artifacts[aid] = Artifact(aid, change.type_name or "", props)
            result.created.append(aid)
            for prop, value in props.items():
                if value is not None:
                    result.changed.add((aid, prop))
            return
        if change.op == "deleteArtifact":
            art = self.artifacts.pop(aid)
            result.deleted.append(aid)
            for prop, value in art.properties.items():
                if value is not None:
                    result.changed.add((aid, prop))
            return
        art = self.artifacts[aid]
        prop = change.prop or ""
        if change.op == "setProperty":
            old = art.properties.get(prop)
            if old != change.value:
                result.changed.add((aid, prop))
            if change.value is None:
                art.properties.pop(prop, None)
            else:
                art.properties[prop] = change.value
            return
        current = art.properties.get(prop)
        items = list(current) if isinstance(current, list) else []
        if change.op == "addToList":
            items.append(change.value)
            art.properties[prop] = items
            result.changed.add((aid, prop))
            return
        # removeFromList: drop the first matching element.
        try:
            items.remove(change.value)
        except ValueError:
            raise ChangeSetError(
                f"removeFromList: {change.value!r} not in {aid}.{prop}"
            ) from None
        art.properties[prop] = items
        result.changed.add((aid, prop))

    def _check_value(self, pd: PropertyDef, value: object, aid: str) -> None:
        if value is None:
            return
        label = f"{aid}.{pd.name}"
        if pd.kind == "bool":
            if not isinstance(value, bool):
                raise ChangeSetError(f"{label}: expected bool, got {value!r}")
        elif pd.kind == "int":
            if isinstance(value, bool) or not isinstance(value, int):
                raise ChangeSetError(f"{label}: expected int, got {value!r}")
        elif pd.kind == "real":
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ChangeSetError(f"{label}: expected real, got {value!r}")
        elif pd.kind == "string":
            if not isinstance(value, str):
                raise ChangeSetError(f"{label}: expected string, got {value!r}")
        elif pd.kind == "ref":
            self._check_ref(pd, value, label)
        elif pd.kind in ("list-ref", "list-string"):
            if not isinstance(value, list):
                raise ChangeSetError(f"{label}: expected list, got {value!r}")
            for item in value:
                self._check_element(pd, item, aid)

    def _check_element(self, pd: PropertyDef, value: object, aid: str) -> None:
        label = f"{aid}.{pd.name}"
        if pd.kind == "list-ref":
            self._check_ref(pd, value, label)
        elif pd.kind == "list-string":
            if not isinstance(value, str):
                raise ChangeSetError(f"{label}: expected string element, got {value!r}")

    def _check_ref(self, pd: PropertyDef, value: object, label: str) -> None:
        if not isinstance(value, Ref):
            raise ChangeSetError(f"{label}: expected a reference, got {value!r}")
        # Dangling targets are tolerated (data may be temporarily inconsistent),
        # but a resolvable target must have the declared type.
        target = self.artifacts.get(value.target)
        if target is not None and pd.target is not None and target.type_name != pd.target:
            raise ChangeSetError(
                f"{label}: expects a {pd.target}, {value.target!r} is a {target.type_name}"
            )
