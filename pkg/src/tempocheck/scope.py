"""Bidirectional map between (artifact, property) tuples and constraint instances.

An instance's scope is exactly the set of tuples read during its latest
evaluation; a change set is relevant to an instance iff it touches one of
those tuples. Fully terminated instances leave the index entirely but remain
known for reporting.
"""

from __future__ import annotations

from .errors import TempocheckError
from .evaluator import ConstraintInstance

Tuple = tuple[str, str]


class UnknownInstanceError(TempocheckError):
    pass


class ScopeIndex:
    def __init__(self):
        self.tuple_to_instances: dict[Tuple, set[str]] = {}
        self.instance_to_tuples: dict[str, set[Tuple]] = {}
        self.instances: dict[str, ConstraintInstance] = {}

    def register(self, instance: ConstraintInstance) -> None:
        self.instances[instance.id] = instance
        self.instance_to_tuples.setdefault(instance.id, set())

    def update_scope(self, instance_id: str, tuples_read: set[Tuple]) -> None:
        """Replace the instance's scope with the tuples of its latest evaluation."""
        if instance_id not in self.instance_to_tuples:
            raise UnknownInstanceError(f"unknown instance {instance_id!r}")
        old = self.instance_to_tuples[instance_id]
        for t in old - tuples_read:
            bucket = self.tuple_to_instances.get(t)
            if bucket is not None:
                bucket.discard(instance_id)
                if not bucket:
                    del self.tuple_to_instances[t]
        for t in tuples_read - old:
            self.tuple_to_instances.setdefault(t, set()).add(instance_id)
        self.instance_to_tuples[instance_id] = set(tuples_read)

    def select_affected(self, changed: set[Tuple]) -> list[str]:
        """Instances with at least one changed tuple in scope, each once."""
        hit: set[str] = set()
        for t in changed:
            hit.update(self.tuple_to_instances.get(t, ()))
        return sorted(hit)

    def drop(self, instance_id: str) -> None:
        """Remove an instance from the index (terminated or retired); the
        instance object stays known for reporting."""
        if instance_id in self.instance_to_tuples:
            self.update_scope(instance_id, set())
            del self.instance_to_tuples[instance_id]

    def scope_of(self, instance_id: str) -> set[Tuple]:
        return set(self.instance_to_tuples.get(instance_id, ()))

    def indexed_instances(self) -> list[str]:
        return sorted(self.instance_to_tuples)

    def check_consistency(self) -> None:
        """Structural invariant: the two maps are exact inverses."""
        for t, ids in self.tuple_to_instances.items():
            if not ids:
                raise AssertionError(f"empty bucket for {t}")
            for iid in ids:
                if t not in self.instance_to_tuples.get(iid, ()):
                    raise AssertionError(f"{t} -> {iid} missing inverse")
        for iid, tuples in self.instance_to_tuples.items():
            for t in tuples:
                if iid not in self.tuple_to_instances.get(t, ()):
                    raise AssertionError(f"{iid} -> {t} missing forward")
