"""Non-incremental reference evaluator used to cross-check the engine.

Replays a full trace of model snapshots. For each constraint instance the
trace is folded from the instance's creation snapshot forward, applying the
operator transition rules directly; no scope index is consulted and no
termination short-circuiting beyond the frozen values the semantics demand.
Relevance is re-derived from first principles at every step: a snapshot is a
moment for an instance iff it is the creation snapshot or the full snapshot
diff intersects the reads observed at the instance's previous evaluation.

The implementation is deliberately a second code path: flat string-keyed
state dictionaries instead of evaluation trees, snapshot dictionaries instead
of the live graph, so an incrementality bug in the engine cannot hide here.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import Ref
from .lang.nodes import (
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
from .truth import PERM_FALSE, PERM_TRUE, TEMP_FALSE, TEMP_TRUE, TruthValue

Snapshot = dict[str, tuple[str, dict[str, object]]]


@dataclass(frozen=True)
class TraceSnapshot:
    sequence: int
    graph: Snapshot


def snapshot_diff(before: Snapshot, after: Snapshot) -> set[tuple[str, str]]:
    """All (artifact, property) pairs whose value differs between snapshots."""
    changed: set[tuple[str, str]] = set()
    for aid, (_, props) in after.items():
        old = before.get(aid)
        if old is None:
            changed.update((aid, p) for p, v in props.items() if v is not None)
            continue
        _, old_props = old
        for p in set(old_props) | set(props):
            if old_props.get(p) != props.get(p):
                changed.add((aid, p))
    for aid, (_, props) in before.items():
        if aid not in after:
            changed.update((aid, p) for p, v in props.items() if v is not None)
    return changed


def oracle_verdicts(
    trace: list[TraceSnapshot],
    definitions: list[ConstraintDef],
    list_properties: dict[str, set[str]],
) -> dict[tuple[str, int], TruthValue]:
    """Verdict of every instance at every snapshot from its creation on.

    list_properties maps type name -> names of list-valued properties (the
    oracle reads raw snapshots and needs to know which unset properties read
    as empty lists).
    """
    if not trace:
        return {}
    verdicts: dict[tuple[str, int], TruthValue] = {}

    # Instance roster: (definition, context id, creation index).
    roster: list[tuple[ConstraintDef, str, int]] = []
    seen: set[str] = set()
    for i, snap in enumerate(trace):
        for aid in sorted(snap.graph):
            if aid in seen:
                continue
            seen.add(aid)
            type_name = snap.graph[aid][0]
            for definition in definitions:
                if definition.context_type == type_name:
                    roster.append((definition, aid, i))

    for definition, context_id, created_at in roster:
        instance_id = f"{definition.name}@{context_id}"
        runner = _InstanceRunner(definition, context_id, list_properties)
        last: TruthValue | None = None
        last_reads: set[tuple[str, str]] = set()
        alive = True
        for i in range(created_at, len(trace)):
            snap = trace[i]
            if alive and context_id not in snap.graph:
                alive = False  # retired: verdict frozen from here on
            if alive and last is not None and not last.permanent:
                diff = snapshot_diff(trace[i - 1].graph, snap.graph)
                is_moment = bool(diff & last_reads)
            else:
                is_moment = alive and last is None
            if is_moment:
                last, last_reads = runner.evaluate(snap.graph)
            if last is not None:
                verdicts[(instance_id, snap.sequence)] = last
    return verdicts


class _InstanceRunner:
    """Folds one instance's evaluation over successive snapshots."""

    def __init__(
        self,
        definition: ConstraintDef,
        context_id: str,
        list_properties: dict[str, set[str]],
    ):
        self.root = definition.root
        self.context_id = context_id
        self.list_properties = list_properties
        self.state: dict[str, dict] = {}

    def evaluate(self, graph: Snapshot) -> tuple[TruthValue, set[tuple[str, str]]]:
        self.graph = graph
        self.reads: set[tuple[str, str]] = set()
        tv = self._bool(self.root, {"self": Ref(self.context_id)}, "r")
        return tv, self.reads

    # -- model access ----------------------------------------------------------

    def _read(self, aid: str, prop: str) -> object:
        self.reads.add((aid, prop))
        entry = self.graph.get(aid)
        if entry is None:
            return None
        type_name, props = entry
        value = props.get(prop)
        if value is None and prop in self.list_properties.get(type_name, ()):
            return []
        return value

    # -- state plumbing ----------------------------------------------------------

    def _node_state(self, key: str) -> dict:
        st = self.state.get(key)
        if st is None:
            st = {}
            self.state[key] = st
        return st

    def _drop_prefix(self, prefix: str) -> None:
        for k in [k for k in self.state if k.startswith(prefix)]:
            del self.state[k]

    # -- Boolean-position evaluation ---------------------------------------------

    def _bool(self, node: Node, env: dict, key: str) -> TruthValue:
        if not node.has_temporal:
            return _tv(self._value(node, env, key) is True, True)
        if isinstance(node, TemporalOp):
            return self._temporal(node, env, key)
        if isinstance(node, BoolOp):
            lt = self._bool(node.left, env, key + ".0")
            rt = self._bool(node.right, env, key + ".1")
            lv, rv = lt.holds, rt.holds
            if node.op == "and":
                value = lv and rv
                perm = (lt.permanent and rt.permanent) if value else any(
                    not t.holds and t.permanent for t in (lt, rt)
                )
            elif node.op == "or":
                value = lv or rv
                perm = any(t.holds and t.permanent for t in (lt, rt)) if value else (
                    lt.permanent and rt.permanent
                )
            else:
                value = lv != rv
                perm = lt.permanent and rt.permanent
            return _tv(value, perm)
        if isinstance(node, Not):
            inner = self._bool(node.child, env, key + ".0")
            return _tv(not inner.holds, inner.permanent)
        if isinstance(node, Compare):
            sides = []
            for idx, child in enumerate((node.left, node.right)):
                if child.has_temporal and child.static_type == "bool":
                    tv = self._bool(child, env, key + f".{idx}")
                    sides.append((tv.holds, tv.permanent))
                else:
                    sides.append(
                        (self._value(child, env, key + f".{idx}"), not child.has_temporal)
                    )
            value = _cmp(node.op, sides[0][0], sides[1][0])
            return _tv(value, sides[0][1] and sides[1][1])
        if isinstance(node, Iterate):
            return _tv(self._value(node, env, key) is True, False)
        return _tv(self._value(node, env, key) is True, False)

    # -- temporal operators ---------------------------------------------------------

    def _temporal(self, node: TemporalOp, env: dict, key: str) -> TruthValue:
        st = self._node_state(key)
        if st.get("final") is not None:
            return st["final"]
        op = node.op

        if op == "next":
            if not st.get("activated"):
                st["activated"] = True
                probe = key + "?"
                self._bool(node.args[0], env, probe + ".0")
                self._drop_prefix(probe)
                return TEMP_FALSE
            a = self._bool(node.args[0], env, key + ".0")
            if a.permanent:
                st["final"] = a
            return a

        if op == "eventually":
            a = self._bool(node.args[0], env, key + ".0")
            if a is PERM_TRUE:
                st["final"] = PERM_TRUE
                return PERM_TRUE
            return TEMP_TRUE if a is TEMP_TRUE else TEMP_FALSE

        if op == "always":
            a = self._bool(node.args[0], env, key + ".0")
            if a.holds:
                st["last_a"] = True
                return TEMP_TRUE
            st["final"] = PERM_FALSE
            return PERM_FALSE

        if op == "until":
            a = self._bool(node.args[0], env, key + ".0")
            b = self._bool(node.args[1], env, key + ".1")
            if b is PERM_TRUE:
                st["final"] = PERM_TRUE
                return PERM_TRUE
            if b is TEMP_TRUE:
                return TEMP_TRUE
            if a.holds:
                return TEMP_FALSE
            st["final"] = PERM_FALSE
            return PERM_FALSE

        if op == "atLeastOnce":
            a = self._bool(node.args[0], env, key + ".0")
            rise = a.holds and not st.get("last_a", False)
            st["last_a"] = a.holds
            if rise:
                st["ever"] = True
                if st.get("cycle") is None:
                    st["ord"] = st.get("ord", 0) + 1
                    st["cycle"] = st["ord"]
            if st.get("cycle") is None:
                return TEMP_TRUE if not st.get("ever") else TEMP_FALSE
            cycle_key = f"{key}!{st['cycle']}"
            b = self._bool(node.args[1], env, cycle_key + ".1")
            if b is PERM_TRUE:
                st["cycle"] = None
                st["final"] = PERM_TRUE
                return PERM_TRUE
            if b.holds:
                return TEMP_TRUE
            if rise:
                return TEMP_TRUE
            if b is PERM_FALSE:
                self._drop_prefix(cycle_key + ".")
                st["cycle"] = None
            return TEMP_FALSE

        # everytime
        a = self._bool(node.args[0], env, key + ".0")
        rise = a.holds and not st.get("last_a", False)
        st["last_a"] = a.holds
        cycles: list[int] = st.setdefault("cycles", [])
        spawned = None
        if rise:
            spawned = st.get("ord", 0)
            st["ord"] = spawned + 1
            cycles.append(spawned)
        any_false = False
        for ordinal in list(cycles):
            b = self._bool(node.args[1], env, f"{key}!{ordinal}.1")
            if b is PERM_TRUE:
                cycles.remove(ordinal)
                self._drop_prefix(f"{key}!{ordinal}.")
                continue
            if b is PERM_FALSE and ordinal != spawned:
                st["final"] = PERM_FALSE
                return PERM_FALSE
            if not b.holds:
                any_false = True
        return TEMP_FALSE if any_false else TEMP_TRUE

    # -- value-position evaluation ----------------------------------------------

    def _value(self, node: Node, env: dict, key: str) -> object:
        if isinstance(node, Literal):
            return node.value
        if isinstance(node, SelfRef):
            return env["self"]
        if isinstance(node, VarRef):
            return env[node.name]
        if isinstance(node, Navigate):
            obj = self._value(node.obj, env, key + ".0")
            if obj is None:
                return None
            assert isinstance(obj, Ref)
            return self._read(obj.target, node.prop)
        if isinstance(node, Call):
            return self._call(node, env, key)
        if isinstance(node, Iterate):
            return self._iterate(node, env, key)
        if isinstance(node, TemporalOp):
            return self._bool(node, env, key).holds
        if isinstance(node, Compare):
            if node.has_temporal:
                return self._bool(node, env, key).holds
            left = self._value(node.left, env, key + ".0")
            right = self._value(node.right, env, key + ".1")
            return _cmp(node.op, left, right)
        if isinstance(node, BoolOp):
            if node.has_temporal:
                return self._bool(node, env, key).holds
            left = self._value(node.left, env, key + ".0")
            right = self._value(node.right, env, key + ".1")
            if left is None or right is None:
                return False
            if node.op == "and":
                return bool(left) and bool(right)
            if node.op == "or":
                return bool(left) or bool(right)
            return bool(left) != bool(right)
        if isinstance(node, Not):
            if node.has_temporal:
                return self._bool(node, env, key).holds
            child = self._value(node.child, env, key + ".0")
            if child is None:
                return False
            return child is not True
        raise AssertionError(f"unhandled node {node!r}")

    def _call(self, node: Call, env: dict, key: str) -> object:
        obj = self._value(node.obj, env, key + ".0")
        args = [
            self._value(arg, env, key + f".{i + 1}") for i, arg in enumerate(node.args)
        ]
        name = node.name
        if not node.arrow:
            if name == "isDefined":
                return obj is not None
            if name == "size":
                return len(obj) if isinstance(obj, str) else None
            if obj is None or args[0] is None:
                return False
            return str(args[0]) in str(obj)
        items = obj if isinstance(obj, list) else []
        if name == "size":
            return len(items)
        if name == "isEmpty":
            return not items
        if name == "includes":
            return args[0] is not None and args[0] in items
        if name == "at":
            index = args[0]
            if isinstance(index, int) and 1 <= index <= len(items):
                return items[index - 1]
            return None
        return items[0] if items else None

    def _iterate(self, node: Iterate, env: dict, key: str) -> object:
        obj = self._value(node.obj, env, key + ".0")
        items = obj if isinstance(obj, list) else []
        boolean_body = node.body.static_type == "bool"

        results: list[object] = []
        if node.body.has_temporal:
            live: set[str] = set()
            cache: dict[str, object] = {}
            for item in items:
                binding = item.target if isinstance(item, Ref) else f"={item!r}"
                if binding in cache:
                    results.append(cache[binding])
                    continue
                body_key = f"{key}[{binding}]"
                live.add(body_key)
                inner = dict(env)
                inner[node.var] = item
                if boolean_body:
                    value: object = self._bool(node.body, inner, body_key).holds
                else:
                    value = self._value(node.body, inner, body_key)
                cache[binding] = value
                results.append(value)
            # Obligations of elements no longer in the collection are dropped.
            prefix = key + "["
            for k in [k for k in self.state if k.startswith(prefix)]:
                if not any(k.startswith(b) for b in live):
                    del self.state[k]
        else:
            for item in items:
                inner = dict(env)
                inner[node.var] = item
                results.append(self._value(node.body, inner, key + ".1"))

        if node.op == "forAll":
            return all(r is True for r in results)
        if node.op == "exists":
            return any(r is True for r in results)
        if node.op == "select":
            return [item for item, r in zip(items, results) if r is True]
        return results


def _tv(value: bool, permanent: bool) -> TruthValue:
    if value:
        return PERM_TRUE if permanent else TEMP_TRUE
    return PERM_FALSE if permanent else TEMP_FALSE


def _cmp(op: str, left: object, right: object) -> bool:
    if left is None or right is None:
        return False
    if op == "=":
        return left == right
    if op == "<>":
        return left != right
    if not isinstance(left, (int, float)) or not isinstance(right, (int, float)):
        return False
    if op == "<":
        return left < right
    if op == "<=":
        return left <= right
    return left > right if op == ">" else left >= right
