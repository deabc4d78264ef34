"""Incremental constraint evaluation over persistent per-instance trees.

Each constraint instance owns an EvalTree holding the state of its temporal
operator nodes across evaluations. One call to evaluate_instance corresponds
to one moment: every non-terminated node is evaluated exactly once, and every
(artifact, property) read is recorded so the scope index can decide which
future change sets are relevant.

Semantics of interest, beyond the per-operator truth table:

* A terminated node returns its frozen value without touching the model, so
  nothing below it contributes to the instance scope.
* `next` activates on its first evaluation: the child is evaluated once for
  its reads (otherwise the operator's clock would never tick) and its temporal
  state is then discarded, anchoring the child's obligations at the following
  moment.
* The trigger operators instantiate a fresh evaluation tree for their second
  argument whenever a new obligation starts; `everytime` may carry several
  outstanding obligations at once, `atLeastOnce` at most one.
* Iterator bodies containing temporal operators get one child tree per bound
  element; elements leaving the collection drop their trees.
* Navigation through a missing artifact records a diagnostic and yields the
  undefined value; comparisons and boolean operations over undefined yield
  false rather than poisoning the verdict.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .graph import ArtifactGraph, Ref
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
from .truth import (
    PERM_FALSE,
    PERM_TRUE,
    TEMP_FALSE,
    TEMP_TRUE,
    AlwaysState,
    AtLeastOnceState,
    EventuallyState,
    EverytimeState,
    NextState,
    OpState,
    TruthValue,
    UntilState,
    combine_and,
    combine_not,
    combine_or,
    combine_xor,
    from_bool,
    step_always,
    step_eventually,
    step_next,
    step_until,
)

Path = tuple[int, ...]


class EvalTree:
    """Temporal operator state for one AST subtree instantiation."""

    __slots__ = ("op_states", "children", "label")

    def __init__(self, label: str = ""):
        self.op_states: dict[Path, OpState] = {}
        self.children: dict[tuple[Path, object], EvalTree] = {}
        self.label = label

    def census(self) -> tuple[int, int, int]:
        """(state records, state Booleans, trees) including nested trees."""
        states = len(self.op_states)
        bools = sum(st.state_bools() for st in self.op_states.values())
        trees = 1
        nested: list[EvalTree] = list(self.children.values())
        for st in self.op_states.values():
            if isinstance(st, AtLeastOnceState) and st.cycle is not None:
                nested.append(st.cycle)  # type: ignore[arg-type]
            elif isinstance(st, EverytimeState):
                nested.extend(st.cycles.values())  # type: ignore[arg-type]
        for sub in nested:
            s, b, t = sub.census()
            states += s
            bools += b
            trees += t
        return states, bools, trees


@dataclass
class EvalContext:
    model: ArtifactGraph
    reads: set[tuple[str, str]] = field(default_factory=set)
    errors: list[str] = field(default_factory=list)
    trace: dict[str, TruthValue] | None = None

    def read(self, artifact_id: str, prop: str) -> object:
        # Record before resolving: a read through a missing artifact still
        # scopes the tuple so a later creation re-triggers evaluation.
        self.reads.add((artifact_id, prop))
        if not self.model.has_artifact(artifact_id):
            self.errors.append(f"dangling reference to {artifact_id!r}")
            return None
        return self.model.read_property(artifact_id, prop)


@dataclass
class Verdict:
    instance_id: str
    constraint: str
    context_id: str
    sequence: int
    value: TruthValue
    reads: set[tuple[str, str]]
    errors: list[str]
    node_results: dict[str, TruthValue] | None = None

    @property
    def terminated(self) -> bool:
        return self.value.permanent


class ConstraintInstance:
    """Stateful evaluation of one constraint for one context artifact."""

    __slots__ = ("id", "definition", "context_id", "tree", "last_verdict", "retired")

    def __init__(self, definition: ConstraintDef, context_id: str):
        self.id = f"{definition.name}@{context_id}"
        self.definition = definition
        self.context_id = context_id
        self.tree = EvalTree()
        self.last_verdict: TruthValue | None = None
        self.retired = False

    @property
    def terminated(self) -> bool:
        return self.last_verdict is not None and self.last_verdict.permanent


def evaluate_instance(
    instance: ConstraintInstance,
    model: ArtifactGraph,
    sequence: int,
    collect_trace: bool = False,
) -> Verdict:
    ctx = EvalContext(model, trace={} if collect_trace else None)
    env = {"self": Ref(instance.context_id)}
    value = eval_bool(instance.definition.root, env, instance.tree, (), ctx)
    instance.last_verdict = value
    return Verdict(
        instance.id,
        instance.definition.name,
        instance.context_id,
        sequence,
        value,
        ctx.reads,
        ctx.errors,
        ctx.trace,
    )


# -- Boolean-position evaluation ----------------------------------------------


def eval_bool(node: Node, env: dict, tree: EvalTree, path: Path, ctx: EvalContext) -> TruthValue:
    if not node.has_temporal:
        return from_bool(eval_value(node, env, tree, path, ctx) is True, True)

    if isinstance(node, TemporalOp):
        return _eval_temporal(node, env, tree, path, ctx)
    if isinstance(node, BoolOp):
        left = eval_bool(node.left, env, tree, path + (0,), ctx)
        right = eval_bool(node.right, env, tree, path + (1,), ctx)
        if node.op == "and":
            return combine_and(left, right)
        if node.op == "or":
            return combine_or(left, right)
        return combine_xor(left, right)
    if isinstance(node, Not):
        return combine_not(eval_bool(node.child, env, tree, path + (0,), ctx))
    if isinstance(node, Compare):
        return _eval_compare_mixed(node, env, tree, path, ctx)
    if isinstance(node, Iterate):
        value = _eval_iterate(node, env, tree, path, ctx)
        # Membership of the collection can change, so the projection of a
        # temporal-bodied iterator is never definitive.
        return from_bool(value is True, False)
    # Calls over temporal-containing subtrees (e.g. select(...)->size() has no
    # Boolean form; anything reaching here is Boolean-typed).
    return from_bool(eval_value(node, env, tree, path, ctx) is True, False)


def _eval_compare_mixed(
    node: Compare, env: dict, tree: EvalTree, path: Path, ctx: EvalContext
) -> TruthValue:
    def side(child: Node, idx: int) -> tuple[object, bool]:
        if child.has_temporal and child.static_type == "bool":
            tv = eval_bool(child, env, tree, path + (idx,), ctx)
            return tv.holds, tv.permanent
        value = eval_value(child, env, tree, path + (idx,), ctx)
        return value, not child.has_temporal

    left, left_perm = side(node.left, 0)
    right, right_perm = side(node.right, 1)
    return from_bool(_compare(node.op, left, right), left_perm and right_perm)


# -- temporal operators --------------------------------------------------------


def _eval_temporal(
    node: TemporalOp, env: dict, tree: EvalTree, path: Path, ctx: EvalContext
) -> TruthValue:
    state = tree.op_states.get(path)
    if state is None:
        state = _STATE_FACTORY[node.op]()
        tree.op_states[path] = state
    if state.final is not None:
        return state.final

    op = node.op
    if op == "next":
        assert isinstance(state, NextState)
        if not state.activated:
            # Seed the scope, then discard any temporal state the probe built:
            # the child's own obligations start at the coming moment.
            scratch = EvalTree(tree.label + _seg(path) + ".probe")
            eval_bool(node.args[0], env, scratch, (), ctx)
            result = step_next(state, None)
        else:
            a = eval_bool(node.args[0], env, tree, path + (0,), ctx)
            result = step_next(state, a)
    elif op == "eventually":
        assert isinstance(state, EventuallyState)
        result = step_eventually(state, eval_bool(node.args[0], env, tree, path + (0,), ctx))
    elif op == "always":
        assert isinstance(state, AlwaysState)
        result = step_always(state, eval_bool(node.args[0], env, tree, path + (0,), ctx))
    elif op == "until":
        assert isinstance(state, UntilState)
        a = eval_bool(node.args[0], env, tree, path + (0,), ctx)
        b = eval_bool(node.args[1], env, tree, path + (1,), ctx)
        result = step_until(state, a, b)
    elif op == "atLeastOnce":
        assert isinstance(state, AtLeastOnceState)
        result = _step_at_least_once(node, env, tree, path, state, ctx)
    else:
        assert isinstance(state, EverytimeState)
        result = _step_everytime(node, env, tree, path, state, ctx)

    if ctx.trace is not None:
        ctx.trace[tree.label + _seg(path)] = result
    return result


def _step_at_least_once(
    node: TemporalOp,
    env: dict,
    tree: EvalTree,
    path: Path,
    state: AtLeastOnceState,
    ctx: EvalContext,
) -> TruthValue:
    a = eval_bool(node.args[0], env, tree, path + (0,), ctx)
    rise = a.holds and not state.last_a
    state.last_a = a.holds
    if rise:
        state.ever_triggered = True
        if state.cycle is None:
            state.cycle_ordinal += 1
            state.cycle = EvalTree(tree.label + _seg(path) + f"#{state.cycle_ordinal}")
    if state.cycle is None:
        # Waiting: optimistic before the first trigger, pessimistic after a
        # missed obligation.
        return TEMP_TRUE if not state.ever_triggered else TEMP_FALSE
    b = eval_bool(node.args[1], env, state.cycle, (), ctx)
    if b is PERM_TRUE:
        state.cycle = None
        return state.terminate(PERM_TRUE)
    if b.holds:
        return TEMP_TRUE
    if rise:
        return TEMP_TRUE  # grace: the obligation may still be met next moment
    if b is PERM_FALSE:
        state.cycle = None  # conclusively missed; wait for the next trigger
    return TEMP_FALSE


def _step_everytime(
    node: TemporalOp,
    env: dict,
    tree: EvalTree,
    path: Path,
    state: EverytimeState,
    ctx: EvalContext,
) -> TruthValue:
    a = eval_bool(node.args[0], env, tree, path + (0,), ctx)
    rise = a.holds and not state.last_a
    state.last_a = a.holds
    spawned: int | None = None
    if rise:
        spawned = state.next_ordinal
        state.next_ordinal += 1
        state.cycles[spawned] = EvalTree(tree.label + _seg(path) + f"#{spawned}")
    any_false = False
    for ordinal in sorted(state.cycles):
        cycle = state.cycles[ordinal]
        b = eval_bool(node.args[1], env, cycle, (), ctx)  # type: ignore[arg-type]
        if b is PERM_TRUE:
            del state.cycles[ordinal]
            continue
        if b is PERM_FALSE and ordinal != spawned:
            # The obligation window (trigger moment or the one after) closed.
            state.cycles.clear()
            return state.terminate(PERM_FALSE)
        if not b.holds:
            any_false = True
    return TEMP_FALSE if any_false else TEMP_TRUE


_STATE_FACTORY = {
    "next": NextState,
    "eventually": EventuallyState,
    "always": AlwaysState,
    "until": UntilState,
    "atLeastOnce": AtLeastOnceState,
    "everytime": EverytimeState,
}


def _seg(path: Path) -> str:
    return "/" + ".".join(map(str, path))


# -- value-position evaluation ---------------------------------------------——


def eval_value(node: Node, env: dict, tree: EvalTree, path: Path, ctx: EvalContext) -> object:
    if isinstance(node, Literal):
        return node.value
    if isinstance(node, SelfRef):
        return env["self"]
    if isinstance(node, VarRef):
        return env[node.name]
    if isinstance(node, Navigate):
        obj = eval_value(node.obj, env, tree, path + (0,), ctx)
        if obj is None:
            return None  # navigation over null yields undefined
        assert isinstance(obj, Ref)
        return ctx.read(obj.target, node.prop)
    if isinstance(node, Call):
        return _eval_call(node, env, tree, path, ctx)
    if isinstance(node, Iterate):
        return _eval_iterate(node, env, tree, path, ctx)
    if isinstance(node, TemporalOp):
        return eval_bool(node, env, tree, path, ctx).holds
    if isinstance(node, Compare):
        if node.has_temporal:
            return _eval_compare_mixed(node, env, tree, path, ctx).holds
        left = eval_value(node.left, env, tree, path + (0,), ctx)
        right = eval_value(node.right, env, tree, path + (1,), ctx)
        return _compare(node.op, left, right)
    if isinstance(node, BoolOp):
        if node.has_temporal:
            return eval_bool(node, env, tree, path, ctx).holds
        left = eval_value(node.left, env, tree, path + (0,), ctx)
        right = eval_value(node.right, env, tree, path + (1,), ctx)
        if left is None or right is None:
            return False  # boolean operation over undefined
        if node.op == "and":
            return bool(left) and bool(right)
        if node.op == "or":
            return bool(left) or bool(right)
        return bool(left) != bool(right)
    if isinstance(node, Not):
        if node.has_temporal:
            return eval_bool(node, env, tree, path, ctx).holds
        child = eval_value(node.child, env, tree, path + (0,), ctx)
        if child is None:
            return False
        return child is not True
    raise AssertionError(f"unhandled node {node!r}")


def _eval_call(node: Call, env: dict, tree: EvalTree, path: Path, ctx: EvalContext) -> object:
    obj = eval_value(node.obj, env, tree, path + (0,), ctx)
    args = [
        eval_value(arg, env, tree, path + (i + 1,), ctx)
        for i, arg in enumerate(node.args)
    ]
    name = node.name
    if not node.arrow:
        if name == "isDefined":
            return obj is not None
        if name == "size":
            return len(obj) if isinstance(obj, str) else None
        # contains
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
        # OCL collections are 1-indexed; out-of-range access is undefined.
        index = args[0]
        if isinstance(index, int) and 1 <= index <= len(items):
            return items[index - 1]
        return None
    # first
    return items[0] if items else None


def _eval_iterate(node: Iterate, env: dict, tree: EvalTree, path: Path, ctx: EvalContext) -> object:
    obj = eval_value(node.obj, env, tree, path + (0,), ctx)
    items = obj if isinstance(obj, list) else []
    boolean_body = node.body.static_type == "bool"
    temporal_body = node.body.has_temporal

    results: list[object] = []
    if temporal_body:
        live: set[tuple[Path, object]] = set()
        cache: dict[object, object] = {}
        for item in items:
            key = _binding_key(item)
            if key in cache:
                results.append(cache[key])
                continue
            tree_key = (path, key)
            subtree = tree.children.get(tree_key)
            if subtree is None:
                subtree = EvalTree(tree.label + _seg(path) + f"[{key}]")
                tree.children[tree_key] = subtree
            live.add(tree_key)
            inner = dict(env)
            inner[node.var] = item
            if boolean_body:
                value: object = eval_bool(node.body, inner, subtree, (), ctx).holds
            else:
                value = eval_value(node.body, inner, subtree, (), ctx)
            cache[key] = value
            results.append(value)
        #

        # Elements gone from the collection take their obligations with them.
        for tree_key in [k for k in tree.children if k[0] == path and k not in live]:
            del tree.children[tree_key]
    else:
        for item in items:
            inner = dict(env)
            inner[node.var] = item
            results.append(eval_value(node.body, inner, tree, path + (1,), ctx))

    if node.op == "forAll":
        return all(r is True for r in results)
    if node.op == "exists":
        return any(r is True for r in results)
    if node.op == "select":
        return [item for item, r in zip(items, results) if r is True]
    return results  # collect


def _binding_key(item: object) -> object:
    if isinstance(item, Ref):
        return item.target
    return ("v", item)


def _compare(op: str, left: object, right: object) -> bool:
    if left is None or right is None:
        return False  # comparison over undefined
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
    if op == ">":
        return left > right
    return left >= right
