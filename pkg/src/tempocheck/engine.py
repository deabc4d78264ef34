"""The incremental checking engine: change application, instance lifecycle,
relevance-filtered re-evaluation.

Per change set: apply atomically, retire instances of deleted artifacts,
create and seed instances for created context artifacts, then re-evaluate
exactly the affected instances (each at most once). Instances whose root
verdict turns permanent leave the scope index for good.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .evaluator import ConstraintInstance, Verdict, evaluate_instance
from .graph import ArtifactGraph, ChangeSet
from .lang.nodes import ConstraintDef
from .scope import ScopeIndex


@dataclass
class EngineStats:
    change_sets: int = 0
    trigger_sets: int = 0  # change sets causing >= 1 evaluation
    evaluations: int = 0
    eval_seconds: float = 0.0
    reads: int = 0

    def snapshot(self) -> "EngineStats":
        return EngineStats(
            self.change_sets, self.trigger_sets, self.evaluations, self.eval_seconds, self.reads
        )


@dataclass
class ApplyResult:
    sequence: int
    verdicts: list[Verdict] = field(default_factory=list)
    created_instances: list[str] = field(default_factory=list)
    retired_instances: list[str] = field(default_factory=list)


class CheckEngine:
    def __init__(
        self,
        graph: ArtifactGraph,
        definitions: list[ConstraintDef],
        collect_trace: bool = False,
    ):
        self.graph = graph
        self.definitions = list(definitions)
        self.index = ScopeIndex()
        self.stats = EngineStats()
        self.collect_trace = collect_trace
        self._defs_by_context: dict[str, list[ConstraintDef]] = {}
        for d in self.definitions:
            self._defs_by_context.setdefault(d.context_type, []).append(d)

    # -- lifecycle -------------------------------------------------------------

    def bootstrap(self, sequence: int = 0) -> list[Verdict]:
        """Create and seed instances for all artifacts already in the graph."""
        verdicts: list[Verdict] = []
        for aid in sorted(self.graph.artifacts):
            verdicts.extend(self._create_instances_for(aid, sequence))
        return verdicts

    def apply_change_set(self, cs: ChangeSet) -> ApplyResult:
        changed = self.graph.apply_change_set(cs)
        result = ApplyResult(cs.sequence)
        self.stats.change_sets += 1

        for aid in changed.deleted:
            for inst in self._instances_of_context(aid):
                inst.retired = True
                self.index.drop(inst.id)
                result.retired_instances.append(inst.id)

        evaluated: set[str] = set()
        for aid in changed.created:
            for verdict in self._create_instances_for(aid, cs.sequence):
                result.verdicts.append(verdict)
                evaluated.add(verdict.instance_id)
                result.created_instances.append(verdict.instance_id)

        for instance_id in self.index.select_affected(changed.changed):
            if instance_id in evaluated:
                continue  # once per change set
            instance = self.index.instances[instance_id]
            if instance.retired:
                continue
            result.verdicts.append(self._evaluate(instance, cs.sequence))

        if result.verdicts:
            self.stats.trigger_sets += 1
        result.verdicts.sort(key=lambda v: v.instance_id)
        return result

    # -- queries ----------------------------------------------------------------

    def all_instances(self) -> list[ConstraintInstance]:
        return [self.index.instances[k] for k in sorted(self.index.instances)]

    def state_census(self) -> dict[str, int]:
        """Memory accounting over all live instance trees."""
        states = bools = trees = 0
        for inst in self.index.instances.values():
            s, b, t = inst.tree.census()
            states += s
            bools += b
            trees += t
        return {
            "instances": len(self.index.instances),
            "op_states": states,
            "state_bools": bools,
            "trees": trees,
        }

    # -- internals ---------------------------------------------------------------

    def _instances_of_context(self, artifact_id: str) -> list[ConstraintInstance]:
        return [
            inst
            for inst in self.index.instances.values()
            if inst.context_id == artifact_id and not inst.retired
        ]

    def _create_instances_for(self, artifact_id: str, sequence: int) -> list[Verdict]:
        art = self.graph.artifacts.get(artifact_id)
        if art is None:
            return []
        verdicts = []
        for definition in self._defs_by_context.get(art.type_name, ()):
            instance = ConstraintInstance(definition, artifact_id)
            self.index.register(instance)
            verdicts.append(self._evaluate(instance, sequence))
        return verdicts

    def _evaluate(self, instance: ConstraintInstance, sequence: int) -> Verdict:
        start = time.perf_counter()
        verdict = evaluate_instance(instance, self.graph, sequence, self.collect_trace)
        self.stats.eval_seconds += time.perf_counter() - start
        self.stats.evaluations += 1
        self.stats.reads += len(verdict.reads)
        if verdict.terminated:
            self.index.drop(instance.id)
        else:
            self.index.update_scope(instance.id, verdict.reads)
        return verdict
