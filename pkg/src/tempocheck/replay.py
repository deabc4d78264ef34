"""Replay of change logs through the engine: verdict stream, stats, cross-check."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .engine import CheckEngine
from .errors import TempocheckError
from .evaluator import Verdict
from .graph import Artifact, ArtifactGraph, ChangeSet
from .lang.nodes import ConstraintDef
from .oracle import TraceSnapshot, oracle_verdicts
from .schema import Schema


@dataclass
class RunStats:
    total_events: int = 0
    trigger_events: int = 0
    evaluations: int = 0
    avg_eval_millis: float = 0.0
    total_seconds: float = 0.0

    def as_dict(self) -> dict:
        return {
            "totalEvents": self.total_events,
            "triggerEvents": self.trigger_events,
            "evaluations": self.evaluations,
            "avgEvalMillis": round(self.avg_eval_millis, 4),
            "totalSeconds": round(self.total_seconds, 3),
        }


@dataclass
class ReplayResult:
    stats: RunStats
    verdicts: list[Verdict] = field(default_factory=list)
    oracle_mismatches: list[str] = field(default_factory=list)
    final_violations: list[str] = field(default_factory=list)
    engine: CheckEngine | None = None


def group_change_sets(records: list[dict], batch_by_timestamp: bool = False) -> list[ChangeSet]:
    """One change set per record by default; batching groups consecutive
    records sharing a timestamp under the last record's sequence number."""
    sets: list[ChangeSet] = []
    if not batch_by_timestamp:
        for rec in records:
            sets.append(ChangeSet(rec["seq"], rec["ts"], (rec["change"],)))
        return sets
    group: list[dict] = []
    for rec in records:
        if group and rec["ts"] != group[0]["ts"]:
            sets.append(_close_group(group))
            group = []
        group.append(rec)
    if group:
        sets.append(_close_group(group))
    return sets


def _close_group(group: list[dict]) -> ChangeSet:
    return ChangeSet(group[-1]["seq"], group[0]["ts"], tuple(r["change"] for r in group))


def run_replay(
    schema: Schema,
    definitions: list[ConstraintDef],
    initial_artifacts: list[Artifact],
    records: list[dict],
    batch_by_timestamp: bool = False,
    with_oracle: bool = False,
    on_verdict=None,
) -> ReplayResult:
    """Apply the change log in order, evaluating affected instances per set."""
    ordered = sorted(records, key=lambda r: (r["ts"], r["seq"]))
    if [r["seq"] for r in ordered] != [r["seq"] for r in records]:
        raise TempocheckError("change log is not sorted by (timestamp, sequence)")

    graph = ArtifactGraph(schema)
    graph.bootstrap(initial_artifacts)
    engine = CheckEngine(graph, definitions)
    result = ReplayResult(RunStats(), engine=engine)

    snapshots: list[TraceSnapshot] = []
    bootstrap_seq = min((r["seq"] for r in records), default=1) - 1

    started = time.perf_counter()
    verdicts = engine.bootstrap(bootstrap_seq)
    for v in verdicts:
        result.verdicts.append(v)
        if on_verdict:
            on_verdict(v)
    if with_oracle:
        snapshots.append(TraceSnapshot(bootstrap_seq, graph.snapshot()))

    for cs in group_change_sets(records, batch_by_timestamp):
        applied = engine.apply_change_set(cs)
        result.stats.total_events += len(cs.changes)
        if applied.verdicts:
            result.stats.trigger_events += 1
        for v in applied.verdicts:
            result.verdicts.append(v)
            if on_verdict:
                on_verdict(v)
        if with_oracle:
            snapshots.append(TraceSnapshot(cs.sequence, graph.snapshot()))
    result.stats.total_seconds = time.perf_counter() - started

    result.stats.evaluations = engine.stats.evaluations
    if engine.stats.evaluations:
        result.stats.avg_eval_millis = (
            engine.stats.eval_seconds / engine.stats.evaluations * 1000.0
        )

    for instance in engine.all_instances():
        if instance.last_verdict is not None and not instance.last_verdict.holds:
            result.final_violations.append(instance.id)

    if with_oracle:
        result.oracle_mismatches = compare_with_oracle(
            schema, definitions, snapshots, result.verdicts
        )
    return result


def compare_with_oracle(
    schema: Schema,
    definitions: list[ConstraintDef],
    snapshots: list[TraceSnapshot],
    verdicts: list[Verdict],
) -> list[str]:
    """Carry-forward comparison of the engine's verdict stream against the
    reference evaluator, at every snapshot from each instance's creation."""
    list_props = {
        t.name: {p.name for p in t.properties.values() if p.is_list}
        for t in schema.types.values()
    }
    reference = oracle_verdicts(snapshots, definitions, list_props)

    emitted: dict[str, dict[int, object]] = {}
    for v in verdicts:
        emitted.setdefault(v.instance_id, {})[v.sequence] = v.value

    mismatches: list[str] = []
    ref_instances = {iid for iid, _ in reference}
    for extra in sorted(set(emitted) - ref_instances):
        mismatches.append(f"{extra}: engine evaluated an instance the oracle never saw")
    for iid in sorted(ref_instances):
        per_seq = emitted.get(iid)
        if per_seq is None:
            mismatches.append(f"{iid}: oracle saw an instance the engine never evaluated")
            continue
        last = None
        for snap in snapshots:
            seq = snap.sequence
            if seq in per_seq:
                last = per_seq[seq]
            expected = reference.get((iid, seq))
            if expected is None:
                if last is not None:
                    mismatches.append(f"{iid} at {seq}: engine has {last}, oracle nothing")
                continue
            if last != expected:
                mismatches.append(f"{iid} at {seq}: engine {last}, oracle {expected}")
    return mismatches


def verdict_wire(v: Verdict) -> dict:
    return {
        "seq": v.sequence,
        "constraint": v.constraint,
        "context": v.context_id,
        "verdict": v.value.wire,
        "terminated": v.terminated,
    }


def verdict_text(v: Verdict) -> str:
    flag = "#" if v.terminated else " "
    return f"{v.sequence:>8}  {v.value.wire:<5}{flag} {v.constraint:<32} {v.context_id}"
