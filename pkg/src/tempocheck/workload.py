"""Deterministic issue-tracker workload generator.

Produces a schema, an (empty) initial artifact dump, a change log of issue
lifecycles interleaved across issues, and a reconstructed 21-rule working
suite for the workflow (the original operational rule set is not public).
Everything is derived from the seed; identical seeds give byte-identical
outputs.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .graph import Change, Ref, add_to_list, create, set_prop
from .schema import Schema, make_type

STATUSES = [
    "Open",
    "In Development",
    "Ready For Review",
    "Reviewed",
    "In Testing",
    "Resolved",
    "Closed",
    "Reopened",
    "In Development Again",
    "Suspended Development",
    "Suspended Test",
]

# status -> [(next status, weight)]; walks start at Open and mostly end Closed.
_TRANSITIONS: dict[str, list[tuple[str, float]]] = {
    "Open": [("In Development", 0.9), ("Suspended Development", 0.1)],
    "In Development": [
        ("Ready For Review", 0.55),
        ("In Testing", 0.15),
        ("Resolved", 0.15),
        ("Suspended Development", 0.15),
    ],
    "Ready For Review": [("Reviewed", 0.75), ("In Development Again", 0.25)],
    "Reviewed": [("In Testing", 0.7), ("Resolved", 0.3)],
    "In Testing": [
        ("Resolved", 0.75),
        ("Suspended Test", 0.1),
        ("In Development Again", 0.15),
    ],
    "Resolved": [("Closed", 0.85), ("Reopened", 0.15)],
    "Reopened": [("In Development Again", 1.0)],
    "In Development Again": [
        ("Ready For Review", 0.6),
        ("In Testing", 0.2),
        ("Resolved", 0.2),
    ],
    "Suspended Development": [("In Development", 1.0)],
    "Suspended Test": [("In Testing", 1.0)],
}

_PRIORITIES = ["Low", "Medium", "High", "Critical"]

CONSTRAINT_SUITE = """\
-- Working-rule suite for the issue workflow (reconstruction, 21 rules):
-- pre/post conditions on status order plus quality-assurance conditions.

context Issue inv opened_first: eventually(self.status = 'Open')

context Issue inv reaches_development: atLeastOnce(self.status = 'Open', eventually(self.status = 'In Development'))

context Issue inv eventually_resolved: eventually(self.status = 'Resolved')

context Issue inv eventually_closed: eventually(self.status = 'Closed')

context Issue inv resolve_before_close: until(not(self.status = 'Closed'), self.status = 'Resolved')

context Issue inv develop_before_test: until(not(self.status = 'In Testing'), self.status = 'In Development')

context Issue inv ready_before_review: until(not(self.status = 'Reviewed'), self.status = 'Ready For Review')

context Issue inv development_reaches_review: atLeastOnce(self.status = 'In Development', eventually(self.status = 'Ready For Review'))

context Issue inv review_concludes: everytime(self.status = 'Ready For Review', eventually(self.status = 'Reviewed' or self.status = 'In Development Again'))

context Issue inv reopen_restarts_development: everytime(self.status = 'Reopened', eventually(self.status = 'In Development Again'))

context Issue inv development_concludes: everytime(self.status = 'In Development', eventually(self.status = 'Resolved' or self.status = 'Suspended Development'))

context Issue inv suspended_development_resumes: everytime(self.status = 'Suspended Development', eventually(self.status = 'In Development' or self.status = 'In Development Again'))

context Issue inv suspended_test_resumes: everytime(self.status = 'Suspended Test', eventually(self.status = 'In Testing'))

context Issue inv testing_concludes: atLeastOnce(self.status = 'In Testing', eventually(self.status = 'Resolved' or self.status = 'Reopened'))

context Issue inv assigned_in_development: atLeastOnce(self.status = 'In Development', self.assignee.isDefined())

context Issue inv stays_assigned_after_start: always(self.status = 'Open' or self.assignee.isDefined())

context Issue inv assigned_next_after_creation: next(self.assignee.isDefined() or self.status = 'In Development')

context Issue inv open_then_development: everytime(self.status = 'Open', until(not(self.status = 'Closed'), self.status = 'In Development'))

context Issue inv children_close_first: always(not(self.status = 'Closed') or self.children->forAll(c | c.status = 'Closed'))

context Issue inv children_eventually_resolved: self.children->forAll(c | eventually(c.status = 'Resolved' or c.status = 'Closed'))

context Issue inv children_resolve_before_close: self.children->forAll(c | until(not(c.status = 'Closed'), c.status = 'Resolved'))
"""


def issue_schema() -> Schema:
    return Schema(
        [
            make_type(
                "Issue",
                status="string",
                assignee="string",
                description="string",
                priority="string",
                storyPoints="int",
                parent=("ref", "Issue"),
                children=("list-ref", "Issue"),
            )
        ]
    )


@dataclass
class Workload:
    schema: Schema
    initial_artifacts: list = field(default_factory=list)
    records: list[dict] = field(default_factory=list)
    constraints_text: str = CONSTRAINT_SUITE


def generate_workload(seed: int, n_issues: int) -> Workload:
    if n_issues < 1:
        raise ValueError("n_issues must be >= 1")
    rng = random.Random(seed)
    queues: list[list[Change]] = []
    created_order: list[str] = []

    worker_pool = [f"user{k}" for k in range(1, 1 + max(3, n_issues // 8))]

    for i in range(n_issues):
        iid = f"ISS-{i + 1}"
        queue: list[Change] = [create(iid, "Issue", {"status": "Open"})]

        # Links: a later issue may become a child of an earlier one. The
        # merge below only activates queue i after queue i-1 started, so the
        # parent's creation always precedes the link events.
        if i > 0 and rng.random() < 0.45:
            parent = f"ISS-{rng.randrange(1, i + 1)}"
            queue.append(add_to_list(parent, "children", Ref(iid)))
            queue.append(set_prop(iid, "parent", Ref(parent)))

        body: list[Change] = []
        if rng.random() < 0.85:
            body.append(set_prop(iid, "assignee", rng.choice(worker_pool)))
        status = "Open"
        reopens = 0
        for _ in range(24):
            choices = _TRANSITIONS.get(status)
            if not choices:
                break
            status = _weighted(rng, choices)
            if status == "Reopened":
                reopens += 1
                if reopens > 2:
                    status = "Closed"
            body.append(set_prop(iid, "status", status))
            if status == "Closed" and rng.random() < 0.9:
                break
        # Noise outside every constraint's scope: edits to descriptive fields.
        for k in range(rng.randrange(4, 11)):
            kind = rng.random()
            if kind < 0.5:
                body.append(set_prop(iid, "description", f"rev {k} of {iid}"))
            elif kind < 0.8:
                body.append(set_prop(iid, "priority", rng.choice(_PRIORITIES)))
            else:
                body.append(set_prop(iid, "storyPoints", rng.randrange(1, 14)))
        rng.shuffle(body)
        queue.extend(body)
        queues.append(queue)
        created_order.append(iid)

    # Interleave queues. Activating a queue emits its creation right away, so
    # an issue is always created before any later issue links to it.
    records: list[dict] = []
    started = 0  # queues [0, started) are in rotation
    heads = [0] * len(queues)
    seq = 0
    while True:
        live = [qi for qi in range(started) if heads[qi] < len(queues[qi])]
        if started < len(queues) and (not live or rng.random() < 0.35):
            qi = started
            started += 1
        elif live:
            qi = rng.choice(live)
        else:
            break
        change = queues[qi][heads[qi]]
        heads[qi] += 1
        seq += 1
        records.append({"seq": seq, "ts": _timestamp(seq), "change": change})

    return Workload(issue_schema(), [], records)


def _weighted(rng: random.Random, choices: list[tuple[str, float]]) -> str:
    total = sum(w for _, w in choices)
    roll = rng.random() * total
    acc = 0.0
    for value, weight in choices:
        acc += weight
        if roll <= acc:
            return value
    return choices[-1][0]


def _timestamp(seq: int) -> str:
    # Synthetic monotonic clock: one tick every 37 seconds from a fixed epoch.
    total = seq * 37
    days, rem = divmod(total, 86400)
    hours, rem = divmod(rem, 3600)
    minutes, seconds = divmod(rem, 60)
    return f"2024-01-{1 + days:02d}T{hours:02d}:{minutes:02d}:{seconds:02d}"
