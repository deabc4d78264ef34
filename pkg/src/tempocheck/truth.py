"""Four-valued verdicts and the per-operator state records.

A temporary value may still flip on a future change; a permanent value is
final and the node holding it is terminated, never evaluated again. Non-
temporal Boolean expressions evaluate to permanent values: their result at
the current moment is definitive, carrying no pending obligation. Temporal
operators decide from the perm/temp classification of their operands whether
they may terminate.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


class TruthValue(enum.Enum):
    TEMP_TRUE = "tempT"
    TEMP_FALSE = "tempF"
    PERM_TRUE = "permT"
    PERM_FALSE = "permF"

    @property
    def holds(self) -> bool:
        """Boolean projection: what a non-temporal parent sees."""
        return self in (TruthValue.TEMP_TRUE, TruthValue.PERM_TRUE)

    @property
    def permanent(self) -> bool:
        return self in (TruthValue.PERM_TRUE, TruthValue.PERM_FALSE)

    @property
    def wire(self) -> str:
        return self.value

    def __repr__(self) -> str:
        return self.value


TEMP_TRUE = TruthValue.TEMP_TRUE
TEMP_FALSE = TruthValue.TEMP_FALSE
PERM_TRUE = TruthValue.PERM_TRUE
PERM_FALSE = TruthValue.PERM_FALSE

_BY_BOOL = {
    (True, True): PERM_TRUE,
    (True, False): TEMP_TRUE,
    (False, True): PERM_FALSE,
    (False, False): TEMP_FALSE,
}


def from_bool(value: bool, permanent: bool = True) -> TruthValue:
    return _BY_BOOL[(bool(value), permanent)]


def parse_truth(text: str) -> TruthValue:
    return TruthValue(text)


def combine_and(left: TruthValue, right: TruthValue) -> TruthValue:
    """False is pinned by any permanently-false operand; true needs both."""
    value = left.holds and right.holds
    if value:
        permanent = left.permanent and right.permanent
    else:
        permanent = any(
            not tv.holds and tv.permanent for tv in (left, right)
        )
    return from_bool(value, permanent)


def combine_or(left: TruthValue, right: TruthValue) -> TruthValue:
    value = left.holds or right.holds
    if value:
        permanent = any(tv.holds and tv.permanent for tv in (left, right))
    else:
        permanent = left.permanent and right.permanent
    return from_bool(value, permanent)


def combine_xor(left: TruthValue, right: TruthValue) -> TruthValue:
    # Either operand flipping flips the result, so both must be settled.
    return from_bool(left.holds != right.holds, left.permanent and right.permanent)


def combine_not(tv: TruthValue) -> TruthValue:
    return from_bool(not tv.holds, tv.permanent)


# -- operator state records ---------------------------------------------------
#
# Exactly the bookkeeping each operator needs: `always` one Boolean,
# the trigger operators their last trigger projection plus whether an
# obligation is live. Cycle payloads (nested evaluation trees) are owned by
# the evaluator; no evaluation history is ever stored.


@dataclass
class OpState:
    final: TruthValue | None = None  # set <=> the node is terminated

    def terminate(self, value: TruthValue) -> TruthValue:
        self.final = value
        return value

    def state_bools(self) -> int:
        """Number of Booleans this record keeps (memory accounting)."""
        return 0


@dataclass
class NextState(OpState):
    activated: bool = False

    def state_bools(self) -> int:
        return 1


@dataclass
class EventuallyState(OpState):
    pass


@dataclass
class UntilState(OpState):
    pass


@dataclass
class AlwaysState(OpState):
    last_a: bool = True

    def state_bools(self) -> int:
        return 1


@dataclass
class AtLeastOnceState(OpState):
    last_a: bool = False
    ever_triggered: bool = False
    cycle: object = None  # live obligation's evaluation tree, or None
    cycle_ordinal: int = 0

    def state_bools(self) -> int:
        return 2


@dataclass
class EverytimeState(OpState):
    last_a: bool = False
    cycles: dict[int, object] = field(default_factory=dict)  # outstanding obligations
    next_ordinal: int = 0

    def state_bools(self) -> int:
        return 1


def step_next(state: NextState, a: TruthValue | None) -> TruthValue:
    """First evaluation activates the node and yields tempF (a is discarded);
    from the following moment on the node mirrors its child and terminates
    with it once the child is permanent."""
    if not state.activated:
        state.activated = True
        return TEMP_FALSE
    assert a is not None
    if a.permanent:
        return state.terminate(a)
    return a


def step_eventually(state: EventuallyState, a: TruthValue) -> TruthValue:
    if a is PERM_TRUE:
        return state.terminate(PERM_TRUE)
    if a is TEMP_TRUE:
        return TEMP_TRUE
    return TEMP_FALSE  # never permanently false


def step_always(state: AlwaysState, a: TruthValue) -> TruthValue:
    if a.holds:
        state.last_a = True
        return TEMP_TRUE  # never permanently true
    return state.terminate(PERM_FALSE)


def step_until(state: UntilState, a: TruthValue, b: TruthValue) -> TruthValue:
    if b is PERM_TRUE:
        return state.terminate(PERM_TRUE)
    if b is TEMP_TRUE:
        return TEMP_TRUE
    if a.holds:
        return TEMP_FALSE
    return state.terminate(PERM_FALSE)
