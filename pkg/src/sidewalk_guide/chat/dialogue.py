"""Story-driven dialogue policy.

The next action is a pure function of the session's intent history and
the domain: the longest story prefix consistent with the tail of the
history decides, falling back to the per-intent default action.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .classify import FALLBACK_INTENT, IntentPrediction
from .domain import DomainSpec

FALLBACK_ACTION = "utter_fallback"


class DialogueError(Exception):
    pass


@dataclass
class DialogueState:
    session_id: str
    last_intent: Optional[str] = None
    slots: dict[str, str] = field(default_factory=dict)
    turn_count: int = 0
    pending_action: Optional[str] = None
    intent_history: list[str] = field(default_factory=list)


def next_action(state: DialogueState, pred: IntentPrediction, domain: DomainSpec) -> str:
    if pred.intent == FALLBACK_INTENT:
        return FALLBACK_ACTION
    if pred.intent not in domain.intents:
        raise DialogueError(f"undeclared intent {pred.intent!r}")
    history = state.intent_history + [pred.intent]
    best_len = 0
    best_action: Optional[str] = None
    for story in domain.stories:
        intents = [s.intent for s in story.steps]
        for k in range(min(len(intents), len(history)), 0, -1):
            if intents[:k] == history[-k:]:
                if k > best_len:
                    best_len = k
                    best_action = story.steps[k - 1].action
                break
    if best_action is None:
        best_action = domain.defaults.get(pred.intent, FALLBACK_ACTION)
    return best_action


def advance(state: DialogueState, pred: IntentPrediction, action: str,
            domain: DomainSpec) -> None:
    """Record a completed turn; slots only keep declared entities."""
    if pred.intent != FALLBACK_INTENT:
        state.intent_history.append(pred.intent)
        state.last_intent = pred.intent
    for name, value in pred.entities.items():
        if name in domain.entities:
            state.slots[name] = value
    state.turn_count += 1
    state.pending_action = action
