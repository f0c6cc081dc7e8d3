"""Action execution: turn a chosen action into response text.

Simulation-backed actions pull a fresh free-path report from the session
world; utter_* actions render their domain template directly.
"""

from __future__ import annotations

from typing import Callable, Optional, Sequence

from .classify import IntentPrediction
from .dialogue import DialogueState
from .domain import DomainSpec

ReportEntry = tuple[str, float, str]  # (label, distance m, side word)

CLOSE_DISTANCE = 2.0  # m; nearer than this reads as "close"
FREE_PATH_TEXT = "the path ahead is free"
NO_REPORT_TEXT = "I have not spotted anything yet"


class ActionError(Exception):
    pass


def kind_words(label: str) -> str:
    return label.replace("_", " ")


def render_report(report: Sequence[ReportEntry], template: str) -> str:
    if not report:
        return FREE_PATH_TEXT
    parts = [
        template.format(kind=kind_words(label), distance=f"{dist:.1f}", bearing_word=word)
        for label, dist, word in report
    ]
    return "; ".join(parts)


def render_distance(report: Optional[Sequence[ReportEntry]],
                    asked_label: Optional[str] = None) -> str:
    if not report:
        return NO_REPORT_TEXT
    entries = list(report)
    if asked_label:
        wanted = asked_label.replace(" ", "_").lower()
        matching = [e for e in entries if e[0] == wanted]
        if matching:
            entries = matching
    label, dist, _ = min(entries, key=lambda e: e[1])
    if dist < CLOSE_DISTANCE:
        return f"yes, about {dist:.1f} meters, close"
    return f"about {dist:.1f} meters away"


def execute_action(action: str, state: DialogueState, pred: IntentPrediction,
                   domain: DomainSpec,
                   fresh_report: Callable[[], list[ReportEntry]],
                   last_report: Optional[list[ReportEntry]]):
    """Returns (response text, report to remember for follow-ups)."""
    if action == "action_report_obstacles":
        report = fresh_report()
        template = domain.templates.get(
            "action_report_obstacles", "I see {kind} {distance} meters {bearing_word}")
        return render_report(report, template), report
    if action == "action_report_distance":
        asked = pred.entities.get("obstacle") or state.slots.get("obstacle")
        return render_distance(last_report, asked), last_report
    template = domain.templates.get(action)
    if template is None:
        raise ActionError(f"no handler or template for action {action!r}")
    return template, last_report
