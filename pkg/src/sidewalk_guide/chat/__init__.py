from .actions import execute_action, render_distance, render_report
from .classify import (
    FALLBACK_INTENT,
    FALLBACK_THRESHOLD,
    IntentPrediction,
    TokenSetClassifier,
    tokenize,
)
from .dialogue import DialogueError, DialogueState, advance, next_action
from .domain import DomainError, DomainSpec, default_domain, default_nlu_text, load_domain
from .nlu import (
    EntitySpan,
    ExampleUtterance,
    NluFormatError,
    NluTrainingData,
    parse_nlu,
    serialize_nlu,
)

__all__ = [
    "DialogueError",
    "DialogueState",
    "DomainError",
    "DomainSpec",
    "EntitySpan",
    "ExampleUtterance",
    "FALLBACK_INTENT",
    "FALLBACK_THRESHOLD",
    "IntentPrediction",
    "NluFormatError",
    "NluTrainingData",
    "TokenSetClassifier",
    "advance",
    "default_domain",
    "default_nlu_text",
    "execute_action",
    "load_domain",
    "next_action",
    "parse_nlu",
    "render_distance",
    "render_report",
    "serialize_nlu",
    "tokenize",
]
