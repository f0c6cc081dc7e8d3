"""Intent classification by token-set overlap.

Deterministic nearest-example scorer: an utterance is scored against each
training example by F1 between their token sets, and the intent of the
best example wins. Tiny enumerable corpora make this competitive with a
learned classifier while keeping behavior reproducible; the class is a
drop-in seam if a learned model ever replaces it.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field

from .nlu import ExampleUtterance, NluTrainingData

FALLBACK_INTENT = "fallback"
FALLBACK_THRESHOLD = 0.4

_PUNCT_TABLE = str.maketrans("", "", string.punctuation)


def tokenize(text: str) -> list[str]:
    return text.lower().translate(_PUNCT_TABLE).split()


def token_f1(a: set[str], b: set[str]) -> float:
    if not a or not b:
        return 0.0
    overlap = len(a & b)
    if overlap == 0:
        return 0.0
    precision = overlap / len(a)
    recall = overlap / len(b)
    return 2.0 * precision * recall / (precision + recall)


@dataclass
class IntentPrediction:
    intent: str
    confidence: float
    entities: dict[str, str] = field(default_factory=dict)


class TokenSetClassifier:
    def __init__(self, data: NluTrainingData,
                 synonyms: dict[str, list[str]] | None = None,
                 threshold: float = FALLBACK_THRESHOLD):
        self.threshold = threshold
        self.synonyms = synonyms or {}
        # Declaration order doubles as the tie-break order.
        self._examples: list[tuple[str, frozenset[str], ExampleUtterance]] = []
        for intent, examples in data.intents.items():
            for ex in examples:
                self._examples.append((intent, frozenset(tokenize(ex.text)), ex))
        if not self._examples:
            raise ValueError("classifier needs at least one example")

    def classify(self, utterance: str) -> IntentPrediction:
        tokens = set(tokenize(utterance))
        if not tokens:
            return IntentPrediction(FALLBACK_INTENT, 0.0)
        best_score = -1.0
        best: tuple[str, ExampleUtterance] | None = None
        for intent, ex_tokens, ex in self._examples:
            score = token_f1(tokens, ex_tokens)
            if score > best_score:
                best_score = score
                best = (intent, ex)
        assert best is not None
        if best_score < self.threshold:
            return IntentPrediction(FALLBACK_INTENT, max(best_score, 0.0))
        intent, example = best
        return IntentPrediction(intent, best_score,
                                self._extract_entities(example, tokens))

    def _extract_entities(self, example: ExampleUtterance,
                          tokens: set[str]) -> dict[str, str]:
        entities: dict[str, str] = {}
        for span in example.spans:
            surface_tokens = tokenize(span.surface)
            if surface_tokens and all(t in tokens for t in surface_tokens):
                entities[span.entity] = span.surface
                continue
            for alt in self.synonyms.get(span.surface.lower(), []):
                if alt.lower() in tokens:
                    entities[span.entity] = alt
                    break
        return entities
