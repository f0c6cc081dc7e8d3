"""Domain files: intents, entities, actions, templates, stories."""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml

FORMAT_VERSION = 1


class DomainError(Exception):
    pass


@dataclass
class StoryStep:
    intent: str
    action: str


@dataclass
class Story:
    name: str
    steps: list[StoryStep]


@dataclass
class DomainSpec:
    intents: list[str]
    entities: list[str]
    actions: list[str]
    templates: dict[str, str]
    stories: list[Story]
    defaults: dict[str, str] = field(default_factory=dict)
    synonyms: dict[str, list[str]] = field(default_factory=dict)

    def validate(self) -> None:
        declared_actions = set(self.actions)
        declared_intents = set(self.intents)
        for story in self.stories:
            for step in story.steps:
                if step.intent not in declared_intents:
                    raise DomainError(f"story {story.name!r} uses undeclared intent {step.intent!r}")
                if step.action not in declared_actions:
                    raise DomainError(f"story {story.name!r} uses undeclared action {step.action!r}")
        for intent, action in self.defaults.items():
            if intent not in declared_intents:
                raise DomainError(f"default for undeclared intent {intent!r}")
            if action not in declared_actions:
                raise DomainError(f"default uses undeclared action {action!r}")
        for action in self.actions:
            if action.startswith("utter_") and action not in self.templates:
                raise DomainError(f"action {action!r} has no template")


def parse_domain(data: dict) -> DomainSpec:
    if not isinstance(data, dict):
        raise DomainError("domain must be a mapping")
    if data.get("format") != FORMAT_VERSION:
        raise DomainError(f"unsupported domain format {data.get('format')!r}")
    stories = []
    for raw in data.get("stories", []):
        steps = [StoryStep(intent=s["intent"], action=s["action"]) for s in raw.get("steps", [])]
        stories.append(Story(name=raw.get("name", f"story-{len(stories)}"), steps=steps))
    spec = DomainSpec(
        intents=list(data.get("intents", [])),
        entities=list(data.get("entities", [])),
        actions=list(data.get("actions", [])),
        templates=dict(data.get("templates", {})),
        stories=stories,
        defaults=dict(data.get("defaults", {})),
        synonyms={k: list(v) for k, v in (data.get("synonyms") or {}).items()},
    )
    spec.validate()
    return spec


def load_domain(path: str | Path) -> DomainSpec:
    try:
        data = yaml.safe_load(Path(path).read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise DomainError(f"cannot load domain: {exc}") from None
    return parse_domain(data)


def default_domain() -> DomainSpec:
    text = resources.files("sidewalk_guide").joinpath("data/domain.yaml").read_text()
    return parse_domain(yaml.safe_load(text))


def default_nlu_text() -> str:
    return resources.files("sidewalk_guide").joinpath("data/nlu.md").read_text()
