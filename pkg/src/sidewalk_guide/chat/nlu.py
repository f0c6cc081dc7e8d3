"""Markdown-style NLU training data.

Format by example:

    ## intent:find_obstacle
    - Find [obstacle](obstacle)?
    - What is [there](obstacle)?

`## intent:NAME` opens an intent block; each `- ...` line is one example
utterance. `[surface](entity)` marks an entity span; whitespace between
the bracket and the parenthesis is tolerated. Stored example text has the
markup stripped.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field


class NluFormatError(Exception):
    pass


@dataclass
class EntitySpan:
    surface: str
    entity: str
    start: int  # offset in the stripped text


@dataclass
class ExampleUtterance:
    text: str
    spans: list[EntitySpan] = field(default_factory=list)


@dataclass
class NluTrainingData:
    intents: dict[str, list[ExampleUtterance]] = field(default_factory=dict)

    @property
    def intent_names(self) -> list[str]:
        return list(self.intents)

    def n_examples(self) -> int:
        return sum(len(v) for v in self.intents.values())


_HEADER = re.compile(r"^##\s*intent:\s*(\S+)\s*$")
_SPAN = re.compile(r"\[([^\[\]]*)\]\s*\(\s*([^()\s]+)\s*\)")


def _parse_example(line: str, lineno: int) -> ExampleUtterance:
    raw = line[1:].strip()
    spans: list[EntitySpan] = []
    out: list[str] = []
    pos = 0
    for m in _SPAN.finditer(raw):
        out.append(raw[pos:m.start()])
        start = sum(len(s) for s in out)
        spans.append(EntitySpan(surface=m.group(1), entity=m.group(2), start=start))
        out.append(m.group(1))
        pos = m.end()
    out.append(raw[pos:])
    text = "".join(out)
    if "[" in text or "]" in text:
        raise NluFormatError(f"line {lineno}: unbalanced brackets in {raw!r}")
    return ExampleUtterance(text=text, spans=spans)


def parse_nlu(text: str) -> NluTrainingData:
    if not text.strip():
        raise NluFormatError("no intents")
    data = NluTrainingData()
    current: str | None = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        m = _HEADER.match(stripped)
        if m:
            name = m.group(1)
            if name in data.intents:
                raise NluFormatError(f"line {lineno}: duplicate intent {name!r}")
            data.intents[name] = []
            current = name
            continue
        if stripped.startswith("-"):
            if current is None:
                raise NluFormatError(f"line {lineno}: example before any intent header")
            data.intents[current].append(_parse_example(stripped, lineno))
            continue
        raise NluFormatError(f"line {lineno}: unrecognized line {stripped!r}")
    if not data.intents:
        raise NluFormatError("no intents")
    return data


def serialize_nlu(data: NluTrainingData) -> str:
    """Canonical text form; parse(serialize(x)) == x structurally."""
    blocks = []
    for intent, examples in data.intents.items():
        lines = [f"## intent:{intent}"]
        for ex in examples:
            text = ex.text
            # Re-insert markup right to left so offsets stay valid.
            for span in sorted(ex.spans, key=lambda s: -s.start):
                end = span.start + len(span.surface)
                text = f"{text[:span.start]}[{span.surface}]({span.entity}){text[end:]}"
            lines.append(f"- {text}")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"
