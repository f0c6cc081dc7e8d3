"""Append-only usage event log and the report derived from it.

Log format: JSON lines, one event per line, fields ts (ms since epoch),
session, kind, payload. Kinds are fixed: conversation_text,
recognized_obstacle, unrecognized_obstacle, app_log, keep_alive.
Timestamps must be non-decreasing within a session.

Report metrics (all per definitions below, durations in ms):
  offline_ms          sum of keep-alive gaps longer than gap_threshold,
                      each counted at its full length
  deadlock_ms         sum of user-message-to-agent-reply waits longer than
                      deadlock_threshold (full wait; an unanswered message
                      waits until the session's last event)
  sessions_per_day    sessions divided by distinct UTC days with events
  task_completion_ms  per session: first goal-reached app_log (or last
                      event) minus the session's first event; reported as
                      the mean plus the per-session map
  user_tries          total size of groups of >= 2 consecutive same-intent
                      user utterances with gaps within try_window
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from threading import Lock
from typing import Iterable, Iterator

EVENT_KINDS = (
    "conversation_text",
    "recognized_obstacle",
    "unrecognized_obstacle",
    "app_log",
    "keep_alive",
)

GOAL_EVENT = "reached_goal"


class AnalyticsError(Exception):
    pass


class LogOrderingError(AnalyticsError):
    pass


@dataclass
class AnalyticsEvent:
    ts: int
    session: str
    kind: str
    payload: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in EVENT_KINDS:
            raise AnalyticsError(f"unknown event kind {self.kind!r}")

    def to_json(self) -> str:
        return json.dumps({"ts": self.ts, "session": self.session,
                           "kind": self.kind, "payload": self.payload})

    @classmethod
    def from_json(cls, line: str) -> "AnalyticsEvent":
        try:
            d = json.loads(line)
            return cls(ts=int(d["ts"]), session=str(d["session"]),
                       kind=d["kind"], payload=d.get("payload", {}))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise AnalyticsError(f"bad event line: {exc}") from None


class EventLog:
    """Serialized appender over a JSON-lines file.

    All writers funnel through one instance; appends are flushed line by
    line so a crash loses at most the event being written.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = Lock()
        self._last_ts: dict[str, int] = {}
        if self.path.exists():
            for ev in self.read():
                self._last_ts[ev.session] = ev.ts
        else:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self.path.touch()

    def record(self, event: AnalyticsEvent) -> None:
        with self._lock:
            last = self._last_ts.get(event.session)
            if last is not None and event.ts < last:
                raise LogOrderingError(
                    f"event at {event.ts} before {last} for session {event.session}")
            with open(self.path, "a") as fh:
                fh.write(event.to_json() + "\n")
                fh.flush()
            self._last_ts[event.session] = event.ts

    def flush(self) -> None:
        # Appends are write-through; nothing is buffered here.
        return None

    def read(self) -> Iterator[AnalyticsEvent]:
        with open(self.path) as fh:
            for line in fh:
                line = line.strip()
                if line:
                    yield AnalyticsEvent.from_json(line)


@dataclass
class Thresholds:
    keepalive_period_ms: int = 10_000
    gap_threshold_ms: int = 30_000      # 3x the keep-alive period
    deadlock_threshold_ms: int = 5_000
    try_window_ms: int = 30_000


@dataclass
class UsageReport:
    deadlock_ms: int = 0
    offline_ms: int = 0
    sessions_per_day: float = 0.0
    task_completion_ms: float = 0.0
    task_completion_by_session: dict[str, int] = field(default_factory=dict)
    user_tries: int = 0

    def to_dict(self) -> dict:
        return {
            "deadlock_ms": self.deadlock_ms,
            "offline_ms": self.offline_ms,
            "sessions_per_day": self.sessions_per_day,
            "task_completion_ms": self.task_completion_ms,
            "task_completion_by_session": self.task_completion_by_session,
            "user_tries": self.user_tries,
        }

    def to_csv(self) -> str:
        lines = ["metric,value",
                 f"deadlock_ms,{self.deadlock_ms}",
                 f"offline_ms,{self.offline_ms}",
                 f"sessions_per_day,{self.sessions_per_day}",
                 f"task_completion_ms,{self.task_completion_ms}",
                 f"user_tries,{self.user_tries}"]
        return "\n".join(lines) + "\n"


def report(events: Iterable[AnalyticsEvent] | EventLog | str | Path,
           thresholds: Thresholds | None = None) -> UsageReport:
    """Pure function of (events, thresholds); empty input zeroes out."""
    th = thresholds or Thresholds()
    if isinstance(events, (str, Path)):
        events = EventLog(events)
    if isinstance(events, EventLog):
        events = list(events.read())
    else:
        events = list(events)
    out = UsageReport()
    if not events:
        return out

    sessions: dict[str, list[AnalyticsEvent]] = {}
    for ev in events:
        sessions.setdefault(ev.session, []).append(ev)

    completions: dict[str, int] = {}
    for sid, evs in sessions.items():
        evs.sort(key=lambda e: e.ts)
        out.offline_ms += _offline_ms(evs, th)
        out.deadlock_ms += _deadlock_ms(evs, th)
        out.user_tries += _user_tries(evs, th)
        completions[sid] = _task_completion_ms(evs)
    out.task_completion_by_session = completions
    out.task_completion_ms = sum(completions.values()) / len(completions)

    days = {datetime.fromtimestamp(ev.ts / 1000.0, tz=timezone.utc).date()
            for ev in events}
    out.sessions_per_day = len(sessions) / len(days)
    return out


def _offline_ms(evs: list[AnalyticsEvent], th: Thresholds) -> int:
    pings = [e.ts for e in evs if e.kind == "keep_alive"]
    total = 0
    for prev, cur in zip(pings, pings[1:]):
        gap = cur - prev
        if gap > th.gap_threshold_ms:
            total += gap
    return total


def _deadlock_ms(evs: list[AnalyticsEvent], th: Thresholds) -> int:
    last_ts = evs[-1].ts
    total = 0
    pending: int | None = None
    for ev in evs:
        if ev.kind != "conversation_text":
            continue
        speaker = ev.payload.get("speaker")
        if speaker == "user":
            if pending is None:
                pending = ev.ts
        elif speaker == "agent" and pending is not None:
            wait = ev.ts - pending
            if wait > th.deadlock_threshold_ms:
                total += wait
            pending = None
    if pending is not None:
        wait = last_ts - pending
        if wait > th.deadlock_threshold_ms:
            total += wait
    return total


def _user_tries(evs: list[AnalyticsEvent], th: Thresholds) -> int:
    utterances = [(e.ts, e.payload.get("intent"))
                  for e in evs
                  if e.kind == "conversation_text" and e.payload.get("speaker") == "user"]
    total = 0
    run = 1
    for (t0, i0), (t1, i1) in zip(utterances, utterances[1:]):
        if i1 is not None and i1 == i0 and (t1 - t0) <= th.try_window_ms:
            run += 1
        else:
            if run >= 2:
                total += run
            run = 1
    if run >= 2:
        total += run
    return total


def _task_completion_ms(evs: list[AnalyticsEvent]) -> int:
    start = evs[0].ts
    for ev in evs:
        if ev.kind == "app_log" and ev.payload.get("event") == GOAL_EVENT:
            return ev.ts - start
    return evs[-1].ts - start
