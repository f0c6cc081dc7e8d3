"""Session service: worlds, dialogues, and analytics behind the wire protocol.

Transport-agnostic: `Gateway.handle(message) -> reply` implements the
whole protocol; the HTTP/WebSocket layer in app.py is a thin shell. Each
session's handling is serialized under its own lock, sessions never share
state, and analytics appends funnel through the single event log.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from ..agents import select_action
from ..agents.checkpoint import CheckpointError, load_agent
from ..analytics import AnalyticsEvent, EventLog
from ..chat import (
    DialogueState,
    TokenSetClassifier,
    advance,
    default_domain,
    default_nlu_text,
    execute_action,
    load_domain,
    next_action,
    parse_nlu,
)
from ..freepath import assess, top_k_report
from ..harness.episode import CORRIDOR_HALFWIDTH, observe
from ..scenario import ScenarioError, load_scenario
from ..sensing import SensorConfig, scan
from ..world import ACTIONS, SidewalkWorld
from .protocol import PROTOCOL_VERSION, ProtocolError, make_message, parse_client_message

TOP_K = 5


def _now_ms() -> int:
    return int(time.time() * 1000)


@dataclass
class GatewayConfig:
    scenarios_dir: str | Path
    analytics_log: str | Path
    nlu_path: str | Path | None = None
    domain_path: str | Path | None = None
    checkpoint_path: str | Path | None = None
    sensor: SensorConfig = field(default_factory=SensorConfig)
    idle_timeout_ms: int = 600_000
    clock: Callable[[], int] = _now_ms
    seed: Optional[int] = None  # base seed for session worlds; None -> entropy


class GatewayError(Exception):
    pass


@dataclass
class Session:
    id: str
    world: SidewalkWorld
    dialogue: DialogueState
    mode: str
    created_at: int
    last_activity: int
    sensor_rng: np.random.Generator
    status: str = "live"  # live | collided | reached_goal | ended
    client_seq: int = 0
    server_seq: int = 0
    last_report: Optional[list] = None
    lock: threading.Lock = field(default_factory=threading.Lock)

    def next_server_seq(self) -> int:
        self.server_seq += 1
        return self.server_seq


class Gateway:
    def __init__(self, cfg: GatewayConfig):
        self.cfg = cfg
        self.scenarios_dir = Path(cfg.scenarios_dir)
        self.analytics = EventLog(cfg.analytics_log)
        nlu_text = (Path(cfg.nlu_path).read_text() if cfg.nlu_path
                    else default_nlu_text())
        self.domain = load_domain(cfg.domain_path) if cfg.domain_path else default_domain()
        self.classifier = TokenSetClassifier(parse_nlu(nlu_text),
                                             synonyms=self.domain.synonyms)
        self.agent = None
        if cfg.checkpoint_path:
            self.agent = load_agent(cfg.checkpoint_path)
        self._sessions: dict[str, Session] = {}
        self._registry_lock = threading.Lock()
        self._seed_rng = np.random.default_rng(cfg.seed)

    # -- message entry point ------------------------------------------------

    def handle(self, msg: dict) -> dict:
        try:
            msg_type, session_id, seq, payload = parse_client_message(msg)
        except ProtocolError as exc:
            return make_message("error", msg.get("session"), 1,
                                {"message": str(exc), "code": "protocol"})
        if msg_type == "create_session":
            return self._create_session(seq, payload)
        session = self._sessions.get(session_id)
        if session is None:
            return make_message("error", session_id, 1,
                                {"message": "unknown session", "code": "unknown_session"})
        with session.lock:
            if seq != session.client_seq + 1:
                return self._reply(session, "error", {
                    "message": f"sequence gap: expected {session.client_seq + 1}, got {seq}",
                    "code": "sequence",
                })
            session.client_seq = seq
            now = self.cfg.clock()
            if session.status == "ended":
                return self._reply(session, "error",
                                   {"message": "session terminated", "code": "terminated"})
            if now - session.last_activity > self.cfg.idle_timeout_ms:
                self._end(session, now, reason="idle_timeout")
                return self._reply(session, "error",
                                   {"message": "session terminated", "code": "terminated"})
            session.last_activity = now
            if msg_type == "act":
                return self._act(session, payload, now)
            if msg_type == "say":
                return self._say(session, payload, now)
            if msg_type == "keep_alive":
                self._record(now, session.id, "keep_alive", {})
                return self._reply(session, "keep_alive", {"ok": True})
            if msg_type == "end_session":
                self._end(session, now, reason="client_request")
                return self._reply(session, "end_session", {"ok": True})
        raise GatewayError(f"unhandled message type {msg_type}")  # pragma: no cover

    # -- operations ----------------------------------------------------------

    def _create_session(self, seq: int, payload: dict) -> dict:
        if payload.get("protocol") != PROTOCOL_VERSION:
            return make_message("error", None, 1, {
                "message": f"protocol version mismatch: server speaks {PROTOCOL_VERSION}",
                "code": "protocol_version",
            })
        name = payload.get("scenario")
        mode = payload.get("mode", "human_steered")
        if mode not in ("human_steered", "agent_steered"):
            return make_message("error", None, 1,
                                {"message": f"unknown mode {mode!r}", "code": "bad_mode"})
        if mode == "agent_steered" and self.agent is None:
            return make_message("error", None, 1, {
                "message": "agent_steered mode needs a checkpoint", "code": "no_checkpoint"})
        path = self.scenarios_dir / f"{name}.yaml"
        if not path.exists():
            return make_message("error", None, 1,
                                {"message": "scenario not found", "code": "unknown_scenario"})
        try:
            scenario = load_scenario(path)
        except ScenarioError as exc:
            return make_message("error", None, 1,
                                {"message": str(exc), "code": "bad_scenario"})
        from ..scenario import build_world
        world_seed = int(self._seed_rng.integers(2 ** 62))
        world = build_world(scenario, seed_override=world_seed)
        now = self.cfg.clock()
        sid = uuid.uuid4().hex[:12]
        session = Session(
            id=sid,
            world=world,
            dialogue=DialogueState(session_id=sid),
            mode=mode,
            created_at=now,
            last_activity=now,
            sensor_rng=np.random.default_rng(world_seed ^ 0x5EED),
            client_seq=seq,
        )
        with self._registry_lock:
            self._sessions[sid] = session
        self._record(now, sid, "app_log", {"event": "session_created",
                                           "scenario": name, "mode": mode})
        payload_out = self._snapshot(session)
        return make_message("session_created", sid, session.next_server_seq(), payload_out)

    def _snapshot(self, session: Session) -> dict:
        w = session.world
        return {
            "protocol": PROTOCOL_VERSION,
            "mode": session.mode,
            "status": session.status,
            "walker": {"x": float(w.walker.position[0]),
                       "y": float(w.walker.position[1]),
                       "heading": w.walker.heading},
            "goal_distance": w.goal_distance(),
            "length": w.length,
            "width": w.width,
            "tick": w.tick,
        }

    def _act(self, session: Session, payload: dict, now: int) -> dict:
        if session.status != "live":
            self._end(session, now, reason="act_after_terminal")
            return self._reply(session, "error",
                               {"message": "session terminated", "code": "terminated"})
        if session.mode == "human_steered":
            action = payload.get("action")
            if action not in ACTIONS:
                return self._reply(session, "error",
                                   {"message": f"unknown action {action!r}", "code": "bad_action"})
        else:
            if "action" in payload:
                return self._reply(session, "error", {
                    "message": "agent_steered sessions pick their own actions",
                    "code": "bad_action"})
            _, _, state = observe(session.world, self.cfg.sensor, session.sensor_rng,
                                  self.agent.uses_features)
            action = ACTIONS[select_action(self.agent, state, 0.0,
                                           np.random.default_rng(0))]
        outcome = session.world.step(action)
        report = [] if outcome.terminal else self._fresh_report(session, now)
        if outcome.collided:
            session.status = "collided"
            self._record(now, session.id, "app_log",
                         {"event": "collision", "tick": session.world.tick})
        elif outcome.reached_goal:
            session.status = "reached_goal"
            self._record(now, session.id, "app_log",
                         {"event": "reached_goal", "tick": session.world.tick})
        result = {
            "action": action,
            "reward": outcome.reward,
            "collided": outcome.collided,
            "reached_goal": outcome.reached_goal,
            "terminal": outcome.terminal,
            "report": [self._report_entry(e) for e in report],
            "walker": self._snapshot(session)["walker"],
            "goal_distance": session.world.goal_distance(),
            "tick": session.world.tick,
            "status": session.status,
        }
        return self._reply(session, "step_result", result)

    def _fresh_report(self, session: Session, now: int) -> list:
        sweep = scan(session.world, self.cfg.sensor, session.sensor_rng)
        assessment = assess(sweep, direction=session.world.walker.heading,
                            corridor_halfwidth=CORRIDOR_HALFWIDTH)
        report = top_k_report(assessment, TOP_K)
        for label, dist, word in report:
            kind = "recognized_obstacle" if label != "?" else "unrecognized_obstacle"
            self._record(now, session.id, kind,
                         {"label": label, "distance_m": dist, "side": word})
        session.last_report = report
        return report

    @staticmethod
    def _report_entry(entry) -> dict:
        label, dist, word = entry
        return {"label": label, "distance_m": dist, "bearing_word": word}

    def _say(self, session: Session, payload: dict, now: int) -> dict:
        text = str(payload.get("text", ""))
        pred = self.classifier.classify(text)
        self._record(now, session.id, "conversation_text",
                     {"speaker": "user", "text": text, "intent": pred.intent})
        action = next_action(session.dialogue, pred, self.domain)

        def fresh() -> list:
            if session.status != "live":
                return []
            return self._fresh_report(session, now)

        reply_text, remembered = execute_action(action, session.dialogue, pred,
                                                self.domain, fresh, session.last_report)
        session.last_report = remembered
        advance(session.dialogue, pred, action, self.domain)
        self._record(now, session.id, "conversation_text",
                     {"speaker": "agent", "text": reply_text, "intent": None})
        if action == "utter_bye":
            self.analytics.flush()
        payload_out = {
            "text": reply_text,
            "action": action,
            "intent": pred.intent,
            "confidence": pred.confidence,
            "report": [self._report_entry(e) for e in (session.last_report or [])]
            if action == "action_report_obstacles" else [],
        }
        return self._reply(session, "agent_reply", payload_out)

    def _end(self, session: Session, now: int, reason: str) -> None:
        if session.status != "ended":
            prior = session.status
            session.status = "ended"
            self._record(now, session.id, "app_log",
                         {"event": "session_ended", "reason": reason, "prior": prior})
            self.analytics.flush()

    # -- plumbing -------------------------------------------------------------

    def _reply(self, session: Session, msg_type: str, payload: dict) -> dict:
        return make_message(msg_type, session.id, session.next_server_seq(), payload)

    def _record(self, ts: int, session_id: str, kind: str, payload: dict) -> None:
        self.analytics.record(AnalyticsEvent(ts=ts, session=session_id,
                                             kind=kind, payload=payload))

    def session_count(self) -> int:
        with self._registry_lock:
            return len(self._sessions)
