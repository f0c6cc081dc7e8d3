import threading

import pytest
from fastapi.testclient import TestClient

from sidewalk_guide.analytics import report as analytics_report
from sidewalk_guide.gateway.app import make_app
from sidewalk_guide.gateway.core import Gateway, GatewayConfig
from sidewalk_guide.gateway.protocol import PROTOCOL_VERSION, frame, read_frame


class FakeClock:
    def __init__(self, start=1_700_000_000_000):
        self.now = start

    def __call__(self):
        return self.now

    def advance(self, ms):
        self.now += ms


@pytest.fixture()
def gateway(tmp_path, scenarios_dir):
    clock = FakeClock()
    gw = Gateway(GatewayConfig(
        scenarios_dir=scenarios_dir,
        analytics_log=tmp_path / "events.jsonl",
        clock=clock,
        seed=42,
    ))
    gw.test_clock = clock
    return gw


def create(gw, scenario="empty_10m", mode="human_steered", protocol=PROTOCOL_VERSION):
    return gw.handle({"type": "create_session", "seq": 1,
                      "payload": {"scenario": scenario, "mode": mode,
                                  "protocol": protocol}})


class Client:
    """Tiny scripted client tracking per-session sequence numbers."""

    def __init__(self, gw, scenario="empty_10m"):
        self.gw = gw
        reply = create(gw, scenario)
        assert reply["type"] == "session_created", reply
        self.sid = reply["session"]
        self.seq = 1
        self.server_seqs = [reply["seq"]]
        self.snapshot = reply["payload"]

    def send(self, msg_type, payload=None):
        self.seq += 1
        reply = self.gw.handle({"type": msg_type, "session": self.sid,
                                "seq": self.seq, "payload": payload or {}})
        self.server_seqs.append(reply["seq"])
        return reply


def test_create_session_snapshot(gateway):
    reply = create(gateway, "standard")
    assert reply["type"] == "session_created"
    p = reply["payload"]
    assert p["goal_distance"] == pytest.approx(152.4)
    assert p["walker"]["x"] == 0.0
    assert p["mode"] == "human_steered"
    assert p["status"] == "live"
    # ground truth never crosses the wire in human mode
    assert "obstacles" not in p
    assert reply["seq"] == 1


def test_unknown_scenario_is_an_error(gateway):
    reply = create(gateway, "atlantis")
    assert reply["type"] == "error"
    assert reply["payload"]["message"] == "scenario not found"


def test_agent_steered_without_checkpoint_is_an_error(gateway):
    reply = create(gateway, "empty_10m", mode="agent_steered")
    assert reply["type"] == "error"
    assert reply["payload"]["code"] == "no_checkpoint"


def test_protocol_version_mismatch_rejected(gateway):
    reply = create(gateway, "empty_10m", protocol=99)
    assert reply["type"] == "error"
    assert "protocol version" in reply["payload"]["message"]


def test_act_forward_in_free_space(gateway):
    c = Client(gateway)
    reply = c.send("act", {"action": "forward"})
    assert reply["type"] == "step_result"
    p = reply["payload"]
    assert p["reward"] == 1
    assert p["collided"] is False
    assert p["walker"]["x"] == pytest.approx(0.6)
    assert isinstance(p["report"], list)


def test_act_to_goal_then_act_errors(gateway):
    c = Client(gateway)
    last = None
    for _ in range(20):
        last = c.send("act", {"action": "forward"})
        if last["payload"]["terminal"]:
            break
    assert last["payload"]["reached_goal"] is True
    after = c.send("act", {"action": "forward"})
    assert after["type"] == "error"
    assert after["payload"]["message"] == "session terminated"


def test_act_into_curb_reports_collision(gateway):
    c = Client(gateway)
    # 4 sidesteps from the center of a 3 m walkway cross the edge line
    for _ in range(4):
        reply = c.send("act", {"action": "left"})
    assert reply["type"] == "step_result"
    assert reply["payload"]["collided"] is True
    assert reply["payload"]["reward"] == -1
    assert reply["payload"]["status"] == "collided"


def test_unknown_action_rejected(gateway):
    c = Client(gateway)
    reply = c.send("act", {"action": "jump"})
    assert reply["type"] == "error"


def test_say_greeting(gateway):
    c = Client(gateway)
    reply = c.send("say", {"text": "hey"})
    assert reply["type"] == "agent_reply"
    assert reply["payload"]["intent"] == "greet"
    assert reply["payload"]["text"] == "hello, I am watching the path for you"


def test_say_what_is_there_reports_from_live_world(gateway):
    c = Client(gateway, scenario="standard")
    # walk toward the first obstacles so the report is non-empty
    for _ in range(22):
        r = c.send("act", {"action": "forward"})
        if r["type"] == "error" or r["payload"]["terminal"]:
            pytest.skip("walk interrupted before the checkpoint distance")
    reply = c.send("say", {"text": "What is there?"})
    assert reply["type"] == "agent_reply"
    assert reply["payload"]["intent"] == "find_obstacle"
    text = reply["payload"]["text"]
    assert text != ""
    assert len(reply["payload"]["report"]) <= 5


def test_say_gibberish_falls_back(gateway):
    c = Client(gateway)
    reply = c.send("say", {"text": "flibbertigibbet"})
    assert reply["payload"]["intent"] == "fallback"
    assert reply["payload"]["text"] == "sorry, I did not catch that"


def test_keep_alive_ack_and_unknown_session(gateway):
    c = Client(gateway)
    reply = c.send("keep_alive")
    assert reply["type"] == "keep_alive"
    bad = gateway.handle({"type": "keep_alive", "session": "nope", "seq": 1,
                          "payload": {}})
    assert bad["type"] == "error"
    assert bad["payload"]["code"] == "unknown_session"


def test_sequence_gap_is_rejected(gateway):
    c = Client(gateway)
    reply = gateway.handle({"type": "keep_alive", "session": c.sid,
                            "seq": 7, "payload": {}})
    assert reply["type"] == "error"
    assert reply["payload"]["code"] == "sequence"


def test_server_seq_gapless_per_session(gateway):
    c = Client(gateway)
    for i in range(5):
        c.send("keep_alive")
    assert c.server_seqs == list(range(1, len(c.server_seqs) + 1))


def test_session_isolation(gateway):
    a = Client(gateway)
    b = Client(gateway)
    a.send("act", {"action": "forward"})
    a.send("act", {"action": "forward"})
    snap_b = b.send("act", {"action": "stop"})
    assert snap_b["payload"]["walker"]["x"] == 0.0  # untouched by a's walking
    a_pos = a.send("act", {"action": "stop"})["payload"]["walker"]["x"]
    assert a_pos == pytest.approx(1.2)


def test_idle_timeout_terminates_session(gateway):
    c = Client(gateway)
    gateway.test_clock.advance(601_000)
    reply = c.send("keep_alive")
    assert reply["type"] == "error"
    assert reply["payload"]["message"] == "session terminated"


def test_end_session_flushes_and_blocks_further_use(gateway):
    c = Client(gateway)
    reply = c.send("end_session")
    assert reply["type"] == "end_session"
    after = c.send("act", {"action": "forward"})
    assert after["type"] == "error"


def test_analytics_trail_of_a_session(gateway, tmp_path):
    c = Client(gateway)
    gateway.test_clock.advance(1000)
    c.send("say", {"text": "hello"})
    gateway.test_clock.advance(1000)
    c.send("keep_alive")
    gateway.test_clock.advance(1000)
    c.send("end_session")
    events = list(gateway.analytics.read())
    kinds = [e.kind for e in events]
    assert kinds.count("conversation_text") == 2  # user + agent
    assert "keep_alive" in kinds
    assert kinds[0] == "app_log"  # session_created
    assert events[-1].payload["event"] == "session_ended"
    out = analytics_report(events)
    assert out.sessions_per_day == 1.0


def test_say_records_intent_for_user_tries(gateway):
    c = Client(gateway)
    for _ in range(3):
        c.send("say", {"text": "What is there?"})
        gateway.test_clock.advance(5_000)
    out = analytics_report(list(gateway.analytics.read()))
    assert out.user_tries == 3


# ---------------------------------------------------------------------------
# HTTP / WebSocket shell
# ---------------------------------------------------------------------------

def test_rpc_and_websocket_transports(gateway):
    app = make_app(gateway)
    with TestClient(app) as http:
        assert http.get("/healthz").json()["ok"] is True
        reply = http.post("/rpc", json={
            "type": "create_session", "seq": 1,
            "payload": {"scenario": "empty_10m", "mode": "human_steered",
                        "protocol": PROTOCOL_VERSION}}).json()
        assert reply["type"] == "session_created"
        sid = reply["session"]
        step = http.post("/rpc", json={
            "type": "act", "session": sid, "seq": 2,
            "payload": {"action": "forward"}}).json()
        assert step["payload"]["reward"] == 1

        with http.websocket_connect("/ws") as ws:
            hello = ws.receive_json()
            assert hello["type"] == "hello"
            assert hello["payload"]["protocol"] == PROTOCOL_VERSION
            ws.send_json({"type": "create_session", "seq": 1,
                          "payload": {"scenario": "empty_10m",
                                      "mode": "human_steered",
                                      "protocol": PROTOCOL_VERSION}})
            created = ws.receive_json()
            assert created["type"] == "session_created"
            ws.send_json({"type": "say", "session": created["session"],
                          "seq": 2, "payload": {"text": "hello"}})
            said = ws.receive_json()
            assert said["type"] == "agent_reply"


def test_frame_roundtrip():
    import io
    msg = {"type": "keep_alive", "session": "s", "seq": 3, "payload": {}}
    stream = io.BytesIO(frame(msg) + frame(msg))
    assert read_frame(stream) == msg
    assert read_frame(stream) == msg
    assert read_frame(stream) is None


def test_concurrent_sessions_interleaved_threads(gateway):
    """Eight threads, one session each, hammering interleaved requests."""
    results = {}

    def run(tag):
        c = Client(gateway)
        for k in range(30):
            r = c.send("keep_alive")
            assert r["type"] == "keep_alive"
            r = c.send("say", {"text": "hello"})
            assert r["type"] == "agent_reply"
        results[tag] = c.server_seqs

    threads = [threading.Thread(target=run, args=(i,)) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(results) == 8
    for seqs in results.values():
        assert seqs == list(range(1, 62))
