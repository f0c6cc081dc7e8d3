"""Wire protocol for interactive walk sessions.

Messages are JSON objects with four fields:
    type     one of MESSAGE_TYPES
    session  session id (absent only on create_session)
    seq      per-session, per-direction sequence number starting at 1
    payload  type-specific object

Client -> server types: create_session, act, say, keep_alive, end_session.
Server -> client types: session_created, step_result, agent_reply,
state_snapshot, keep_alive, error, end_session. Every client message gets
exactly one reply. The handshake is versioned: create_session must carry
payload.protocol == PROTOCOL_VERSION.

Over a byte stream the framing is length-delimited: the ASCII decimal
byte length of the JSON body, a newline, then the body. WebSocket text
frames carry one message per frame (the frame is the length delimiter).
"""

from __future__ import annotations

import json

PROTOCOL_VERSION = 1

MESSAGE_TYPES = (
    "create_session",
    "session_created",
    "act",
    "step_result",
    "say",
    "agent_reply",
    "state_snapshot",
    "keep_alive",
    "error",
    "end_session",
)

CLIENT_TYPES = ("create_session", "act", "say", "keep_alive", "end_session")


class ProtocolError(Exception):
    pass


def make_message(msg_type: str, session: str | None, seq: int, payload: dict) -> dict:
    if msg_type not in MESSAGE_TYPES:
        raise ProtocolError(f"unknown message type {msg_type!r}")
    msg = {"type": msg_type, "seq": seq, "payload": payload}
    if session is not None:
        msg["session"] = session
    return msg


def parse_client_message(msg: dict) -> tuple[str, str | None, int, dict]:
    if not isinstance(msg, dict):
        raise ProtocolError("message must be an object")
    msg_type = msg.get("type")
    if msg_type not in CLIENT_TYPES:
        raise ProtocolError(f"unexpected client message type {msg_type!r}")
    seq = msg.get("seq")
    if not isinstance(seq, int) or seq < 1:
        raise ProtocolError("seq must be a positive integer")
    session = msg.get("session")
    if msg_type != "create_session" and not isinstance(session, str):
        raise ProtocolError("missing session id")
    payload = msg.get("payload") or {}
    if not isinstance(payload, dict):
        raise ProtocolError("payload must be an object")
    return msg_type, session, seq, payload


def frame(msg: dict) -> bytes:
    body = json.dumps(msg).encode()
    return str(len(body)).encode() + b"\n" + body


def read_frame(stream) -> dict | None:
    """Read one length-delimited message from a binary stream."""
    header = b""
    while not header.endswith(b"\n"):
        ch = stream.read(1)
        if not ch:
            return None
        header += ch
    try:
        length = int(header.strip())
    except ValueError:
        raise ProtocolError(f"bad frame header {header!r}") from None
    body = stream.read(length)
    if len(body) != length:
        raise ProtocolError("truncated frame")
    return json.loads(body)
