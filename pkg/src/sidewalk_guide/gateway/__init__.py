from .core import Gateway, GatewayConfig, Session
from .protocol import PROTOCOL_VERSION, ProtocolError, frame, make_message, read_frame

__all__ = [
    "Gateway",
    "GatewayConfig",
    "PROTOCOL_VERSION",
    "ProtocolError",
    "Session",
    "frame",
    "make_message",
    "read_frame",
]
