"""HTTP shell over the gateway core.

POST /rpc      one request message -> one reply message (scripting)
WS   /ws       persistent bidirectional connection; the server sends a
               hello with its protocol version, then answers each client
               message with exactly one reply
GET  /healthz  liveness probe
"""

from __future__ import annotations

from fastapi import Body, FastAPI, WebSocket, WebSocketDisconnect

from .core import Gateway
from .protocol import PROTOCOL_VERSION


def make_app(gateway: Gateway) -> FastAPI:
    app = FastAPI(title="sidewalk-guide gateway")

    @app.get("/healthz")
    def healthz() -> dict:
        return {"ok": True, "protocol": PROTOCOL_VERSION}

    @app.post("/rpc")
    def rpc(msg: dict = Body(...)) -> dict:
        return gateway.handle(msg)

    @app.websocket("/ws")
    async def ws(sock: WebSocket) -> None:
        await sock.accept()
        await sock.send_json({"type": "hello", "seq": 0,
                              "payload": {"protocol": PROTOCOL_VERSION}})
        try:
            while True:
                msg = await sock.receive_json()
                await sock.send_json(gateway.handle(msg))
        except WebSocketDisconnect:
            return

    return app
