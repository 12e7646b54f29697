"""Websocket gateway serving one session per connection endpoint.

The engine runs on an AsyncioScheduler in the same event loop, so command
handling and event fan-out need no locks. Each connection gets a bounded
outbound queue; a client that cannot keep up is disconnected (it resyncs on
reconnect) rather than allowed to stall the session. Capture is not tied to
any connection: clients may drop and return freely.
"""

from __future__ import annotations

import asyncio
import logging
from urllib.parse import parse_qs, urlparse

from websockets.asyncio.server import ServerConnection, serve
from websockets.exceptions import ConnectionClosed

from .hub import SessionHub
from .protocol import ProtocolError, encode_event, event_to_json, parse_command
from ..session.engine import EngineEvent, SessionEngine

logger = logging.getLogger(__name__)

OUTBOUND_QUEUE_LIMIT = 512


class GatewayServer:
    def __init__(self, engine: SessionEngine, host: str = "127.0.0.1", port: int = 8765) -> None:
        self.engine = engine
        self.hub = SessionHub(engine)
        self.host = host
        self.port = port
        self._server = None

    async def start(self) -> None:
        self._server = await serve(self._handler, self.host, self.port)

    async def stop(self) -> None:
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()
            self._server = None

    @property
    def bound_port(self) -> int:
        assert self._server is not None
        return next(iter(self._server.sockets)).getsockname()[1]

    async def serve_forever(self) -> None:
        assert self._server is not None
        await self._server.serve_forever()

    async def _handler(self, conn: ServerConnection) -> None:
        resume_from = _resume_position(conn.request.path if conn.request else "")
        queue: asyncio.Queue[dict] = asyncio.Queue(maxsize=OUTBOUND_QUEUE_LIMIT)

        def offer(message: dict) -> bool:
            try:
                queue.put_nowait(message)
                return True
            except asyncio.QueueFull:
                logger.warning("dropping slow gateway client (queue overflow)")
                return False

        hub_conn = self.hub.attach(offer, resume_from)
        writer = asyncio.create_task(self._write_loop(conn, queue, hub_conn))
        try:
            async for raw in conn:
                try:
                    command = parse_command(raw)
                except ProtocolError as exc:
                    await self._send_final_error(conn, str(exc))
                    break
                self.engine.handle_command(command)
        except ConnectionClosed:
            pass
        finally:
            self.hub.detach(hub_conn)
            writer.cancel()
            try:
                await writer
            except asyncio.CancelledError:
                pass

    async def _write_loop(
        self, conn: ServerConnection, queue: asyncio.Queue, hub_conn
    ) -> None:
        try:
            while True:
                message = await queue.get()
                await conn.send(event_to_json(message))
                if not hub_conn.alive and queue.empty():
                    await conn.close(code=1013, reason="client too slow; resync")
                    return
        except ConnectionClosed:
            pass

    async def _send_final_error(self, conn: ServerConnection, message: str) -> None:
        event = EngineEvent(
            kind="error",
            at_ms=self.engine.clock.now_ms(),
            generation=self.engine.state.generation,
            payload={"code": "protocol_violation", "message": message},
        )
        try:
            await conn.send(event_to_json(encode_event(self.hub.seq, event)))
        except ConnectionClosed:
            pass
        await conn.close(code=1002, reason="protocol violation")


def _resume_position(path: str) -> int | None:
    query = parse_qs(urlparse(path).query)
    values = query.get("resume_from")
    if not values:
        return None
    try:
        return int(values[0])
    except ValueError:
        return None
