"""Broadcast hub: one engine event stream fanned out to every connection.

Broadcast events get a session-scoped seq (strictly increasing, gap-free)
and land in a bounded replay buffer. A connection attaches with an optional
resume position: when the buffer still covers it, the client gets a fresh
snapshot stamped at its resume seq followed by the missed events; otherwise
a snapshot-only resync stamped at the current seq. Fan-out is identical for
everyone; there is no per-connection filtering.
"""

from __future__ import annotations

from collections import deque
from typing import Callable

from ..session.engine import EngineEvent, SessionEngine
from .protocol import encode_event

DEFAULT_REPLAY_BUFFER = 4096


class HubConnection:
    """One attached client: a sink callback plus liveness state."""

    def __init__(self, send: Callable[[dict], bool]) -> None:
        self._send = send
        self.alive = True

    def offer(self, message: dict) -> None:
        if not self.alive:
            return
        if not self._send(message):
            self.alive = False


class SessionHub:
    def __init__(self, engine: SessionEngine, replay_buffer: int = DEFAULT_REPLAY_BUFFER) -> None:
        self.engine = engine
        self._seq = 0
        self._log: deque[dict] = deque(maxlen=replay_buffer)
        self._connections: list[HubConnection] = []
        engine.subscribe(self._on_event)

    @property
    def seq(self) -> int:
        return self._seq

    def _on_event(self, event: EngineEvent) -> None:
        self._seq += 1
        message = encode_event(self._seq, event)
        self._log.append(message)
        for conn in list(self._connections):
            conn.offer(message)
            if not conn.alive:
                self._connections.remove(conn)

    def _snapshot_message(self, seq: int) -> dict:
        event = EngineEvent(
            kind="state",
            at_ms=self.engine.clock.now_ms(),
            generation=self.engine.state.generation,
            payload={"snapshot": self.engine.state.snapshot()},
        )
        return encode_event(seq, event)

    def attach(
        self, send: Callable[[dict], bool], resume_from: int | None = None
    ) -> HubConnection:
        """Register a sink; delivers the snapshot (and any resumable backlog)
        before any live event."""
        conn = HubConnection(send)
        backlog: list[dict] = []
        snapshot_seq = self._seq
        if resume_from is not None and 0 <= resume_from <= self._seq:
            missed = [m for m in self._log if m["seq"] > resume_from]
            if len(missed) == self._seq - resume_from:
                # Buffer still covers the gap: resume instead of resync.
                backlog = missed
                snapshot_seq = resume_from
        conn.offer(self._snapshot_message(snapshot_seq))
        for message in backlog:
            conn.offer(message)
        if conn.alive:
            self._connections.append(conn)
        return conn

    def detach(self, conn: HubConnection) -> None:
        conn.alive = False
        if conn in self._connections:
            self._connections.remove(conn)

    @property
    def connection_count(self) -> int:
        return len(self._connections)
