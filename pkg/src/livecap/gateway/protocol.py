"""Wire protocol: one JSON object per text message over a full-duplex socket.

Events (server -> client): {"v": 1, "seq", "generation", "kind", "at_ms",
"payload"}. Commands (client -> server): {"v": 1, "id", "kind", "args"}.
Exactly these top-level fields; unknown top-level fields are rejected. The
full schema ships in wire_schema.json next to this module.
"""

from __future__ import annotations

import json
from importlib import resources
from typing import Any

from ..session.engine import EngineEvent, SessionCommand

WIRE_VERSION = 1

EVENT_KINDS = (
    "segment",
    "segment_revised",
    "condensed",
    "framework",
    "rsvp_token",
    "state",
    "error",
    "history",
)

COMMAND_KINDS = (
    "start_capture",
    "stop_capture",
    "clear",
    "set_mode",
    "set_rsvp_rate",
    "set_appearance",
    "list_history",
    "load_history",
    "pause_rsvp",
    "resume_rsvp",
)

_EVENT_FIELDS = {"v", "seq", "generation", "kind", "at_ms", "payload"}
_COMMAND_FIELDS = {"v", "id", "kind", "args"}


class ProtocolError(ValueError):
    """The message violates the wire contract; the connection must close."""


def encode_event(seq: int, event: EngineEvent) -> dict:
    return {
        "v": WIRE_VERSION,
        "seq": seq,
        "generation": event.generation,
        "kind": event.kind,
        "at_ms": event.at_ms,
        "payload": event.payload,
    }


def event_to_json(message: dict) -> str:
    return json.dumps(message, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def parse_command(raw: str | bytes | dict) -> SessionCommand:
    """Strict envelope parse; per-kind argument checks live in the engine."""
    if isinstance(raw, dict):
        data: Any = raw
    else:
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"invalid JSON: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ProtocolError("command must be a JSON object")
    extra = set(data) - _COMMAND_FIELDS
    if extra:
        raise ProtocolError(f"unknown top-level fields: {sorted(extra)}")
    missing = _COMMAND_FIELDS - set(data)
    if missing:
        raise ProtocolError(f"missing top-level fields: {sorted(missing)}")
    if data["v"] != WIRE_VERSION:
        raise ProtocolError(f"unsupported protocol version: {data['v']!r}")
    if not isinstance(data["id"], str) or not data["id"]:
        raise ProtocolError("command id must be a nonempty string")
    if not isinstance(data["kind"], str):
        raise ProtocolError("command kind must be a string")
    if not isinstance(data["args"], dict):
        raise ProtocolError("command args must be an object")
    return SessionCommand(id=data["id"], kind=data["kind"], args=data["args"])


def validate_event_envelope(data: dict) -> None:
    """Structural check used by tests and log readers."""
    extra = set(data) - _EVENT_FIELDS
    if extra:
        raise ProtocolError(f"unknown top-level fields: {sorted(extra)}")
    missing = _EVENT_FIELDS - set(data)
    if missing:
        raise ProtocolError(f"missing top-level fields: {sorted(missing)}")
    if data["v"] != WIRE_VERSION:
        raise ProtocolError(f"unsupported protocol version: {data['v']!r}")
    if data["kind"] not in EVENT_KINDS:
        raise ProtocolError(f"unknown event kind: {data['kind']!r}")


def load_wire_schema() -> dict:
    with resources.files("livecap.gateway").joinpath("wire_schema.json").open(
        "r", encoding="utf-8"
    ) as fh:
        return json.load(fh)
