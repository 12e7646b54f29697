from .hub import HubConnection, SessionHub
from .protocol import (
    COMMAND_KINDS,
    EVENT_KINDS,
    WIRE_VERSION,
    ProtocolError,
    encode_event,
    event_to_json,
    load_wire_schema,
    parse_command,
    validate_event_envelope,
)
from .server import GatewayServer

__all__ = [
    "SessionHub",
    "HubConnection",
    "GatewayServer",
    "ProtocolError",
    "encode_event",
    "event_to_json",
    "parse_command",
    "validate_event_envelope",
    "load_wire_schema",
    "WIRE_VERSION",
    "EVENT_KINDS",
    "COMMAND_KINDS",
]
