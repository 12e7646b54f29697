from .engine import EngineConfig, EngineEvent, SessionCommand, SessionEngine
from .history import HistoryEntry, HistoryError, HistoryRecord, HistoryStore
from .sources import ChunkedAudioSource, ReplaySource
from .state import (
    MODES,
    VIRTUAL_EPOCH,
    SessionNote,
    SessionState,
    TickRequest,
    condensed_payload,
)

__all__ = [
    "SessionEngine",
    "EngineConfig",
    "EngineEvent",
    "SessionCommand",
    "SessionState",
    "SessionNote",
    "TickRequest",
    "MODES",
    "VIRTUAL_EPOCH",
    "condensed_payload",
    "HistoryStore",
    "HistoryRecord",
    "HistoryEntry",
    "HistoryError",
    "ReplaySource",
    "ChunkedAudioSource",
]
