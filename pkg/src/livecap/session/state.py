"""Per-session state: transcript buffer, windowing, generation fencing.

All content is owned by a single logical writer (the engine's command
queue); these methods never do their own scheduling. The generation number
fences stale work: any segment or provider result stamped with an older
generation is discarded on arrival, so nothing from before a clear can
surface afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone

from ..framework import FrameworkRecord
from ..ingest.segments import TranscriptSegment
from ..summarize.condense import CondensedUpdate
from ..text import join_segment_texts

MODES = ("raw", "condensed", "framework")

DEFAULT_TICK_MS = 30_000
DEFAULT_WINDOW_MS = 40_000

VIRTUAL_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


@dataclass(frozen=True)
class TickRequest:
    tick_index: int
    generation: int
    window_start_ms: int
    window_end_ms: int
    window_text: str


@dataclass
class SessionNote:
    """A session-lifecycle marker kept for history (start/stop/clear/error)."""

    name: str
    at_ms: int
    detail: str = ""


@dataclass
class SessionState:
    session_id: str = "session"
    started_at: datetime = field(default_factory=lambda: datetime.now(timezone.utc))
    capturing: bool = False
    mode: str = "raw"
    generation: int = 0
    tick_index: int = 0
    rsvp_rate: float = 180.0
    capture_origin_ms: int | None = None
    section_origin_ms: int = 0
    appearance: dict = field(default_factory=dict)
    stale_dropped: int = 0
    condensed_log: list[CondensedUpdate] = field(default_factory=list)
    framework_current: FrameworkRecord = field(default_factory=FrameworkRecord)
    framework_snapshots: list[FrameworkRecord] = field(default_factory=list)
    notes: list[SessionNote] = field(default_factory=list)
    _by_seq: dict[int, TranscriptSegment] = field(default_factory=dict)

    def segments(self) -> list[TranscriptSegment]:
        return sorted(self._by_seq.values(), key=lambda s: (s.t_start_ms, s.seq))

    @property
    def buffer_size(self) -> int:
        return len(self._by_seq)

    def append_segment(self, seg: TranscriptSegment) -> str:
        """Returns "appended", "revised", or "stale"/"ignored" for drops.

        A provisional segment may be finalized in place by a later record
        with the same seq; final segments are never revised. Segments from
        an older generation are dropped and counted.
        """
        if seg.generation != self.generation:
            self.stale_dropped += 1
            return "stale"
        existing = self._by_seq.get(seg.seq)
        if existing is not None:
            if existing.final:
                return "ignored"
            self._by_seq[seg.seq] = seg
            return "revised"
        self._by_seq[seg.seq] = seg
        return "appended"

    def window_text(self, end_ms: int, span_ms: int = DEFAULT_WINDOW_MS, floor_ms: int = 0) -> str:
        """Concatenated text of segments overlapping [max(floor, end-span), end).

        Provisional segments are included: the condenser is told to expect
        an uncorrected tail.
        """
        start_ms = max(floor_ms, end_ms - span_ms)
        texts = [
            seg.text
            for seg in self.segments()
            if seg.t_start_ms < end_ms and seg.t_end_ms > start_ms
        ]
        return join_segment_texts(texts)

    def build_tick_request(
        self, tick_ms: int = DEFAULT_TICK_MS, window_ms: int = DEFAULT_WINDOW_MS
    ) -> TickRequest:
        """The window for the tick that is due now; truncated at the capture
        origin so the first windows never reach before the session/section
        start."""
        if self.capture_origin_ms is None:
            raise ValueError("not capturing: no tick origin")
        window_end = self.capture_origin_ms + tick_ms * (self.tick_index + 1)
        window_start = max(self.capture_origin_ms, window_end - window_ms)
        return TickRequest(
            tick_index=self.tick_index,
            generation=self.generation,
            window_start_ms=window_start,
            window_end_ms=window_end,
            window_text=self.window_text(
                window_end, span_ms=window_ms, floor_ms=self.capture_origin_ms
            ),
        )

    def clear(self, now_ms: int) -> None:
        """Generation-fenced reset: content emptied, tick origin restarted."""
        self.generation += 1
        self._by_seq.clear()
        self.condensed_log.clear()
        self.framework_current = FrameworkRecord()
        self.framework_snapshots.clear()
        self.tick_index = 0
        self.section_origin_ms = now_ms
        if self.capturing:
            self.capture_origin_ms = now_ms
        self.notes.append(SessionNote("clear", now_ms))

    def start_capture(self, now_ms: int) -> None:
        self.capturing = True
        self.capture_origin_ms = now_ms
        self.section_origin_ms = now_ms
        self.tick_index = 0
        self.notes.append(SessionNote("start_capture", now_ms))

    def stop_capture(self, now_ms: int) -> None:
        self.capturing = False
        self.notes.append(SessionNote("stop_capture", now_ms))

    def snapshot(self, raw_tail: int = 20) -> dict:
        segs = self.segments()
        latest = self.condensed_log[-1] if self.condensed_log else None
        return {
            "session_id": self.session_id,
            "capturing": self.capturing,
            "mode": self.mode,
            "generation": self.generation,
            "tick_index": self.tick_index,
            "rsvp_rate": self.rsvp_rate,
            "appearance": dict(self.appearance),
            "stale_dropped": self.stale_dropped,
            "buffer_size": len(segs),
            "condensed_count": len(self.condensed_log),
            "raw_tail": [s.to_record() for s in segs[-raw_tail:]],
            "latest_condensed": condensed_payload(latest) if latest else None,
            "framework": {"fields": self.framework_current.to_dict()},
        }


def condensed_payload(update: CondensedUpdate) -> dict:
    return {
        "tick_index": update.tick_index,
        "text": update.text,
        "emojis": [
            {"meaning": tag.meaning.value, "symbol": tag.symbol} for tag in update.emojis
        ],
        "window_start_ms": update.window_start_ms,
        "window_end_ms": update.window_end_ms,
        "truncated": update.truncated,
        "degraded": update.degraded,
    }
