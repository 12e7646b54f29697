"""Session engine: single-writer orchestration of the caption pipeline.

Everything that mutates session state goes through this object on the
scheduler's thread of control: transcript arrivals, the 30-second tick,
summarizer completions (delivered as timed callbacks, which is how slow
providers are modelled deterministically), RSVP pacing, and operator
commands. Events flow out through subscribed listeners in a stable order.

Fencing: every provider call and segment is stamped with the generation it
was created under; a result whose generation no longer matches is dropped on
arrival. Condensed updates finalize strictly in tick order, and at most one
call per kind (condense / emoji / framework) is in flight at a time.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from datetime import datetime
from typing import Callable

from .. import rsvp
from ..framework import (
    FrameworkParseError,
    merge,
    parse_framework,
    record_with_provenance,
)
from ..ingest.providers import ProviderIssue
from ..ingest.segments import TranscriptSegment
from ..scheduler import PRIORITY_LATE, Handle, Scheduler
from ..summarize.condense import CondensedUpdate, enforce_limit, extractive_condense
from ..summarize.emoji import extract_emoji_tags
from ..summarize.prompts import PromptMessage, render_prompt
from ..summarize.providers import LLMProvider, LLMProviderError, provider_delay_ms
from .history import HistoryError, HistoryStore
from .state import MODES, SessionState, TickRequest, condensed_payload

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EngineConfig:
    chunk_bytes: int = 640
    interval_ms: int = 40
    tick_ms: int = 30_000
    window_ms: int = 40_000
    condensed_limit: int = 50
    rsvp_rate: float = 180.0
    framework_items: int = 10


@dataclass(frozen=True)
class SessionCommand:
    id: str
    kind: str
    args: dict = field(default_factory=dict)


@dataclass(frozen=True)
class EngineEvent:
    kind: str
    at_ms: int
    generation: int
    payload: dict


class SessionEngine:
    def __init__(
        self,
        scheduler: Scheduler,
        llm_provider: LLMProvider,
        config: EngineConfig | None = None,
        history_store: HistoryStore | None = None,
        session_id: str = "session",
        started_at: datetime | None = None,
    ) -> None:
        self.scheduler = scheduler
        self.clock = scheduler.clock
        self.provider = llm_provider
        self.config = config or EngineConfig()
        self.history = history_store
        kwargs = {"session_id": session_id, "rsvp_rate": self.config.rsvp_rate}
        if started_at is not None:
            kwargs["started_at"] = started_at
        self.state = SessionState(**kwargs)
        self.fenced_drops = 0

        self._listeners: list[Callable[[EngineEvent], None]] = []
        self._tick_handle: Handle | None = None

        self._condense_queue: list[TickRequest] = []
        self._condense_inflight = False
        self._emoji_queue: list[tuple[CondensedUpdate, list[PromptMessage]]] = []
        self._emoji_inflight = False
        self._pending_finalize: dict[int, CondensedUpdate] = {}
        self._skipped_ticks: set[int] = set()
        self._next_emit_tick = 0

        self._framework_dirty = False
        self._framework_inflight = False

        self._player: rsvp.RsvpPlayer | None = None
        self._player_tick = -1
        self._player_emitted = 0
        self._player_total = 0
        self._pump_handle: Handle | None = None

    # ── events out ──

    def subscribe(self, listener: Callable[[EngineEvent], None]) -> None:
        self._listeners.append(listener)

    def _emit(self, kind: str, payload: dict, generation: int | None = None) -> EngineEvent:
        event = EngineEvent(
            kind=kind,
            at_ms=self.clock.now_ms(),
            generation=self.state.generation if generation is None else generation,
            payload=payload,
        )
        for listener in self._listeners:
            listener(event)
        return event

    def _emit_error(self, code: str, message: str, ack_id: str | None = None) -> None:
        payload = {"code": code, "message": message}
        if ack_id is not None:
            payload["ack_id"] = ack_id
        self._emit("error", payload)

    def emit_snapshot(self, ack_id: str | None = None) -> EngineEvent:
        payload: dict = {"snapshot": self.state.snapshot()}
        if ack_id is not None:
            payload["ack_id"] = ack_id
        return self._emit("state", payload)

    # ── ingest in ──

    def ingest_segment(self, seg: TranscriptSegment) -> None:
        if not self.state.capturing:
            return
        outcome = self.state.append_segment(seg)
        if outcome == "appended":
            self._emit("segment", seg.to_record())
        elif outcome == "revised":
            self._emit("segment_revised", seg.to_record())

    def ingest_issue(self, issue: ProviderIssue) -> None:
        self._emit_error(
            "ingest_retriable" if issue.retriable else "ingest_failure", issue.message
        )

    def current_generation(self) -> int:
        return self.state.generation

    # ── commands ──

    def handle_command(self, cmd: SessionCommand) -> None:
        handler = getattr(self, f"_cmd_{cmd.kind}", None)
        if handler is None:
            self._emit_error("unknown_command", f"unknown command kind {cmd.kind!r}", cmd.id)
            return
        try:
            handler(cmd)
        except _CommandError as exc:
            self._emit_error(exc.code, str(exc), cmd.id)

    def _ack(self, cmd: SessionCommand) -> None:
        self.emit_snapshot(ack_id=cmd.id)

    def _cmd_start_capture(self, cmd: SessionCommand) -> None:
        if self.state.capturing:
            raise _CommandError("invalid_state", "capture already running")
        self.state.start_capture(self.clock.now_ms())
        self._next_emit_tick = 0
        self._schedule_tick()
        self._ack(cmd)

    def _cmd_stop_capture(self, cmd: SessionCommand) -> None:
        if not self.state.capturing:
            raise _CommandError("invalid_state", "capture not running")
        self.state.stop_capture(self.clock.now_ms())
        self._cancel_tick()
        self._ack(cmd)

    def _cmd_clear(self, cmd: SessionCommand) -> None:
        self.clear()
        self._ack(cmd)

    def _cmd_set_mode(self, cmd: SessionCommand) -> None:
        mode = cmd.args.get("mode")
        if mode not in MODES:
            raise _CommandError("bad_args", f"mode must be one of {MODES}, got {mode!r}")
        self.state.mode = mode
        self._ack(cmd)

    def _cmd_set_rsvp_rate(self, cmd: SessionCommand) -> None:
        rate = cmd.args.get("rate")
        if not isinstance(rate, (int, float)) or isinstance(rate, bool) or rate <= 0:
            raise _CommandError("bad_args", f"rate must be a positive number, got {rate!r}")
        self.state.rsvp_rate = float(rate)
        if self._player is not None:
            self._player.set_rate(self.clock.now_ms(), self.state.rsvp_rate)
            self._repump()
        self._ack(cmd)

    def _cmd_set_appearance(self, cmd: SessionCommand) -> None:
        prefs = cmd.args.get("prefs")
        if not isinstance(prefs, dict):
            raise _CommandError("bad_args", "prefs must be an object")
        # Opaque to the engine: stored and echoed, never interpreted.
        self.state.appearance.update(prefs)
        self._ack(cmd)

    def _cmd_pause_rsvp(self, cmd: SessionCommand) -> None:
        if self._player is None or self._player.paused or self._player.finished:
            raise _CommandError("invalid_state", "rsvp playback is not running")
        self._player.pause(self.clock.now_ms())
        self._cancel_pump()
        self._ack(cmd)

    def _cmd_resume_rsvp(self, cmd: SessionCommand) -> None:
        if self._player is None or not self._player.paused:
            raise _CommandError("invalid_state", "rsvp playback is not paused")
        self._player.resume(self.clock.now_ms())
        self._ack(cmd)
        self._pump_rsvp()

    def _cmd_list_history(self, cmd: SessionCommand) -> None:
        store = self._require_history()
        sessions = [
            {"record_id": e.record_id, "started_at": e.started_at.isoformat()}
            for e in store.list_records()
        ]
        self._emit("history", {"ack_id": cmd.id, "sessions": sessions})

    def _cmd_load_history(self, cmd: SessionCommand) -> None:
        store = self._require_history()
        record_id = cmd.args.get("record_id")
        if not isinstance(record_id, str):
            raise _CommandError("bad_args", "record_id must be a string")
        try:
            record = store.load(record_id)
        except HistoryError as exc:
            raise _CommandError("not_found", str(exc)) from exc
        self._emit(
            "history",
            {
                "ack_id": cmd.id,
                "record": {
                    "record_id": record.record_id,
                    "segments": [s.to_record() for s in record.segments],
                    "condensed": [condensed_payload(u) for u in record.condensed],
                    "frameworks": [{"fields": r.to_dict()} for r in record.frameworks],
                    "events": [
                        {"name": n.name, "at_ms": n.at_ms, "detail": n.detail}
                        for n in record.events
                    ],
                },
            },
        )

    def _require_history(self) -> HistoryStore:
        if self.history is None:
            raise _CommandError("invalid_state", "no history store configured")
        return self.history

    # ── clear / fencing ──

    def clear(self) -> None:
        """One-click reset: bump the generation and drop queued work. The
        summarizer restarts from fresh content; in-flight results carry the
        old generation and are fenced on arrival."""
        self.state.clear(self.clock.now_ms())
        self._condense_queue.clear()
        self._emoji_queue.clear()
        self._pending_finalize.clear()
        self._skipped_ticks.clear()
        self._next_emit_tick = 0
        self._framework_dirty = False
        self._stop_playback()
        if self.state.capturing:
            self._cancel_tick()
            self._schedule_tick()

    # ── ticking ──

    def _schedule_tick(self) -> None:
        if not self.state.capturing or self.state.capture_origin_ms is None:
            return
        due = self.state.capture_origin_ms + self.config.tick_ms * (self.state.tick_index + 1)
        self._tick_handle = self.scheduler.call_at(due, self._on_tick)

    def _cancel_tick(self) -> None:
        if self._tick_handle is not None:
            self._tick_handle.cancel()
            self._tick_handle = None

    def _on_tick(self) -> None:
        if not self.state.capturing:
            return
        req = self.state.build_tick_request(self.config.tick_ms, self.config.window_ms)
        self.state.tick_index += 1
        if req.window_text:
            self._condense_queue.append(req)
            self._maybe_start_condense()
        else:
            # Silent window: no condense job; later ticks must not wait on it.
            self._skipped_ticks.add(req.tick_index)
            self._drain_finalize()
        self._schedule_tick()

    # ── condense / emoji jobs ──

    def _maybe_start_condense(self) -> None:
        if self._condense_inflight or not self._condense_queue:
            return
        req = self._condense_queue.pop(0)
        dialogue = render_prompt("condense", [req.window_text])
        delay = provider_delay_ms(self.provider, dialogue)
        try:
            result: str | Exception = self.provider.complete(dialogue)
        except LLMProviderError as exc:
            result = exc
        self._condense_inflight = True
        self.scheduler.call_at(
            self.clock.now_ms() + delay, self._on_condense_done, req, result
        )

    def _on_condense_done(self, req: TickRequest, result: str | Exception) -> None:
        self._condense_inflight = False
        if req.generation != self.state.generation:
            self.fenced_drops += 1
            self._maybe_start_condense()
            return
        degraded = False
        text = result.strip() if isinstance(result, str) else ""
        if not text:
            text = extractive_condense(req.window_text, self.config.condensed_limit)
            degraded = True
        enforced, truncated = enforce_limit(text, self.config.condensed_limit)
        update = CondensedUpdate(
            tick_index=req.tick_index,
            generation=req.generation,
            text=enforced,
            window_start_ms=req.window_start_ms,
            window_end_ms=req.window_end_ms,
            truncated=truncated,
            degraded=degraded,
        )
        # The emoji turn continues the condense dialogue with the model's
        # actual (unenforced) reply.
        dialogue = [
            *render_prompt("condense", [req.window_text]),
            PromptMessage("model", text),
        ]
        self._emoji_queue.append((update, dialogue))
        self._maybe_start_emoji()
        self._maybe_start_condense()

    def _maybe_start_emoji(self) -> None:
        if self._emoji_inflight or not self._emoji_queue:
            return
        update, condense_dialogue = self._emoji_queue.pop(0)
        dialogue = render_prompt("emoji", condense_dialogue)
        delay = provider_delay_ms(self.provider, dialogue)
        try:
            result: str | Exception = self.provider.complete(dialogue)
        except LLMProviderError as exc:
            result = exc
        self._emoji_inflight = True
        self.scheduler.call_at(
            self.clock.now_ms() + delay, self._on_emoji_done, update, result
        )

    def _on_emoji_done(self, update: CondensedUpdate, result: str | Exception) -> None:
        self._emoji_inflight = False
        if update.generation != self.state.generation:
            self.fenced_drops += 1
            self._maybe_start_emoji()
            return
        update.emojis = extract_emoji_tags(result) if isinstance(result, str) else []
        self._pending_finalize[update.tick_index] = update
        self._drain_finalize()
        self._maybe_start_emoji()

    def _drain_finalize(self) -> None:
        while True:
            if self._next_emit_tick in self._skipped_ticks:
                self._skipped_ticks.discard(self._next_emit_tick)
                self._next_emit_tick += 1
                continue
            if self._next_emit_tick not in self._pending_finalize:
                return
            update = self._pending_finalize.pop(self._next_emit_tick)
            self._next_emit_tick += 1
            self.state.condensed_log.append(update)
            self._emit("condensed", condensed_payload(update))
            self._start_playback(update)
            self._framework_dirty = True
            self._maybe_start_framework()

    # ── framework job ──

    def _maybe_start_framework(self) -> None:
        if self._framework_inflight or not self._framework_dirty:
            return
        if not self.state.condensed_log:
            self._framework_dirty = False
            return
        self._framework_dirty = False
        items = [u.text for u in self.state.condensed_log[-self.config.framework_items :]]
        last_tick = self.state.condensed_log[-1].tick_index
        generation = self.state.generation
        dialogue = render_prompt("framework", items)
        delay = provider_delay_ms(self.provider, dialogue)
        try:
            result: str | Exception = self.provider.complete(dialogue)
        except LLMProviderError as exc:
            result = exc
        self._framework_inflight = True
        self.scheduler.call_at(
            self.clock.now_ms() + delay,
            self._on_framework_done,
            generation,
            last_tick,
            result,
        )

    def _on_framework_done(self, generation: int, last_tick: int, result: str | Exception) -> None:
        self._framework_inflight = False
        if generation != self.state.generation:
            self.fenced_drops += 1
            self._maybe_start_framework()
            return
        if isinstance(result, Exception):
            self._emit_error("framework_provider_failure", str(result))
            self._maybe_start_framework()
            return
        try:
            report = parse_framework(result)
        except FrameworkParseError as exc:
            self._emit_error("framework_parse_failure", str(exc))
            self._maybe_start_framework()
            return
        for warning in report.warnings:
            if warning.kind in ("stripped_fence", "unknown_line"):
                logger.debug("framework parse warning: %s", warning)
        record = record_with_provenance(report.record, last_tick)
        merged = merge(self.state.framework_current, record)
        self.state.framework_current = merged
        self.state.framework_snapshots.append(merged)
        self._emit(
            "framework",
            {"tick_index": last_tick, "fields": merged.to_dict()},
        )
        self._maybe_start_framework()

    # ── rsvp playback ──

    def _start_playback(self, update: CondensedUpdate) -> None:
        self._stop_playback()
        tokens = rsvp.tokenize(update.text)
        if not tokens:
            return
        now = self.clock.now_ms()
        self._player = rsvp.RsvpPlayer(rsvp.schedule(tokens, self.state.rsvp_rate, now))
        self._player_tick = update.tick_index
        self._player_emitted = 0
        self._player_total = len(tokens)
        self._pump_rsvp()

    def _stop_playback(self) -> None:
        self._cancel_pump()
        self._player = None

    def _cancel_pump(self) -> None:
        if self._pump_handle is not None:
            self._pump_handle.cancel()
            self._pump_handle = None

    def _repump(self) -> None:
        self._cancel_pump()
        self._pump_rsvp()

    def _pump_rsvp(self) -> None:
        self._pump_handle = None
        player = self._player
        if player is None:
            return
        for token in player.due_tokens(self.clock.now_ms()):
            self._emit(
                "rsvp_token",
                {
                    "text": token.text,
                    "index": self._player_emitted,
                    "count": self._player_total,
                    "tick_index": self._player_tick,
                    "duration_ms": token.duration_ms,
                },
            )
            self._player_emitted += 1
        if player.finished:
            self._player = None
            return
        next_onset = player.next_onset_ms()
        if next_onset is not None:
            self._pump_handle = self.scheduler.call_at(next_onset, self._pump_rsvp)

    # ── history ──

    def save_history(self) -> str | None:
        """Persist the current section; returns the record id, or None after
        emitting an error event if the store fails or is absent."""
        if self.history is None:
            self._emit_error("invalid_state", "no history store configured")
            return None
        try:
            record_id = self.history.save(self.state)
        except HistoryError as exc:
            self._emit_error("history_write_failure", str(exc))
            return None
        self._emit("history", {"saved": record_id})
        return record_id

    # ── replay support ──

    def schedule_stop(self, at_ms: int, save: bool = False) -> None:
        """Arrange capture stop at a time, after same-instant pipeline work."""

        def _stop() -> None:
            if self.state.capturing:
                self.state.stop_capture(self.clock.now_ms())
                self._cancel_tick()
                self.emit_snapshot()
            if save:
                self.save_history()

        self.scheduler.call_at(at_ms, _stop, priority=PRIORITY_LATE)


class _CommandError(Exception):
    def __init__(self, code: str, message: str) -> None:
        super().__init__(message)
        self.code = code
