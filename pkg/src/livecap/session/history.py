"""History persistence: one line-delimited file per usage section.

A section starts at capture start or at a clear; its file is named by the
section's wall-clock start time (ISO-8601 made colon-free). Saving the same
section twice overwrites, so a save-and-keep-going session stays one record.
Records carry a "kind" discriminator: segment | condensed | framework |
event.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path

from ..framework import FrameworkRecord
from ..ingest.segments import TranscriptSegment, segment_from_record
from ..summarize.condense import CondensedUpdate
from ..summarize.emoji import SYMBOL_FOR, EmojiMeaning, EmojiTag
from .state import SessionNote, SessionState


class HistoryError(RuntimeError):
    pass


@dataclass(frozen=True)
class HistoryEntry:
    record_id: str
    started_at: datetime


@dataclass
class HistoryRecord:
    record_id: str
    segments: list[TranscriptSegment] = field(default_factory=list)
    condensed: list[CondensedUpdate] = field(default_factory=list)
    frameworks: list[FrameworkRecord] = field(default_factory=list)
    events: list[SessionNote] = field(default_factory=list)


def _record_id_for(started_at: datetime, section_origin_ms: int) -> str:
    section_start = started_at + timedelta(milliseconds=section_origin_ms)
    millis = section_start.microsecond // 1000
    return section_start.strftime("%Y-%m-%dT%H-%M-%S") + f"-{millis:03d}"


class HistoryStore:
    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def save(self, state: SessionState) -> str:
        """Persist the current section's content; returns the record id."""
        record_id = _record_id_for(state.started_at, state.section_origin_ms)
        path = self.root / f"{record_id}.jsonl"
        lines: list[str] = []
        for seg in state.segments():
            lines.append(
                json.dumps(
                    {"kind": "segment", **seg.to_record(), "generation": seg.generation},
                    ensure_ascii=False,
                )
            )
        for update in state.condensed_log:
            lines.append(
                json.dumps(
                    {
                        "kind": "condensed",
                        "tick_index": update.tick_index,
                        "generation": update.generation,
                        "text": update.text,
                        "emojis": [tag.meaning.value for tag in update.emojis],
                        "window_start_ms": update.window_start_ms,
                        "window_end_ms": update.window_end_ms,
                        "truncated": update.truncated,
                        "degraded": update.degraded,
                    },
                    ensure_ascii=False,
                )
            )
        for rec in state.framework_snapshots:
            lines.append(
                json.dumps(
                    {
                        "kind": "framework",
                        "fields": rec.to_dict(),
                        "provenance": list(rec.provenance) if rec.provenance else None,
                    },
                    ensure_ascii=False,
                )
            )
        for note in state.notes:
            lines.append(
                json.dumps(
                    {"kind": "event", "name": note.name, "at_ms": note.at_ms, "detail": note.detail},
                    ensure_ascii=False,
                )
            )
        try:
            path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
        except OSError as exc:
            raise HistoryError(f"history write failed: {exc}") from exc
        return record_id

    def list_records(self) -> list[HistoryEntry]:
        entries = []
        for path in sorted(self.root.glob("*.jsonl")):
            entries.append(HistoryEntry(record_id=path.stem, started_at=_parse_id(path.stem)))
        entries.sort(key=lambda e: e.started_at)
        return entries

    def load(self, record_id: str) -> HistoryRecord:
        path = self.root / f"{record_id}.jsonl"
        if not path.exists():
            raise HistoryError(f"no history record {record_id!r}")
        record = HistoryRecord(record_id=record_id)
        for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
                kind = data.pop("kind")
            except (json.JSONDecodeError, KeyError) as exc:
                raise HistoryError(f"{path.name}:{line_no}: bad history line") from exc
            if kind == "segment":
                generation = data.pop("generation", 0)
                record.segments.append(
                    segment_from_record(data, f"{path.name}:{line_no}").with_generation(generation)
                )
            elif kind == "condensed":
                record.condensed.append(
                    CondensedUpdate(
                        tick_index=data["tick_index"],
                        generation=data.get("generation", 0),
                        text=data["text"],
                        emojis=[
                            EmojiTag(meaning=EmojiMeaning(m), symbol=SYMBOL_FOR[EmojiMeaning(m)])
                            for m in data.get("emojis", [])
                        ],
                        window_start_ms=data.get("window_start_ms", 0),
                        window_end_ms=data.get("window_end_ms", 0),
                        truncated=data.get("truncated", False),
                        degraded=data.get("degraded", False),
                    )
                )
            elif kind == "framework":
                provenance = data.get("provenance")
                rec = FrameworkRecord.from_dict(data["fields"])
                rec.provenance = tuple(provenance) if provenance else None
                record.frameworks.append(rec)
            elif kind == "event":
                record.events.append(
                    SessionNote(name=data["name"], at_ms=data["at_ms"], detail=data.get("detail", ""))
                )
            else:
                raise HistoryError(f"{path.name}:{line_no}: unknown record kind {kind!r}")
        return record


def _parse_id(record_id: str) -> datetime:
    head, _, millis = record_id.rpartition("-")
    try:
        base = datetime.strptime(head, "%Y-%m-%dT%H-%M-%S").replace(tzinfo=timezone.utc)
        return base + timedelta(milliseconds=int(millis))
    except ValueError as exc:
        raise HistoryError(f"unrecognized history record name {record_id!r}") from exc
