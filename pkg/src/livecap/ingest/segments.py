"""Transcript segments and the line-delimited fixture codec.

A segment is a timestamped piece of recognized speech. A provisional
segment (final=false) models the recognizer's still-uncorrected tail and
may be superseded by exactly one later record with the same seq and
final=true; final segments are never revised.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable


class FixtureError(ValueError):
    """Malformed fixture content; message names the offending line."""


@dataclass(frozen=True)
class TranscriptSegment:
    seq: int
    t_start_ms: int
    t_end_ms: int
    text: str
    final: bool
    generation: int = 0

    def __post_init__(self) -> None:
        if self.t_start_ms > self.t_end_ms:
            raise ValueError(
                f"segment seq={self.seq}: t_start_ms {self.t_start_ms} > t_end_ms {self.t_end_ms}"
            )

    def with_generation(self, generation: int) -> "TranscriptSegment":
        return replace(self, generation=generation)

    def to_record(self) -> dict:
        return {
            "seq": self.seq,
            "t_start_ms": self.t_start_ms,
            "t_end_ms": self.t_end_ms,
            "text": self.text,
            "final": self.final,
        }


_REQUIRED = {"seq": int, "t_start_ms": int, "t_end_ms": int, "text": str, "final": bool}


def segment_from_record(record: dict, where: str = "record") -> TranscriptSegment:
    for key, typ in _REQUIRED.items():
        if key not in record:
            raise FixtureError(f"{where}: missing field {key!r}")
        value = record[key]
        if typ is int and isinstance(value, bool) or not isinstance(value, typ):
            raise FixtureError(f"{where}: field {key!r} must be {typ.__name__}")
    try:
        return TranscriptSegment(
            seq=record["seq"],
            t_start_ms=record["t_start_ms"],
            t_end_ms=record["t_end_ms"],
            text=record["text"],
            final=record["final"],
        )
    except ValueError as exc:
        raise FixtureError(f"{where}: {exc}") from exc


def load_fixture(path: str | Path) -> list[TranscriptSegment]:
    """Parse a transcript fixture; raises FixtureError with the line number."""
    path = Path(path)
    segments: list[TranscriptSegment] = []
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            where = f"{path.name}:{line_no}"
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FixtureError(f"{where}: invalid JSON: {exc.msg}") from exc
            if not isinstance(record, dict):
                raise FixtureError(f"{where}: expected an object")
            segments.append(segment_from_record(record, where))
    return segments


def dump_fixture(segments: Iterable[TranscriptSegment], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for seg in segments:
            fh.write(json.dumps(seg.to_record(), ensure_ascii=False) + "\n")
