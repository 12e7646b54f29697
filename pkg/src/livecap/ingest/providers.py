"""Streaming speech-recognition provider interface and bundled mocks.

Providers follow a connect / send / receive / close lifecycle. receive() is
non-blocking: it returns the next pending TranscriptSegment, a ProviderIssue
(recoverable trouble), or None when nothing is ready. This keeps the whole
ingest path pollable from the deterministic scheduler; a live adapter would
pump its socket in the background and queue results the same way.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Protocol, runtime_checkable

from ..clock import Clock
from .chunker import AudioChunk, IngestError
from .segments import FixtureError, TranscriptSegment, segment_from_record


@dataclass(frozen=True)
class ProviderIssue:
    """A non-fatal provider condition surfaced to the pipeline."""

    message: str
    retriable: bool = False
    disconnect: bool = False


@runtime_checkable
class ASRProvider(Protocol):
    def connect(self, config: dict | None = None) -> None: ...
    def send(self, chunk: AudioChunk) -> None: ...
    def receive(self) -> TranscriptSegment | ProviderIssue | None: ...
    def close(self) -> None: ...


class EchoASRProvider:
    """Echoes each chunk's payload back as a final segment (UTF-8 decoded).

    Tests tag chunks by encoding text into the payload; the echo turns them
    into one final segment per chunk, timestamped at the chunk emit time.
    """

    def __init__(self) -> None:
        self._pending: list[TranscriptSegment] = []
        self._connected = False

    def connect(self, config: dict | None = None) -> None:
        self._connected = True

    def send(self, chunk: AudioChunk) -> None:
        if not self._connected:
            raise IngestError("echo provider not connected")
        text = chunk.data.decode("utf-8", errors="ignore").strip()
        if text:
            self._pending.append(
                TranscriptSegment(
                    seq=chunk.seq,
                    t_start_ms=chunk.emit_time_ms,
                    t_end_ms=chunk.emit_time_ms,
                    text=text,
                    final=True,
                )
            )

    def receive(self) -> TranscriptSegment | ProviderIssue | None:
        return self._pending.pop(0) if self._pending else None

    def close(self) -> None:
        self._connected = False


class ScriptedASRProvider:
    """Emits a scripted sequence of segments and injected faults.

    The script is a list of records: segment records (fixture shape, plus
    optional "arrive_ms" overriding when the result becomes available) and
    fault records {"error": msg, "retriable": bool, "disconnect": bool,
    "arrive_ms": int}. Items become available once the clock passes their
    arrival time; without a clock they are available immediately, in order.
    """

    def __init__(self, script: Iterable[dict], clock: Clock | None = None) -> None:
        self._clock = clock
        self._items: list[tuple[int, TranscriptSegment | ProviderIssue]] = []
        self._cursor = 0
        self._connected = False
        self._disconnected = False
        for idx, record in enumerate(script):
            where = f"script item {idx}"
            if "error" in record:
                issue = ProviderIssue(
                    message=str(record["error"]),
                    retriable=bool(record.get("retriable", False)),
                    disconnect=bool(record.get("disconnect", False)),
                )
                self._items.append((int(record.get("arrive_ms", 0)), issue))
            else:
                seg = segment_from_record(record, where)
                self._items.append((int(record.get("arrive_ms", seg.t_end_ms)), seg))

    @classmethod
    def from_file(cls, path: str | Path, clock: Clock | None = None) -> "ScriptedASRProvider":
        records = []
        path = Path(path)
        with path.open(encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    records.append(json.loads(line))
                except json.JSONDecodeError as exc:
                    raise FixtureError(f"{path.name}:{line_no}: invalid JSON: {exc.msg}") from exc
        return cls(records, clock)

    def connect(self, config: dict | None = None) -> None:
        self._connected = True

    def send(self, chunk: AudioChunk) -> None:
        if self._disconnected:
            raise IngestError("provider disconnected", retriable=True)

    def receive(self) -> TranscriptSegment | ProviderIssue | None:
        if self._disconnected or self._cursor >= len(self._items):
            return None
        arrive_ms, item = self._items[self._cursor]
        # After close the stream flushes regardless of arrival times.
        if self._connected and self._clock is not None and self._clock.now_ms() < arrive_ms:
            return None
        self._cursor += 1
        if isinstance(item, ProviderIssue) and item.disconnect:
            self._disconnected = True
        return item

    def close(self) -> None:
        self._connected = False


def transcribe(
    chunks: Iterable[AudioChunk], provider: ASRProvider
) -> Iterator[TranscriptSegment | ProviderIssue]:
    """Pump chunks through a provider, yielding results as they surface.

    Segments come out in nondecreasing t_start order for well-behaved
    providers; a disconnect issue ends the stream after it is yielded, with
    previously yielded segments retained by the consumer.
    """
    for chunk in chunks:
        try:
            provider.send(chunk)
        except IngestError as exc:
            yield ProviderIssue(message=str(exc), retriable=exc.retriable, disconnect=True)
            return
        for item in _drain(provider):
            yield item
            if isinstance(item, ProviderIssue) and item.disconnect:
                return
    provider.close()
    for item in _drain(provider):
        yield item
        if isinstance(item, ProviderIssue) and item.disconnect:
            return


def _drain(provider: ASRProvider) -> Iterator[TranscriptSegment | ProviderIssue]:
    while True:
        try:
            item = provider.receive()
        except (FixtureError, ValueError) as exc:
            # Malformed response: discard it, warn, keep the stream alive.
            yield ProviderIssue(message=f"malformed provider response: {exc}")
            continue
        if item is None:
            return
        yield item
