"""Ingest drivers: feed an engine from a fixture or a chunked audio source.

Drivers stamp each segment with the session generation at delivery time, so
speech arriving after a clear joins the new generation while anything
emitted earlier is fenced out by the state layer.
"""

from __future__ import annotations

from typing import BinaryIO, Iterable, Iterator

from ..ingest.chunker import AudioChunk, IngestError, chunk_audio
from ..ingest.providers import ASRProvider, ProviderIssue
from ..ingest.segments import FixtureError, TranscriptSegment
from ..scheduler import Scheduler
from .engine import SessionEngine


class ReplaySource:
    """Delivers fixture segments when the clock reaches their t_start_ms.

    File order breaks same-instant ties, so a provisional record and its
    finalization replay in the order they were captured.
    """

    def __init__(
        self, scheduler: Scheduler, engine: SessionEngine, segments: Iterable[TranscriptSegment]
    ) -> None:
        self._scheduler = scheduler
        self._engine = engine
        self._segments = list(segments)

    @property
    def end_ms(self) -> int:
        return max((s.t_end_ms for s in self._segments), default=0)

    def start(self) -> None:
        for seg in self._segments:
            self._scheduler.call_at(seg.t_start_ms, self._deliver, seg)

    def _deliver(self, seg: TranscriptSegment) -> None:
        self._engine.ingest_segment(
            seg.with_generation(self._engine.current_generation())
        )


class ChunkedAudioSource:
    """Paces chunk sends every interval_ms and pumps provider results."""

    def __init__(
        self,
        scheduler: Scheduler,
        engine: SessionEngine,
        audio: bytes | BinaryIO | Iterable[bytes],
        provider: ASRProvider,
        chunk_bytes: int = 640,
        interval_ms: int = 40,
    ) -> None:
        self._scheduler = scheduler
        self._engine = engine
        self._provider = provider
        self._chunks: Iterator[AudioChunk] = chunk_audio(
            audio, chunk_bytes, interval_ms, scheduler.clock
        )
        self._stopped = False

    def start(self) -> None:
        self._provider.connect()
        self._schedule_next()

    def stop(self) -> None:
        self._stopped = True

    def _schedule_next(self) -> None:
        if self._stopped:
            return
        try:
            chunk = next(self._chunks)
        except StopIteration:
            self._finish()
            return
        except IngestError as exc:
            self._engine.ingest_issue(
                ProviderIssue(message=str(exc), retriable=exc.retriable, disconnect=True)
            )
            return
        self._scheduler.call_at(chunk.emit_time_ms, self._send, chunk)

    def _send(self, chunk: AudioChunk) -> None:
        if self._stopped:
            return
        try:
            self._provider.send(chunk)
        except IngestError as exc:
            self._engine.ingest_issue(
                ProviderIssue(message=str(exc), retriable=exc.retriable, disconnect=True)
            )
            self._stopped = True
            return
        if self._drain():
            self._schedule_next()

    def _finish(self) -> None:
        self._provider.close()
        self._drain()

    def _drain(self) -> bool:
        """Deliver pending provider output; False when the stream died."""
        while True:
            try:
                item = self._provider.receive()
            except (FixtureError, ValueError) as exc:
                self._engine.ingest_issue(
                    ProviderIssue(message=f"malformed provider response: {exc}")
                )
                continue
            if item is None:
                return True
            if isinstance(item, ProviderIssue):
                self._engine.ingest_issue(item)
                if item.disconnect:
                    self._stopped = True
                    return False
                continue
            self._engine.ingest_segment(
                item.with_generation(self._engine.current_generation())
            )
