"""Fixed-size audio chunking at a fixed cadence.

Raw-byte slicing only: the upload contract is chunk_bytes every interval_ms
(defaults 640 B / 40 ms), and no PCM format is assumed. A trailing short
chunk is flushed at end of stream rather than zero-padded so that chunk
payloads always reassemble to the source exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import BinaryIO, Iterable, Iterator

from ..clock import Clock

DEFAULT_CHUNK_BYTES = 640
DEFAULT_INTERVAL_MS = 40


class IngestError(RuntimeError):
    def __init__(self, message: str, retriable: bool = False) -> None:
        super().__init__(message)
        self.retriable = retriable


@dataclass(frozen=True)
class AudioChunk:
    seq: int
    data: bytes
    emit_time_ms: int


def chunk_audio(
    source: bytes | BinaryIO | Iterable[bytes],
    chunk_bytes: int = DEFAULT_CHUNK_BYTES,
    interval_ms: int = DEFAULT_INTERVAL_MS,
    clock: Clock | None = None,
) -> Iterator[AudioChunk]:
    """Slice a byte source into timed chunks.

    Emit times are origin + seq * interval_ms where origin is the clock's
    time when iteration starts (0 without a clock); the consumer paces
    actual sends. Read failures surface as IngestError.
    """
    if chunk_bytes <= 0:
        raise ValueError(f"chunk_bytes must be positive, got {chunk_bytes}")
    if interval_ms <= 0:
        raise ValueError(f"interval_ms must be positive, got {interval_ms}")

    origin: int | None = None
    pending = bytearray()
    seq = 0

    def emit(data: bytes) -> AudioChunk:
        nonlocal seq
        chunk = AudioChunk(seq=seq, data=data, emit_time_ms=origin + seq * interval_ms)
        seq += 1
        return chunk

    for block in _iter_blocks(source, chunk_bytes):
        if origin is None:
            origin = clock.now_ms() if clock is not None else 0
        pending.extend(block)
        while len(pending) >= chunk_bytes:
            yield emit(bytes(pending[:chunk_bytes]))
            del pending[:chunk_bytes]
    if pending:
        yield emit(bytes(pending))


def _iter_blocks(
    source: bytes | BinaryIO | Iterable[bytes], block_size: int
) -> Iterator[bytes]:
    if isinstance(source, (bytes, bytearray)):
        yield bytes(source)
        return
    read = getattr(source, "read", None)
    if read is not None:
        while True:
            try:
                block = read(block_size)
            except OSError as exc:
                raise IngestError(f"audio source read failed: {exc}") from exc
            if not block:
                return
            yield block
    try:
        for block in source:
            yield bytes(block)
    except OSError as exc:
        raise IngestError(f"audio source read failed: {exc}") from exc
