from .chunker import (
    DEFAULT_CHUNK_BYTES,
    DEFAULT_INTERVAL_MS,
    AudioChunk,
    IngestError,
    chunk_audio,
)
from .providers import (
    ASRProvider,
    EchoASRProvider,
    ProviderIssue,
    ScriptedASRProvider,
    transcribe,
)
from .segments import FixtureError, TranscriptSegment, dump_fixture, load_fixture

__all__ = [
    "AudioChunk",
    "IngestError",
    "chunk_audio",
    "DEFAULT_CHUNK_BYTES",
    "DEFAULT_INTERVAL_MS",
    "ASRProvider",
    "EchoASRProvider",
    "ScriptedASRProvider",
    "ProviderIssue",
    "transcribe",
    "TranscriptSegment",
    "FixtureError",
    "load_fixture",
    "dump_fixture",
]
