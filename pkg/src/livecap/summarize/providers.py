"""Summarizer provider interface plus scripted and cassette implementations.

complete() is synchronous; a provider may additionally advertise a delivery
delay via delay_ms_for(), which the session engine uses to schedule when the
result re-enters the pipeline (that is how slow-provider interleavings are
reproduced deterministically on a virtual clock).
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Protocol, Sequence, runtime_checkable

from .prompts import PromptMessage, dialogue_kind


class LLMProviderError(RuntimeError):
    """Provider call failed (timeout, disconnect, malformed reply)."""


@runtime_checkable
class LLMProvider(Protocol):
    def complete(
        self, dialogue: Sequence[PromptMessage], deadline_ms: int | None = None
    ) -> str: ...


def provider_delay_ms(provider: LLMProvider, dialogue: Sequence[PromptMessage]) -> int:
    delay_fn = getattr(provider, "delay_ms_for", None)
    return int(delay_fn(dialogue)) if delay_fn is not None else 0


def dialogue_key(dialogue: Sequence[PromptMessage]) -> str:
    payload = json.dumps(
        [[m.role, m.text] for m in dialogue], ensure_ascii=False, separators=(",", ":")
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class ScriptedLLMProvider:
    """Replays canned responses per call kind, with optional per-entry delay
    and error injection. Used for fault and interleaving tests.

    script: {"condense": [entry, ...], "emoji": [...], "framework": [...]}
    entry: {"text": str} | {"error": str}, optional "delay_ms": int.
    An exhausted queue raises unless a "default" entry is configured.
    """

    def __init__(self, script: dict[str, list[dict]], default: dict | None = None) -> None:
        self._queues = {kind: list(entries) for kind, entries in script.items()}
        self._default = default

    def _peek(self, dialogue: Sequence[PromptMessage]) -> dict:
        kind = dialogue_kind(dialogue)
        queue = self._queues.get(kind)
        if queue:
            return queue[0]
        if self._default is not None:
            return self._default
        raise LLMProviderError(f"scripted provider has no response left for {kind!r}")

    def delay_ms_for(self, dialogue: Sequence[PromptMessage]) -> int:
        try:
            return int(self._peek(dialogue).get("delay_ms", 0))
        except LLMProviderError:
            return 0

    def complete(
        self, dialogue: Sequence[PromptMessage], deadline_ms: int | None = None
    ) -> str:
        entry = self._peek(dialogue)
        queue = self._queues.get(dialogue_kind(dialogue))
        if queue and queue[0] is entry:
            queue.pop(0)
        if "error" in entry:
            raise LLMProviderError(entry["error"])
        return entry["text"]


class CassetteError(LLMProviderError):
    """No recorded response for this dialogue."""


class CassetteProvider:
    """Record/replay wrapper keyed by a hash of the full dialogue.

    Replay mode (no inner provider) answers only from the cassette file and
    fails on unseen dialogues; record mode forwards to the inner provider
    and appends the exchange. Cassette lines: {"key", "kind", "response"}.
    """

    def __init__(self, path: str | Path, inner: LLMProvider | None = None) -> None:
        self._path = Path(path)
        self._inner = inner
        self._responses: dict[str, str] = {}
        if self._path.exists():
            for line_no, line in enumerate(
                self._path.read_text(encoding="utf-8").splitlines(), start=1
            ):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                    self._responses[rec["key"]] = rec["response"]
                except (json.JSONDecodeError, KeyError, TypeError) as exc:
                    raise CassetteError(f"{self._path}:{line_no}: bad cassette line") from exc
        elif inner is None:
            raise CassetteError(f"cassette not found: {self._path}")

    def complete(
        self, dialogue: Sequence[PromptMessage], deadline_ms: int | None = None
    ) -> str:
        key = dialogue_key(dialogue)
        if key in self._responses:
            return self._responses[key]
        if self._inner is None:
            raise CassetteError(f"no recorded response for dialogue key {key[:12]}…")
        response = self._inner.complete(dialogue, deadline_ms)
        self._responses[key] = response
        with self._path.open("a", encoding="utf-8") as fh:
            fh.write(
                json.dumps(
                    {"key": key, "kind": dialogue_kind(dialogue), "response": response},
                    ensure_ascii=False,
                )
                + "\n"
            )
        return response
