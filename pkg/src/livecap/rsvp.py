"""Rapid serial visual presentation of condensed captions.

Chinese runs pace character by character, other scripts word by word, at a
uniform user-adjustable tokens-per-minute rate. The player is a pure state
machine over a clock: callers poll for due tokens and apply pause / resume /
rate changes; it never sleeps.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass

import regex

DEFAULT_RATE_TPM = 180

_GRAPHEME = regex.compile(r"\X")
_CJK = regex.compile(r"[\p{Han}\p{Hiragana}\p{Katakana}\p{Hangul}]")


@dataclass(frozen=True)
class TokenSpan:
    text: str
    start: int
    end: int


@dataclass(frozen=True)
class RsvpToken:
    text: str
    onset_ms: int
    duration_ms: int


def _is_cjk(cluster: str) -> bool:
    return bool(_CJK.match(cluster))


def _is_punct(cluster: str) -> bool:
    return unicodedata.category(cluster[0]).startswith("P")


def _is_letter(cluster: str) -> bool:
    return unicodedata.category(cluster[0]).startswith("L")


def token_spans(text: str) -> list[TokenSpan]:
    """Segment into display tokens, keeping source positions for reconstruction.

    CJK runs yield one token per grapheme cluster; other runs split on
    whitespace; punctuation attaches to the token before it. A lone letter
    glued to a following CJK character stays with it (T恤, U盘, X光).
    """
    spans: list[TokenSpan] = []
    cur_start: int | None = None  # open non-CJK word run
    cur_end = 0
    cur_clusters = 0
    cur_all_letters = True

    def close_run() -> None:
        nonlocal cur_start
        if cur_start is not None:
            spans.append(TokenSpan(text[cur_start:cur_end], cur_start, cur_end))
            cur_start = None

    for m in _GRAPHEME.finditer(text):
        cluster = m.group()
        start, end = m.span()
        if cluster.isspace():
            close_run()
            continue
        if _is_cjk(cluster):
            if (
                cur_start is not None
                and cur_clusters == 1
                and cur_all_letters
                and cur_end == start
            ):
                # Single-letter prefix of a CJK word joins the character.
                spans.append(TokenSpan(text[cur_start:end], cur_start, end))
                cur_start = None
            else:
                close_run()
                spans.append(TokenSpan(cluster, start, end))
            continue
        if _is_punct(cluster) and cur_start is None:
            if spans and spans[-1].end == start:
                prev = spans.pop()
                spans.append(TokenSpan(text[prev.start:end], prev.start, end))
                continue
            # No adjacent predecessor: open a run so it rides the next word.
        if cur_start is None:
            cur_start = start
            cur_clusters = 0
            cur_all_letters = True
        cur_end = end
        cur_clusters += 1
        cur_all_letters = cur_all_letters and _is_letter(cluster)
    close_run()
    return spans


def tokenize(text: str) -> list[str]:
    return [span.text for span in token_spans(text)]


def token_duration_ms(rate_tpm: float) -> int:
    if rate_tpm <= 0:
        raise ValueError(f"rate must be positive, got {rate_tpm}")
    return round(60000 / rate_tpm)


def schedule(tokens: list[str], rate_tpm: float, start_ms: int = 0) -> list[RsvpToken]:
    """Uniform pacing: duration = round(60000/rate) ms per token."""
    duration = token_duration_ms(rate_tpm)
    return [
        RsvpToken(text=tok, onset_ms=start_ms + i * duration, duration_ms=duration)
        for i, tok in enumerate(tokens)
    ]


class RsvpPlayer:
    """Plays a schedule on a clock with pause/resume and live rate changes.

    Every token is emitted exactly once, in order, regardless of how the
    controls interleave. Pausing shifts all unshown onsets by the paused
    duration; a rate change re-spaces the unshown tokens from the last shown
    one at the new cadence (never scheduling into the past).
    """

    def __init__(self, tokens: list[RsvpToken]) -> None:
        self._tokens = list(tokens)
        self._pos = 0
        self._paused_at: int | None = None
        self._last_shown: RsvpToken | None = None

    @property
    def paused(self) -> bool:
        return self._paused_at is not None

    @property
    def finished(self) -> bool:
        return self._pos >= len(self._tokens)

    @property
    def remaining(self) -> int:
        return len(self._tokens) - self._pos

    def due_tokens(self, now_ms: int) -> list[RsvpToken]:
        """Advance past every unshown token with onset <= now and return them."""
        if self.paused:
            return []
        due: list[RsvpToken] = []
        while self._pos < len(self._tokens) and self._tokens[self._pos].onset_ms <= now_ms:
            tok = self._tokens[self._pos]
            due.append(tok)
            self._last_shown = tok
            self._pos += 1
        return due

    def next_onset_ms(self) -> int | None:
        if self.paused or self.finished:
            return None
        return self._tokens[self._pos].onset_ms

    def pause(self, now_ms: int) -> None:
        if self.paused:
            raise ValueError("already paused")
        self._paused_at = now_ms

    def resume(self, now_ms: int) -> None:
        if not self.paused:
            raise ValueError("not paused")
        shift = now_ms - self._paused_at  # type: ignore[operator]
        self._paused_at = None
        if shift <= 0:
            return
        self._shift_unshown(shift)

    def set_rate(self, now_ms: int, rate_tpm: float) -> None:
        duration = token_duration_ms(rate_tpm)
        if self.finished:
            return
        if self.paused:
            # Keep the next onset; the resume shift covers the pause gap.
            first_onset = self._tokens[self._pos].onset_ms
        elif self._last_shown is not None:
            first_onset = max(now_ms, self._last_shown.onset_ms + duration)
        else:
            first_onset = max(now_ms, self._tokens[self._pos].onset_ms)
        for offset, idx in enumerate(range(self._pos, len(self._tokens))):
            old = self._tokens[idx]
            self._tokens[idx] = RsvpToken(
                text=old.text,
                onset_ms=first_onset + offset * duration,
                duration_ms=duration,
            )

    def _shift_unshown(self, shift_ms: int) -> None:
        for idx in range(self._pos, len(self._tokens)):
            old = self._tokens[idx]
            self._tokens[idx] = RsvpToken(
                text=old.text,
                onset_ms=old.onset_ms + shift_ms,
                duration_ms=old.duration_ms,
            )
