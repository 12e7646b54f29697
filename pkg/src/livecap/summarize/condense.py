"""Condensed caption production: limit enforcement and the extractive rule.

The length limit counts grapheme clusters when the text is CJK-dominant and
whitespace words otherwise (the deployed prompt says 50 字; Latin text gets
50 words). The extractive condenser keeps clauses that carry numbers,
currency marks, or sales keywords, in input order — it doubles as the
offline mock summarizer and the degraded-mode fallback, so tests and
production share one deterministic rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import regex

from .prompts import FRAMEWORK_MAX_ITEMS, PromptMessage, render_prompt
from .providers import LLMProvider, LLMProviderError

DEFAULT_LIMIT = 50

_CJK_CHAR = regex.compile(r"[\p{Han}\p{Hiragana}\p{Katakana}\p{Hangul}]")
_WORD_CHAR = regex.compile(r"[\p{L}\p{N}]")
_GRAPHEME = regex.compile(r"\X")
# Dots and colons stay inside numbers ("9.9", "1:30"); elsewhere they split.
_CLAUSE_SEP = regex.compile(r"[，。！？；、,!?;\s]+|[.:：](?![0-9０-９])")

_SALES_KEYWORDS = (
    "包邮",
    "退",
    "价",
    "折",
    "赠",
    "shipping",
    "return",
    "price",
    "discount",
    "gift",
)
_CURRENCY_MARKS = ("元", "¥", "￥", "$", "cny", "块")
_DIGIT = regex.compile(r"[0-9０-９]")


@dataclass
class CondensedUpdate:
    """One 30-second-tick product: condensed text plus emoji tags."""

    tick_index: int
    generation: int
    text: str
    emojis: list = field(default_factory=list)
    window_start_ms: int = 0
    window_end_ms: int = 0
    truncated: bool = False
    degraded: bool = False


def is_cjk_dominant(text: str) -> bool:
    cjk = len(_CJK_CHAR.findall(text))
    other = sum(1 for m in _WORD_CHAR.finditer(text) if not _CJK_CHAR.match(m.group()))
    return cjk >= other and cjk > 0


def text_length(text: str) -> int:
    """Grapheme clusters for CJK-dominant text, whitespace words otherwise."""
    if is_cjk_dominant(text):
        return len(_GRAPHEME.findall(text))
    return len(text.split())


def enforce_limit(text: str, limit: int = DEFAULT_LIMIT) -> tuple[str, bool]:
    """Trim and cut at the last grapheme/word boundary within the limit.

    Returns (text, truncated).
    """
    text = text.strip()
    if not text:
        return "", False
    if is_cjk_dominant(text):
        clusters = _GRAPHEME.findall(text)
        if len(clusters) <= limit:
            return text, False
        return "".join(clusters[:limit]).rstrip(), True
    words = text.split()
    if len(words) <= limit:
        return " ".join(words), False
    return " ".join(words[:limit]), True


def extractive_condense(window_text: str, limit: int = DEFAULT_LIMIT) -> str:
    """Keep number/currency/keyword-bearing clauses, in input order, until
    the limit; clauses are never split unless the first one alone overflows."""
    clauses = [c for c in _CLAUSE_SEP.split(window_text) if c]
    salient = [c for c in clauses if _clause_is_salient(c)]
    if not salient:
        salient = clauses[:1]  # nothing salient: fall back to the opening clause
    kept: list[str] = []
    for clause in salient:
        if text_length(" ".join([*kept, clause])) > limit:
            break
        kept.append(clause)
    if not kept and salient:
        return enforce_limit(salient[0], limit)[0]
    return " ".join(kept)


def _clause_is_salient(clause: str) -> bool:
    low = clause.casefold()
    if _DIGIT.search(clause):
        return True
    if any(mark in low for mark in _CURRENCY_MARKS):
        return True
    return any(key in low for key in _SALES_KEYWORDS)


def condense(
    provider: LLMProvider,
    window_text: str,
    limit: int = DEFAULT_LIMIT,
    tick_index: int = 0,
    generation: int = 0,
    window_start_ms: int = 0,
    window_end_ms: int = 0,
) -> CondensedUpdate:
    """One condense turn against a provider, with fallback and enforcement.

    Provider failure or an empty reply degrades to the extractive rule; an
    over-long reply is truncated and flagged. The window text must be
    nonempty (empty windows produce no condense job at all).
    """
    if not window_text.strip():
        raise ValueError("condense requires a nonempty window text")
    degraded = False
    try:
        response = provider.complete(render_prompt("condense", [window_text])).strip()
    except LLMProviderError:
        response = ""
    if not response:
        response = extractive_condense(window_text, limit)
        degraded = True
    text, truncated = enforce_limit(response, limit)
    return CondensedUpdate(
        tick_index=tick_index,
        generation=generation,
        text=text,
        window_start_ms=window_start_ms,
        window_end_ms=window_end_ms,
        truncated=truncated,
        degraded=degraded,
    )


def condense_dialogue(window_text: str, response_text: str) -> list[PromptMessage]:
    """The completed condense exchange, as the emoji turn expects it."""
    return [*render_prompt("condense", [window_text]), PromptMessage("model", response_text)]


def summarize_framework(
    provider: LLMProvider, items: Sequence[str], deadline_ms: int | None = None
) -> str:
    """One framework turn: raw provider text for the framework parser.

    Items are condensed texts in ascending tick order; when more than ten
    have accumulated, the most recent ten are used. Provider failures
    propagate so the caller can leave its current record unchanged.
    """
    if not items:
        raise ValueError("summarize_framework requires at least one item")
    window = list(items)[-FRAMEWORK_MAX_ITEMS:]
    return provider.complete(render_prompt("framework", window), deadline_ms)
