"""Emoji tag vocabulary and response scanning.

Fifteen meanings map to display glyphs; the table reuses some glyphs
(👉, 🏷️, 🕒 each stand for more than one meaning in the prompt list), so a
scanned glyph resolves to its first-listed meaning. The model is asked to
answer with glyphs plus free-text reasoning; we extract by scanning for
vocabulary glyphs rather than parsing the explanation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from .prompts import PromptMessage, render_prompt
from .providers import LLMProvider, LLMProviderError


class EmojiMeaning(str, enum.Enum):
    RECOMMEND = "recommend"
    NOT_RECOMMEND = "not_recommend"
    RATING = "rating"
    FLASH_EVENT = "flash_event"
    URGENCY = "urgency"
    HIGHLIGHT = "highlight"
    DETAIL_DEMO = "detail_demo"
    NEW_PRODUCT_INTRO = "new_product_intro"
    NEWLY_LAUNCHED = "newly_launched"
    PRICING = "pricing"
    PROMOTION = "promotion"
    COUPON = "coupon"
    DISCOUNTED_PRICE = "discounted_price"
    ENDING = "ending"
    GRATITUDE = "gratitude"


# meaning -> display glyph, in prompt-list order. Shared glyphs are intended.
EMOJI_TABLE: tuple[tuple[EmojiMeaning, str], ...] = (
    (EmojiMeaning.RECOMMEND, "👉"),
    (EmojiMeaning.NOT_RECOMMEND, "👎"),
    (EmojiMeaning.RATING, "★"),
    (EmojiMeaning.FLASH_EVENT, "🕒"),
    (EmojiMeaning.URGENCY, "🕒"),
    (EmojiMeaning.HIGHLIGHT, "🌟"),
    (EmojiMeaning.DETAIL_DEMO, "🔍"),
    (EmojiMeaning.NEW_PRODUCT_INTRO, "📺"),
    (EmojiMeaning.NEWLY_LAUNCHED, "🆕"),
    (EmojiMeaning.PRICING, "💰"),
    (EmojiMeaning.PROMOTION, "👉"),
    (EmojiMeaning.COUPON, "🏷️"),
    (EmojiMeaning.DISCOUNTED_PRICE, "🏷️"),
    (EmojiMeaning.ENDING, "👋"),
    (EmojiMeaning.GRATITUDE, "🙏"),
)

SYMBOL_FOR: dict[EmojiMeaning, str] = {meaning: glyph for meaning, glyph in EMOJI_TABLE}

# Scan vocabulary: each glyph resolves to its first-listed meaning, plus the
# variant glyphs the Chinese prompt list uses for urgency and gratitude.
_SCAN_MAP: dict[str, EmojiMeaning] = {}
for _meaning, _glyph in EMOJI_TABLE:
    _SCAN_MAP.setdefault(_glyph, _meaning)
_SCAN_MAP.setdefault("⌚", EmojiMeaning.URGENCY)
_SCAN_MAP.setdefault("👏", EmojiMeaning.GRATITUDE)
# Variation-selector-free forms of glyphs that carry VS16.
for _glyph, _meaning in list(_SCAN_MAP.items()):
    bare = _glyph.replace("️", "")
    if bare != _glyph:
        _SCAN_MAP.setdefault(bare, _meaning)

_SCAN_GLYPHS = sorted(_SCAN_MAP, key=len, reverse=True)


@dataclass(frozen=True)
class EmojiTag:
    meaning: EmojiMeaning
    symbol: str


def extract_emoji_tags(text: str) -> list[EmojiTag]:
    """Scan free text for vocabulary glyphs, first-occurrence order,
    de-duplicated by meaning. Unknown glyphs are ignored."""
    tags: list[EmojiTag] = []
    seen: set[EmojiMeaning] = set()
    i = 0
    while i < len(text):
        for glyph in _SCAN_GLYPHS:
            if text.startswith(glyph, i):
                meaning = _SCAN_MAP[glyph]
                if meaning not in seen:
                    seen.add(meaning)
                    tags.append(EmojiTag(meaning=meaning, symbol=SYMBOL_FOR[meaning]))
                i += len(glyph)
                break
        else:
            i += 1
    return tags


def select_emojis(provider: LLMProvider, dialogue: Sequence[PromptMessage]) -> list[EmojiTag]:
    """Run the emoji follow-up turn. Failures yield an empty list: tags are
    decorative and must never block the caption stream."""
    try:
        response = provider.complete(render_prompt("emoji", list(dialogue)))
    except LLMProviderError:
        return []
    return extract_emoji_tags(response)
