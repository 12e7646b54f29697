"""Script-aware text helpers shared by windowing, condensation, and RSVP."""

from __future__ import annotations

import regex

CJK_CHAR = regex.compile(r"[\p{Han}\p{Hiragana}\p{Katakana}\p{Hangul}]")
GRAPHEME = regex.compile(r"\X")


def is_cjk_char(ch: str) -> bool:
    return bool(CJK_CHAR.match(ch))


def graphemes(text: str) -> list[str]:
    return GRAPHEME.findall(text)


def join_segment_texts(texts: list[str]) -> str:
    """Join with single spaces, except between CJK-adjacent boundaries.

    Writing systems without word spacing must not grow spurious spaces at
    segment seams; spaced scripts keep their word boundary.
    """
    out: list[str] = []
    for text in texts:
        if not text:
            continue
        if out and not (is_cjk_char(out[-1][-1]) and is_cjk_char(text[0])):
            out.append(" ")
        out.append(text)
    return "".join(out)
