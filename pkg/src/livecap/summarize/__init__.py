from .condense import (
    CondensedUpdate,
    condense,
    enforce_limit,
    extractive_condense,
    is_cjk_dominant,
    summarize_framework,
)
from .emoji import EmojiMeaning, EmojiTag, extract_emoji_tags, select_emojis
from .prompts import PromptMessage, render_prompt
from .mock import DeterministicMockProvider
from .providers import (
    CassetteError,
    CassetteProvider,
    LLMProvider,
    LLMProviderError,
    ScriptedLLMProvider,
    provider_delay_ms,
)

__all__ = [
    "CondensedUpdate",
    "condense",
    "enforce_limit",
    "extractive_condense",
    "is_cjk_dominant",
    "summarize_framework",
    "EmojiMeaning",
    "EmojiTag",
    "extract_emoji_tags",
    "select_emojis",
    "PromptMessage",
    "render_prompt",
    "LLMProvider",
    "LLMProviderError",
    "DeterministicMockProvider",
    "ScriptedLLMProvider",
    "CassetteProvider",
    "CassetteError",
    "provider_delay_ms",
]
