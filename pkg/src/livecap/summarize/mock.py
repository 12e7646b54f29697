"""Deterministic offline summarizer.

Answers all three call kinds from fixed rules so whole sessions replay
byte-identically without network access:

* condense — the extractive rule (shared with the degraded-mode fallback).
* emoji — glyphs chosen by keyword patterns over the window and reply.
* framework — labelled Chinese field lines filled from a keyword table;
  unmatched fields emit the literal null the output contract requires.

The keyword table is data (field, regex pattern, optional literal value), so
product vocabularies can be swapped per fixture via a JSON file.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

import regex

from .condense import extractive_condense
from .prompts import PromptMessage, dialogue_kind

_FRAMEWORK_LABELS = (
    ("product", "商品"),
    ("category", "类别"),
    ("promotional_policy", "促销政策"),
    ("free_shipping", "是否包邮"),
    ("seven_day_return", "7 天无理由退货"),
    ("price", "价格"),
    ("after_sales", "售后服务"),
    ("product_description", "产品介绍"),
    ("user_experience", "使用体验"),
    ("user_manual", "使用说明书"),
)

# field, pattern, literal value (None = captured group 1, else whole match).
DEFAULT_KEYWORD_TABLE: list[dict] = [
    {"field": "product", "pattern": r"(纯棉T恤|蓝牙耳机|乳胶床垫|不锈钢保温杯|牛仔裤)"},
    {"field": "category", "pattern": r"T恤|牛仔裤|卫衣", "value": "服装"},
    {"field": "category", "pattern": r"耳机|手机|充电", "value": "数码"},
    {"field": "category", "pattern": r"床垫|枕头|被子", "value": "家居"},
    {"field": "category", "pattern": r"保温杯|水杯", "value": "日用品"},
    {"field": "promotional_policy", "pattern": r"(原价\s*[0-9.]+\s*元?[，,、]?\s*现价\s*[0-9.]+\s*元?)"},
    {"field": "promotional_policy", "pattern": r"(买[一二三两\d]+送[一二三两\d]+)"},
    {"field": "promotional_policy", "pattern": r"([0-9.]+\s*折)"},
    {"field": "free_shipping", "pattern": r"不包邮", "value": "否"},
    {"field": "free_shipping", "pattern": r"包邮", "value": "是"},
    {"field": "seven_day_return", "pattern": r"不支持\s*7?\s*七?天?无理由", "value": "否"},
    {"field": "seven_day_return", "pattern": r"7\s*天无理由退货|七天无理由|无理由退换", "value": "支持"},
    {"field": "price", "pattern": r"(?:现价|只要|到手价|秒杀价)\s*([0-9]+(?:\.[0-9]+)?)\s*元?"},
    {"field": "price", "pattern": r"([0-9]+(?:\.[0-9]+)?)\s*元"},
    {"field": "after_sales", "pattern": r"(全额退款|无条件退换|质保[一二三\d]+年|售后无忧)"},
    {"field": "product_description", "pattern": r"(百分百纯棉面料|高品质纯棉|亲肤透气|主动降噪)"},
    {"field": "user_experience", "pattern": r"(穿着舒适|佩戴舒适|透气不闷)"},
    {"field": "user_manual", "pattern": r"(冷水机洗|冷水手洗|不可漂白|阴干)"},
]

_EMOJI_RULES: list[tuple[str, str]] = [
    (r"[0-9０-９]+(?:\.[0-9０-９]+)?\s*元|价格|现价|原价|多少钱", "💰"),
    (r"包邮|优惠|促销|折|券|活动", "🏷️"),
    (r"推荐|必入|闭眼买", "👉"),
    (r"秒杀|抢购|抽奖|限时", "🕒"),
    (r"仅剩|最后|马上结束|倒计时", "⌚"),
    (r"新品|上新|新款|首发", "🆕"),
    (r"细节|展示|看一下这个", "🔍"),
    (r"感谢|谢谢|下播", "👏"),
]


class DeterministicMockProvider:
    """Offline provider with fixed latency per call kind (defaults 0 ms)."""

    def __init__(
        self,
        keyword_table: Sequence[dict] | str | Path | None = None,
        delays_ms: dict[str, int] | None = None,
        condense_limit: int = 50,
    ) -> None:
        if keyword_table is None:
            table = DEFAULT_KEYWORD_TABLE
        elif isinstance(keyword_table, (str, Path)):
            table = json.loads(Path(keyword_table).read_text(encoding="utf-8"))
        else:
            table = list(keyword_table)
        self._rules = [
            (rule["field"], regex.compile(rule["pattern"]), rule.get("value"))
            for rule in table
        ]
        self._delays = dict(delays_ms or {})
        self._condense_limit = condense_limit

    def delay_ms_for(self, dialogue: Sequence[PromptMessage]) -> int:
        return int(self._delays.get(dialogue_kind(dialogue), 0))

    def complete(
        self, dialogue: Sequence[PromptMessage], deadline_ms: int | None = None
    ) -> str:
        kind = dialogue_kind(dialogue)
        if kind == "condense":
            return extractive_condense(dialogue[-1].text, self._condense_limit)
        if kind == "emoji":
            # Scan the raw window and the condensed reply from the dialogue.
            source = "\n".join(m.text for m in dialogue[1:-1] if m.role in ("user", "model"))
            return self._emoji_response(source)
        return self._framework_response(dialogue[-1].text)

    def _emoji_response(self, source: str) -> str:
        glyphs: list[str] = []
        for pattern, glyph in _EMOJI_RULES:
            if glyph not in glyphs and regex.search(pattern, source):
                glyphs.append(glyph)
        if not glyphs:
            return "没有找到相关的 Emoji。"
        return " ".join(glyphs) + "\n以上表情符号对应主播正在介绍的内容。"

    def _framework_response(self, items_text: str) -> str:
        values: dict[str, str] = {}
        for fld, pattern, literal in self._rules:
            if fld in values:
                continue
            m = pattern.search(items_text)
            if m is None:
                continue
            if literal is not None:
                values[fld] = literal
            else:
                values[fld] = m.group(1) if m.groups() else m.group(0)
        lines = [
            f"{label}: {values.get(fld, 'null')}" for fld, label in _FRAMEWORK_LABELS
        ]
        return "\n".join(lines)
