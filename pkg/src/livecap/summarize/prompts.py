"""Prompt templates and dialogue assembly for the three summarizer calls.

The templates are the deployed Chinese production prompts and must stay
byte-stable: the cassette provider keys recordings on the full dialogue, and
the condensation length rule ("不超过 50 字") is enforced downstream.

Dialogue shapes:
  condense   [system: CONDENSE_TEMPLATE, user: <40s window text>]
  emoji      the completed condense dialogue + [user: EMOJI_TEMPLATE]
  framework  [system: FRAMEWORK_TEMPLATE, user: <1..10 condensed texts,
             newline-joined, ascending tick order>]
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

ROLE_SYSTEM = "system"
ROLE_USER = "user"
ROLE_MODEL = "model"

FRAMEWORK_MAX_ITEMS = 10


@dataclass(frozen=True)
class PromptMessage:
    role: str  # system | user | model
    text: str

    def __post_init__(self) -> None:
        if self.role not in (ROLE_SYSTEM, ROLE_USER, ROLE_MODEL):
            raise ValueError(f"bad role: {self.role}")


CONDENSE_TEMPLATE = """\
能力与角色: 你是一个直播带货内容处理助手, 帮助听障人士客户了解商品信息。
背景信息: 你的原始输入是直播带货主播的语音转文字内容。你的任务是接收并浓缩输入的录音转文字内容。注意, 语音转录内容可能有重复、遗漏、识别错误的情况, 特别是靠近末尾 10 秒长度的字符，因为它尚未在语音模型纠正。你需要仔细分析上下文，理解主播的信息。如果无法理解，请忽略这些信息。
指令: 你的任务是接收并浓缩输入的录音转文字内容，输出不超过 50 字。提取最关键的信息。主播会有重复对话，这些应该忽略。仅提取文件中的信息，不需要扩写。
输出风格: 请你以主播的口吻输出。
下面是输入:"""

EMOJI_TEMPLATE = """\
下面是相关的 Emoji。找到和主播内容相关的 Emoji。
👉: 主播特别推荐该产品。
👎: 主播不推荐该产品。
★: 用于表示产品评级，可以根据星级数量显示产品质量。
🕒: 表示有较短限时（5 分钟内）的活动（如抢购、抽奖）正在进行。
⌚: 强调时间紧迫，即将结束。
🌟: 用于强调产品的特殊功能或亮点。
🔍: 表示主播正在详细展示产品细节。
📺: 表示主播正在介绍新产品。
🆕: 强调产品是新上市的。
💰: 主播正在介绍价格。
🏷️: 表示有促销政策。
👉: 表示有优惠券或折扣可用。
🏷️: 显示具体的折扣价。
👋: 表示直播即将结束，主播正在致谢。
👏: 表示感谢观众参与。
输出时，列举所有符合要求的 Emoji。有强调时，可以输出复数个 Emoji。解释理由时，直接解释，不输出 Emoji。同时，不需要总结。"""

FRAMEWORK_TEMPLATE = """\
你是一个直播带货内容处理助手，帮助听障人士客户了解商品信息。要求如下：
0. 你的原始输入是经过总结的直播带货主播的语音转文字内容。你的输入会包含最多 10 条内容，按时间升序排序，每条间隔 30 秒。
1. 你的任务是接收并提取关键词。以下格式输出（未提及的部分，请用 null 代替）：
商品: ...
类别: ...
促销政策: ...
是否包邮: ...
7 天无理由退货: ...
价格: ...
售后服务: ...
产品介绍: ...
使用体验: ...
使用说明书: ...
2. 注意，你必须严格按格式输出。不需要任何解释，禁止输出头尾的“`”。一旦格式解析错误，你会被立刻杀死。
3. 语音转录内容可能有重复、遗漏、识别错误的情况，特别是靠近末尾 10 秒长度的字符，因为它尚未在语音模型纠正。你需要仔细分析上下文，理解主播的信息。
4. 提取最关键的信息。主播会有很多故事、语气词、无效对话，这些应该忽略。
5. 如果有实用信息，你需要以主播的视角浓缩文字。
6. 浓缩的文字一段一句，语言简练，只保留最关键信息。
7. 记住，输出我要求的，不需要输出“`”。否则你会杀死的。这无法解析。开始处理。"""


class PromptContractError(ValueError):
    """Inputs violate a dialogue-shape precondition."""


def render_prompt(kind: str, inputs: Sequence[str] | Sequence[PromptMessage]) -> list[PromptMessage]:
    """Build the exact dialogue for one summarizer call.

    condense: inputs = [window_text]
    emoji: inputs = the completed condense dialogue (PromptMessages)
    framework: inputs = 1..10 condensed texts in ascending tick order
    """
    if kind == "condense":
        if len(inputs) != 1 or not isinstance(inputs[0], str):
            raise PromptContractError("condense takes exactly one window text")
        return [
            PromptMessage(ROLE_SYSTEM, CONDENSE_TEMPLATE),
            PromptMessage(ROLE_USER, inputs[0]),
        ]
    if kind == "emoji":
        dialogue = list(inputs)
        if not dialogue or not all(isinstance(m, PromptMessage) for m in dialogue):
            raise PromptContractError("emoji takes the prior condense dialogue")
        if dialogue[-1].role != ROLE_MODEL:
            raise PromptContractError("condense dialogue must end with the model reply")
        return [*dialogue, PromptMessage(ROLE_USER, EMOJI_TEMPLATE)]
    if kind == "framework":
        items = list(inputs)
        if not 1 <= len(items) <= FRAMEWORK_MAX_ITEMS:
            raise PromptContractError(
                f"framework takes 1..{FRAMEWORK_MAX_ITEMS} items, got {len(items)}"
            )
        if not all(isinstance(item, str) for item in items):
            raise PromptContractError("framework items must be strings")
        return [
            PromptMessage(ROLE_SYSTEM, FRAMEWORK_TEMPLATE),
            PromptMessage(ROLE_USER, "\n".join(items)),
        ]
    raise PromptContractError(f"unknown prompt kind: {kind}")


def dialogue_kind(dialogue: Iterable[PromptMessage]) -> str:
    """Identify which call a dialogue belongs to (used by mock providers)."""
    msgs = list(dialogue)
    if msgs and msgs[-1].role == ROLE_USER and msgs[-1].text == EMOJI_TEMPLATE:
        return "emoji"
    if msgs and msgs[0].role == ROLE_SYSTEM and msgs[0].text == FRAMEWORK_TEMPLATE:
        return "framework"
    return "condense"
