"""Structured sales-summary records.

The summarizer is instructed to answer with exactly ten labelled lines
("Product: ...", "价格: ..." etc., with the literal token "null" for fields
the host never mentioned). Models violate that format often enough that the
parser here recovers from code fences, reordered lines, missing lines, and
garbage prefixes, reporting each repair as a warning instead of failing.

Also defines the accumulation merge for successive records and the
field-level discrepancy classifier used by the evaluation harness.
"""

from __future__ import annotations

import enum
import unicodedata
from dataclasses import dataclass, field, fields, replace

__all__ = [
    "FIELD_NAMES",
    "CANONICAL_LABELS",
    "FrameworkRecord",
    "ParseReport",
    "ParseWarning",
    "FrameworkParseError",
    "DiscrepancyReason",
    "FieldAnnotation",
    "parse_framework",
    "render_framework",
    "merge",
    "classify_discrepancy",
    "normalize_value",
]

# Attribute order is the canonical output order.
FIELD_NAMES: tuple[str, ...] = (
    "product",
    "category",
    "promotional_policy",
    "free_shipping",
    "seven_day_return",
    "price",
    "after_sales",
    "product_description",
    "user_experience",
    "user_manual",
)

CANONICAL_LABELS: dict[str, str] = {
    "product": "Product",
    "category": "Category",
    "promotional_policy": "Promotional Policy",
    "free_shipping": "Free Shipping",
    "seven_day_return": "7-Day No Reason Return",
    "price": "Price",
    "after_sales": "After-Sales Service",
    "product_description": "Product Description",
    "user_experience": "User Experience",
    "user_manual": "User Manual",
}

# Accepted label spellings per field: the Chinese labels the prompt demands,
# the canonical English labels, and English variants models actually emit.
_LABEL_ALIASES: dict[str, tuple[str, ...]] = {
    "product": ("商品", "Product"),
    "category": ("类别", "Category"),
    "promotional_policy": ("促销政策", "Promotional Policy", "Promotion Policy"),
    "free_shipping": ("是否包邮", "Free Shipping"),
    "seven_day_return": (
        "7 天无理由退货",
        "7天无理由退货",
        "7-Day No Reason Return",
        "7-day Unconditional Return",
        "7 Day No Reason Return",
    ),
    "price": ("价格", "Price"),
    "after_sales": ("售后服务", "After-Sales Service", "After Sales Service"),
    "product_description": ("产品介绍", "Product Description"),
    "user_experience": ("使用体验", "User Experience", "Usage Experience"),
    "user_manual": ("使用说明书", "User Manual"),
}


def _fold_label(label: str) -> str:
    folded = unicodedata.normalize("NFKC", label).casefold()
    return "".join(ch for ch in folded if not ch.isspace() and ch != "-")


_LABEL_LOOKUP: dict[str, str] = {
    _fold_label(alias): name
    for name, aliases in _LABEL_ALIASES.items()
    for alias in aliases
}


@dataclass
class FrameworkRecord:
    """One structured sales summary; None means the field was not given."""

    product: str | None = None
    category: str | None = None
    promotional_policy: str | None = None
    free_shipping: str | None = None
    seven_day_return: str | None = None
    price: str | None = None
    after_sales: str | None = None
    product_description: str | None = None
    user_experience: str | None = None
    user_manual: str | None = None
    # Range of tick indices that contributed, unioned on merge.
    provenance: tuple[int, int] | None = field(default=None, compare=False)

    def get(self, name: str) -> str | None:
        if name not in FIELD_NAMES:
            raise KeyError(name)
        return getattr(self, name)

    def present_fields(self) -> list[str]:
        return [name for name in FIELD_NAMES if getattr(self, name) is not None]

    def is_empty(self) -> bool:
        return not self.present_fields()

    def to_dict(self) -> dict[str, str | None]:
        return {name: getattr(self, name) for name in FIELD_NAMES}

    @classmethod
    def from_dict(cls, data: dict[str, str | None]) -> "FrameworkRecord":
        unknown = set(data) - set(FIELD_NAMES)
        if unknown:
            raise ValueError(f"unknown framework fields: {sorted(unknown)}")
        return cls(**{name: data.get(name) for name in FIELD_NAMES})


@dataclass(frozen=True)
class ParseWarning:
    kind: str  # unknown_line | missing_field | stripped_fence | reordered_field
    line_no: int  # 1-based line in the original text; 0 when not line-specific
    detail: str = ""


@dataclass
class ParseReport:
    record: FrameworkRecord
    warnings: list[ParseWarning]

    def warning_kinds(self) -> set[str]:
        return {w.kind for w in self.warnings}


class FrameworkParseError(ValueError):
    """Raised when no recognizable field line exists in the text."""


def _is_fence_line(stripped: str) -> bool:
    if not stripped.startswith("`"):
        return False
    body = stripped.lstrip("`")
    # ``` or ```json etc.; also a stray run of backticks on its own line.
    return body == "" or (stripped.startswith("```") and body.isalnum())


def parse_framework(text: str) -> ParseReport:
    """Parse labelled-line output into a FrameworkRecord.

    Tolerates code fences (warned), unknown lines (warned), any field order
    (reorder warned), and both Chinese and English labels. A field given as
    the literal "null" (or an empty value) parses as absent without warning;
    a field whose line is missing entirely gets a missing_field warning.
    Raises FrameworkParseError when not a single field line is recognized.
    """
    warnings: list[ParseWarning] = []
    values: dict[str, str | None] = {}
    seen_order: list[str] = []

    lines = text.splitlines()
    for idx, raw in enumerate(lines, start=1):
        stripped = raw.strip()
        if not stripped:
            continue
        if _is_fence_line(stripped):
            warnings.append(ParseWarning("stripped_fence", idx, stripped))
            continue
        body = stripped.lstrip("-*• ").strip()
        name, value = _match_field_line(body)
        if name is None:
            warnings.append(ParseWarning("unknown_line", idx, stripped))
            continue
        values[name] = value  # duplicate lines: the latest wins
        seen_order.append(name)

    if not seen_order:
        raise FrameworkParseError("no recognizable framework field lines")

    first_seen: list[str] = []
    for name in seen_order:
        if name not in first_seen:
            first_seen.append(name)
    expected = [name for name in FIELD_NAMES if name in first_seen]
    if first_seen != expected:
        warnings.append(
            ParseWarning("reordered_field", 0, ",".join(first_seen))
        )

    for name in FIELD_NAMES:
        if name not in values:
            warnings.append(ParseWarning("missing_field", 0, name))

    record = FrameworkRecord(**{name: values.get(name) for name in FIELD_NAMES})
    return ParseReport(record=record, warnings=warnings)


def _match_field_line(line: str) -> tuple[str | None, str | None]:
    for sep in (":", "："):
        head, found, tail = line.partition(sep)
        if not found:
            continue
        name = _LABEL_LOOKUP.get(_fold_label(head))
        if name is None:
            continue
        value = tail.strip()
        if value == "" or value.casefold() == "null":
            return name, None
        return name, value
    return None, None


def render_framework(record: FrameworkRecord) -> str:
    """Canonical ten-line form: English labels, ": ", "null" for absent."""
    out = []
    for name in FIELD_NAMES:
        value = getattr(record, name)
        out.append(f"{CANONICAL_LABELS[name]}: {value if value is not None else 'null'}")
    return "\n".join(out)


def merge(prev: FrameworkRecord, nxt: FrameworkRecord) -> FrameworkRecord:
    """Accumulate: a present field in `nxt` wins, absent preserves `prev`."""
    merged = {
        name: getattr(nxt, name) if getattr(nxt, name) is not None else getattr(prev, name)
        for name in FIELD_NAMES
    }
    spans = [s for s in (prev.provenance, nxt.provenance) if s is not None]
    provenance = (min(s[0] for s in spans), max(s[1] for s in spans)) if spans else None
    return FrameworkRecord(**merged, provenance=provenance)


class DiscrepancyReason(str, enum.Enum):
    INCORRECT_INFORMATION = "incorrect_information"
    CONFUSED_INFORMATION = "confused_information"
    MISSING_INFORMATION = "missing_information"
    FABRICATED_INFORMATION = "fabricated_information"
    INTERPRET_OUT_OF_CONTEXT = "interpret_out_of_context"


@dataclass(frozen=True)
class FieldAnnotation:
    """Evaluator hints for one field comparison.

    other_products: names of other items mentioned in the stream; an actual
    value naming one of them is old/new mix-up, not a plain mistake.
    subcategory_values: actual values flagged as a sub-variant of the
    expected entity (partially correct).
    accepted_paraphrases: alternative spellings counted as a match.
    """

    other_products: tuple[str, ...] = ()
    subcategory_values: tuple[str, ...] = ()
    accepted_paraphrases: tuple[str, ...] = ()


def normalize_value(value: str) -> str:
    """Comparison form: NFKC (folds full-width digits), casefold, collapsed
    whitespace."""
    folded = unicodedata.normalize("NFKC", value).casefold()
    return " ".join(folded.split())


def classify_discrepancy(
    expected: str | None,
    actual: str | None,
    context: FieldAnnotation | None = None,
) -> DiscrepancyReason | None:
    """Compare one field value against ground truth; None means match."""
    ctx = context or FieldAnnotation()
    if expected is None and actual is None:
        return None
    if actual is not None:
        norm_actual = normalize_value(actual)
        if expected is not None and norm_actual == normalize_value(expected):
            return None
        if any(norm_actual == normalize_value(p) for p in ctx.accepted_paraphrases):
            return None
    if expected is not None and actual is None:
        return DiscrepancyReason.MISSING_INFORMATION
    if expected is None and actual is not None:
        return DiscrepancyReason.FABRICATED_INFORMATION
    assert expected is not None and actual is not None
    norm_actual = normalize_value(actual)
    for other in ctx.other_products:
        norm_other = normalize_value(other)
        if norm_other and norm_other in norm_actual:
            return DiscrepancyReason.CONFUSED_INFORMATION
    if any(norm_actual == normalize_value(v) for v in ctx.subcategory_values):
        return DiscrepancyReason.INTERPRET_OUT_OF_CONTEXT
    return DiscrepancyReason.INCORRECT_INFORMATION


def empty_record() -> FrameworkRecord:
    return FrameworkRecord()


def record_with_provenance(record: FrameworkRecord, tick_index: int) -> FrameworkRecord:
    return replace(record, provenance=(tick_index, tick_index))


# FIELD_NAMES must track the dataclass attribute order.
assert FIELD_NAMES == tuple(f.name for f in fields(FrameworkRecord))[:-1]
