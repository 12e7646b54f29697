"""Reliability scoring: 10 samples per session, 1 point when both the
condensed caption and the framework are accurate at that sample.

A session is sampled once per tick for five minutes (ten 30-second samples).
Sample k is the condensed update of tick k plus the framework state after
incorporating ticks <= k; a missing condensed update fails both checks at
that index. The condensed check requires every annotated fact to occur
(normalized substring) in the condensed text; the framework check requires
every expected-present field to match under the discrepancy classifier.
Expected-absent fields are not scored, but any fabricated value found on
them is still recorded in the discrepancy list.

Aggregation mirrors a platform x product-category score table: per-cell
means, row and column averages, and the grand average over all cells,
rounded to two decimals.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .framework import (
    FIELD_NAMES,
    DiscrepancyReason,
    FieldAnnotation,
    FrameworkRecord,
    classify_discrepancy,
    normalize_value,
    parse_framework,
)

SAMPLES_PER_SESSION = 10


class EvalError(ValueError):
    pass


@dataclass(frozen=True)
class AnnotatedSample:
    sample_index: int
    expected_framework: FrameworkRecord
    required_condensed_facts: tuple[str, ...] = ()
    other_products: tuple[str, ...] = ()
    subcategory_flags: tuple[tuple[str, str], ...] = ()
    accepted_paraphrases: tuple[tuple[str, str], ...] = ()

    def annotation_for(self, field_name: str) -> FieldAnnotation:
        return FieldAnnotation(
            other_products=self.other_products,
            subcategory_values=tuple(
                value for fld, value in self.subcategory_flags if fld == field_name
            ),
            accepted_paraphrases=tuple(
                value for fld, value in self.accepted_paraphrases if fld == field_name
            ),
        )


@dataclass(frozen=True)
class SessionAnnotations:
    session_id: str
    platform: str
    category: str
    samples: tuple[AnnotatedSample, ...]


@dataclass(frozen=True)
class ObservedSample:
    condensed_text: str | None
    framework: FrameworkRecord


@dataclass(frozen=True)
class SampleResult:
    sample_index: int
    point: int
    condensed_ok: bool
    framework_ok: bool
    discrepancies: tuple[tuple[str, DiscrepancyReason], ...] = ()


@dataclass(frozen=True)
class SessionScore:
    session_id: str
    platform: str
    category: str
    per_sample: tuple[SampleResult, ...]
    total: int


def score_session(
    annotations: SessionAnnotations,
    observed: Mapping[int, ObservedSample],
) -> SessionScore:
    """Score ten aligned samples; each scores 1 only when both checks pass."""
    if len(annotations.samples) != SAMPLES_PER_SESSION:
        raise EvalError(
            f"session {annotations.session_id!r}: expected {SAMPLES_PER_SESSION} "
            f"annotated samples, got {len(annotations.samples)}"
        )
    results: list[SampleResult] = []
    for sample in sorted(annotations.samples, key=lambda s: s.sample_index):
        obs = observed.get(sample.sample_index)
        if obs is None or obs.condensed_text is None:
            results.append(
                SampleResult(sample.sample_index, 0, condensed_ok=False, framework_ok=False)
            )
            continue
        condensed_ok = _facts_present(sample.required_condensed_facts, obs.condensed_text)
        discrepancies: list[tuple[str, DiscrepancyReason]] = []
        framework_ok = True
        for name in FIELD_NAMES:
            expected = sample.expected_framework.get(name)
            actual = obs.framework.get(name)
            reason = classify_discrepancy(expected, actual, sample.annotation_for(name))
            if reason is None:
                continue
            discrepancies.append((name, reason))
            if expected is not None:
                framework_ok = False
        point = 1 if condensed_ok and framework_ok else 0
        results.append(
            SampleResult(
                sample.sample_index,
                point,
                condensed_ok=condensed_ok,
                framework_ok=framework_ok,
                discrepancies=tuple(discrepancies),
            )
        )
    total = sum(r.point for r in results)
    return SessionScore(
        session_id=annotations.session_id,
        platform=annotations.platform,
        category=annotations.category,
        per_sample=tuple(results),
        total=total,
    )


def _facts_present(facts: Sequence[str], text: str) -> bool:
    norm_text = normalize_value(text)
    return all(normalize_value(fact) in norm_text for fact in facts)


# ── aggregation ──


@dataclass
class ReportTable:
    platforms: list[str]
    categories: list[str]
    cells: dict[tuple[str, str], float]
    row_averages: dict[str, float]
    column_averages: dict[str, float]
    grand_average: float | None

    def is_empty(self) -> bool:
        return not self.cells


def aggregate(scores: Iterable[SessionScore | tuple[str, str, float]]) -> ReportTable:
    """Platform x category table of mean totals with row/column/grand
    averages (2 decimals). Accepts SessionScores or (platform, category,
    total) triples; input order never affects the result."""
    by_cell: dict[tuple[str, str], list[float]] = {}
    for item in scores:
        if isinstance(item, SessionScore):
            key, value = (item.platform, item.category), float(item.total)
        else:
            platform, category, total = item
            key, value = (platform, category), float(total)
        by_cell.setdefault(key, []).append(value)

    platforms = sorted({p for p, _ in by_cell})
    categories = sorted({c for _, c in by_cell})
    cells = {key: round(sum(vals) / len(vals), 2) for key, vals in by_cell.items()}

    def mean(values: list[float]) -> float:
        return round(sum(values) / len(values), 2)

    row_averages = {
        p: mean([cells[(p, c)] for c in categories if (p, c) in cells]) for p in platforms
    }
    column_averages = {
        c: mean([cells[(p, c)] for p in platforms if (p, c) in cells]) for c in categories
    }
    grand = mean(list(cells.values())) if cells else None
    return ReportTable(
        platforms=platforms,
        categories=categories,
        cells=cells,
        row_averages=row_averages,
        column_averages=column_averages,
        grand_average=grand,
    )


def render_report(table: ReportTable) -> str:
    """Aligned plain-text score table."""
    if table.is_empty():
        return "(no scores)"
    headers = ["Platform", *table.categories, "Avg"]
    rows: list[list[str]] = []
    for platform in table.platforms:
        row = [platform]
        for category in table.categories:
            value = table.cells.get((platform, category))
            row.append(_fmt(value) if value is not None else "-")
        row.append(_fmt(table.row_averages[platform]))
        rows.append(row)
    footer = ["Avg"]
    for category in table.categories:
        footer.append(_fmt(table.column_averages[category]))
    footer.append(_fmt(table.grand_average))
    rows.append(footer)

    widths = [max(len(r[i]) for r in [headers, *rows]) for i in range(len(headers))]
    lines = [_pad_row(headers, widths)]
    lines.append("  ".join("-" * w for w in widths))
    lines.extend(_pad_row(row, widths) for row in rows)
    return "\n".join(lines)


def _fmt(value: float | None) -> str:
    return f"{value:.2f}" if value is not None else "-"


def _pad_row(row: list[str], widths: list[int]) -> str:
    return "  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip()


def report_records(table: ReportTable, scores: Sequence[SessionScore]) -> list[dict]:
    """Machine-readable report: one line per session plus summary lines."""
    records: list[dict] = []
    for score in sorted(scores, key=lambda s: (s.platform, s.category, s.session_id)):
        records.append(
            {
                "kind": "session",
                "session_id": score.session_id,
                "platform": score.platform,
                "category": score.category,
                "total": score.total,
                "per_sample": [
                    {
                        "sample_index": r.sample_index,
                        "point": r.point,
                        "condensed_ok": r.condensed_ok,
                        "framework_ok": r.framework_ok,
                        "discrepancies": [
                            {"field": f, "reason": reason.value} for f, reason in r.discrepancies
                        ],
                    }
                    for r in score.per_sample
                ],
            }
        )
    for platform in table.platforms:
        records.append(
            {"kind": "row_average", "platform": platform, "value": table.row_averages[platform]}
        )
    for category in table.categories:
        records.append(
            {
                "kind": "column_average",
                "category": category,
                "value": table.column_averages[category],
            }
        )
    if table.grand_average is not None:
        records.append({"kind": "grand_average", "value": table.grand_average})
    return records


# ── file formats ──


def load_annotations(path: str | Path) -> SessionAnnotations:
    """One JSON document per session: platform, category, and ten samples
    with the expected framework in the canonical rendered form."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise EvalError(f"{path.name}: invalid JSON: {exc.msg}") from exc
    try:
        samples = []
        for item in data["samples"]:
            expected = parse_framework(item["expected_framework"]).record
            samples.append(
                AnnotatedSample(
                    sample_index=item["sample_index"],
                    expected_framework=expected,
                    required_condensed_facts=tuple(item.get("required_condensed_facts", [])),
                    other_products=tuple(item.get("other_products", [])),
                    subcategory_flags=tuple(
                        (f, v) for f, v in item.get("subcategory_flags", [])
                    ),
                    accepted_paraphrases=tuple(
                        (f, v) for f, v in item.get("accepted_paraphrases", [])
                    ),
                )
            )
        return SessionAnnotations(
            session_id=data.get("session_id", path.stem),
            platform=data["platform"],
            category=data["category"],
            samples=tuple(samples),
        )
    except (KeyError, TypeError) as exc:
        raise EvalError(f"{path.name}: malformed annotation document: {exc}") from exc


def observed_from_event_log(lines: Iterable[str | dict]) -> dict[int, ObservedSample]:
    """Reconstruct per-sample snapshots from a gateway event log.

    The condensed update of tick k is the sample-k caption; the framework at
    sample k is the latest framework event with tick_index <= k (the empty
    record before any).
    """
    condensed: dict[int, str] = {}
    frameworks: list[tuple[int, FrameworkRecord]] = []
    for line in lines:
        if isinstance(line, str):
            if not line.strip():
                continue
            message = json.loads(line)
        else:
            message = line
        kind = message.get("kind")
        payload = message.get("payload", {})
        if kind == "condensed":
            condensed[payload["tick_index"]] = payload["text"]
        elif kind == "framework":
            frameworks.append(
                (payload["tick_index"], FrameworkRecord.from_dict(payload["fields"]))
            )
    observed: dict[int, ObservedSample] = {}
    ticks = sorted(set(condensed) | {t for t, _ in frameworks})
    for k in range(SAMPLES_PER_SESSION if not ticks else max(SAMPLES_PER_SESSION, max(ticks) + 1)):
        text = condensed.get(k)
        record = FrameworkRecord()
        for tick, rec in frameworks:
            if tick <= k:
                record = rec
        if text is not None or not record.is_empty():
            observed[k] = ObservedSample(condensed_text=text, framework=record)
    return observed


def load_scores_file(path: str | Path) -> list[tuple[str, str, float]]:
    """Line-delimited {"platform", "category", "total"} triples."""
    path = Path(path)
    triples: list[tuple[str, str, float]] = []
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            triples.append((rec["platform"], rec["category"], float(rec["total"])))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise EvalError(f"{path.name}:{line_no}: bad scores line") from exc
    return triples
