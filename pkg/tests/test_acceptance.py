"""Acceptance suite: one test per release criterion, at stated tolerances.

Each test prints a PASS line on success so a plain `pytest -s
tests/test_acceptance.py` reads as a checklist. Runtime-bounded criteria
assert their own wall-clock budget.
"""

from __future__ import annotations

import json
import random
import time
from pathlib import Path

import pytest

from livecap.cli import main
from livecap.clock import VirtualClock
from livecap.evaluation import (
    aggregate,
    load_annotations,
    observed_from_event_log,
    score_session,
)
from livecap.framework import (
    DiscrepancyReason,
    FieldAnnotation,
    FrameworkRecord,
    classify_discrepancy,
    parse_framework,
    render_framework,
)
from livecap.ingest.chunker import chunk_audio
from livecap.ingest.segments import TranscriptSegment
from livecap.rsvp import RsvpPlayer, schedule, token_duration_ms, token_spans
from livecap.scheduler import VirtualScheduler
from livecap.session.engine import EngineConfig, SessionCommand, SessionEngine
from livecap.session.sources import ReplaySource
from livecap.summarize.condense import is_cjk_dominant, text_length
from livecap.summarize.mock import DeterministicMockProvider
from livecap.summarize.providers import ScriptedLLMProvider

FIXTURE = Path(__file__).parent.parent / "src" / "livecap" / "fixtures" / "demo_session.jsonl"
GOLDEN = Path(__file__).parent / "data" / "golden"

TABLE_2 = {
    "PDD": {"Fruits": 7, "Make-ups": 8, "Clothes": 9, "Furniture": 6},
    "Kwai": {"Fruits": 7, "Make-ups": 8, "Clothes": 9, "Furniture": 10},
    "Douyin": {"Fruits": 5, "Make-ups": 9, "Clothes": 3, "Furniture": 10},
    "Taobao": {"Fruits": 1, "Make-ups": 10, "Clothes": 7, "Furniture": 10},
    "Xigua Video": {"Fruits": 4, "Make-ups": 10, "Clothes": 10, "Furniture": 10},
}


def _passed(name: str) -> None:
    print(f"ACCEPTANCE PASS: {name}")


def test_tick_window_arithmetic(tmp_path) -> None:
    """300 s replay: exactly 10 condensed events; 40 s spans with 10 s
    overlaps from tick 2 on; under 5 s of wall time."""
    started = time.monotonic()
    out = tmp_path / "log.jsonl"
    assert main(["replay", "--fixture", str(FIXTURE), "--out", str(out)]) == 0
    messages = [json.loads(l) for l in out.read_text(encoding="utf-8").splitlines()]
    condensed = [m["payload"] for m in messages if m["kind"] == "condensed"]
    assert len(condensed) == 10
    assert [p["tick_index"] for p in condensed] == list(range(10))
    for prev, cur in zip(condensed, condensed[1:]):
        if cur["tick_index"] >= 2:
            assert cur["window_end_ms"] - cur["window_start_ms"] == 40_000
            assert prev["window_end_ms"] - cur["window_start_ms"] == 10_000
    elapsed = time.monotonic() - started
    assert elapsed < 5.0, f"replay took {elapsed:.2f}s"
    _passed(f"tick/window arithmetic (10 condensed events, {elapsed:.2f}s)")


def test_chunker_losslessness_and_pacing() -> None:
    """>=200 random byte sources reassemble exactly; 16,000 B/s default
    pacing; under 10 s of wall time."""
    started = time.monotonic()
    rng = random.Random(20260809)
    for case in range(200):
        size = rng.randint(0, 20_000)
        data = rng.randbytes(size)
        chunk_bytes = rng.choice([1, 7, 160, 640, 641, 4096])
        chunks = list(chunk_audio(data, chunk_bytes=chunk_bytes, interval_ms=40))
        assert b"".join(c.data for c in chunks) == data, f"case {case} lost bytes"
        assert all(len(c.data) == chunk_bytes for c in chunks[:-1])
    # Default pacing: 640 bytes every 40 ms = 16,000 bytes per second.
    chunks = list(chunk_audio(bytes(160_000), chunk_bytes=640, interval_ms=40))
    assert len(chunks) == 250
    span_s = (chunks[-1].emit_time_ms + 40) / 1000
    assert 160_000 / span_s == 16_000
    elapsed = time.monotonic() - started
    assert elapsed < 10.0, f"chunker property run took {elapsed:.2f}s"
    _passed(f"chunker losslessness + pacing (200 cases, {elapsed:.2f}s)")


GOLDEN_FRAMEWORK_TEXT = """Product: Pure Cotton T-Shirt
Category: Clothing
Promotion Policy: Original price 59 CNY, now 9.9 CNY
Free Shipping: Yes
7-day Unconditional Return: Yes
Price: 9.9 CNY
After-Sales Service: Full refund or exchange available
Product Description: High-quality pure cotton T-shirt, like a dozens CNY one
Usage Experience: Comfortable, breathable, and durable fabric for everyday wear
User Manual: Wash in cold water, do not bleach, and air dry for best results"""


def test_framework_parser_golden_roundtrip_and_warnings() -> None:
    """Golden text parses exactly; parse∘render on 500 random records;
    fence/reorder/missing corpora warn as specified."""
    report = parse_framework(GOLDEN_FRAMEWORK_TEXT)
    assert report.record == FrameworkRecord(
        product="Pure Cotton T-Shirt",
        category="Clothing",
        promotional_policy="Original price 59 CNY, now 9.9 CNY",
        free_shipping="Yes",
        seven_day_return="Yes",
        price="9.9 CNY",
        after_sales="Full refund or exchange available",
        product_description="High-quality pure cotton T-shirt, like a dozens CNY one",
        user_experience="Comfortable, breathable, and durable fabric for everyday wear",
        user_manual="Wash in cold water, do not bleach, and air dry for best results",
    )
    assert report.warnings == []

    rng = random.Random(59)
    alphabet = "abcXYZ 价格9.9元包邮 -,顶"
    for case in range(500):
        values = {}
        for name in FrameworkRecord().to_dict():
            if rng.random() < 0.3:
                continue
            value = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 30)))
            value = " ".join(value.split())
            if value and value.casefold() != "null":
                values[name] = value
        record = FrameworkRecord.from_dict(values)
        assert parse_framework(render_framework(record)).record == record, f"case {case}"

    fenced = parse_framework("```\nProduct: X\n```")
    assert "stripped_fence" in fenced.warning_kinds()
    reordered = parse_framework("Price: 1\nProduct: X")
    assert "reordered_field" in reordered.warning_kinds()
    missing = parse_framework("Product: X")
    assert sum(1 for w in missing.warnings if w.kind == "missing_field") == 9
    _passed("framework parser (golden exact, 500 round-trips, warning corpora)")


def test_discrepancy_classifier_reproduces_reference_cases() -> None:
    """The four annotated comparison cases: incorrect / confused /
    fabricated / interpret-out-of-context."""
    assert (
        classify_discrepancy("9.9 CNY", "5.9 CNY") is DiscrepancyReason.INCORRECT_INFORMATION
    )
    assert (
        classify_discrepancy(
            "Pure Cotton T-Shirt",
            "A several dozen yuan T-shirt",
            FieldAnnotation(other_products=("several dozen yuan T-shirt",)),
        )
        is DiscrepancyReason.CONFUSED_INFORMATION
    )
    assert (
        classify_discrepancy(None, "Wireless Bluetooth Earbuds")
        is DiscrepancyReason.FABRICATED_INFORMATION
    )
    assert (
        classify_discrepancy(
            "Pure Cotton T-Shirt",
            "Red-color Pure Cotton T-shirt",
            FieldAnnotation(subcategory_values=("Red-color Pure Cotton T-shirt",)),
        )
        is DiscrepancyReason.INTERPRET_OUT_OF_CONTEXT
    )
    _passed("discrepancy classifier (4 reference cases)")


def test_scoring_arithmetic_golden_and_published_table() -> None:
    """Golden fixtures reproduce their committed totals; the published
    5x4 table reproduces every average to 2 decimals."""
    annotations = load_annotations(GOLDEN / "annotations" / "demo_session.json")
    observed = observed_from_event_log(
        (GOLDEN / "logs" / "demo_session.jsonl").read_text(encoding="utf-8").splitlines()
    )
    score = score_session(annotations, observed)
    assert score.total == 8
    assert [r.point for r in score.per_sample] == [1, 0, 1, 0, 1, 1, 1, 1, 1, 1]
    assert score.per_sample[1].discrepancies == (
        ("after_sales", DiscrepancyReason.MISSING_INFORMATION),
        ("user_experience", DiscrepancyReason.MISSING_INFORMATION),
    )

    table = aggregate(
        (p, c, float(t)) for p, row in TABLE_2.items() for c, t in row.items()
    )
    assert table.row_averages == {
        "PDD": 7.50,
        "Kwai": 8.50,
        "Douyin": 6.75,
        "Taobao": 7.00,
        "Xigua Video": 8.50,
    }
    assert table.column_averages == {
        "Fruits": 4.80,
        "Make-ups": 9.00,
        "Clothes": 7.60,
        "Furniture": 9.20,
    }
    assert table.grand_average == 7.65
    _passed("scoring arithmetic (golden total 8; table averages incl. 7.65)")


def test_clear_fencing_linearization() -> None:
    """100 randomized slow-provider/clear interleavings: nothing derived
    from pre-clear input surfaces after the clear acknowledgment."""
    for iteration in range(100):
        rng = random.Random(1000 + iteration)
        delays = {
            "condense": rng.randint(0, 15_000),
            "emoji": rng.randint(0, 8_000),
            "framework": rng.randint(0, 8_000),
        }
        provider = DeterministicMockProvider(delays_ms=delays)
        scheduler = VirtualScheduler(VirtualClock())
        engine = SessionEngine(scheduler, provider, config=EngineConfig())
        events = []
        engine.subscribe(events.append)

        speech = [
            TranscriptSegment(0, 1_000, 6_000, "旧款只要9.9元。", True),
            TranscriptSegment(1, 25_000, 29_000, "旧款全场包邮。", True),
            TranscriptSegment(2, 50_000, 56_000, "新款只要5.5元。", True),
        ]
        engine.handle_command(SessionCommand(id="start", kind="start_capture"))
        ReplaySource(scheduler, engine, speech).start()
        clear_at = rng.randint(30_001, 48_000)
        scheduler.call_at(
            clear_at, engine.handle_command, SessionCommand(id="clear", kind="clear")
        )
        engine.schedule_stop(120_000)
        scheduler.run_until_idle()

        ack_index = next(
            i
            for i, e in enumerate(events)
            if e.kind == "state" and e.payload.get("ack_id") == "clear"
        )
        clear_generation = events[ack_index].generation
        for event in events[ack_index:]:
            assert event.generation >= clear_generation, (
                f"iteration {iteration}: stale generation after clear: {event}"
            )
            payload_text = json.dumps(event.payload, ensure_ascii=False)
            if event.kind in ("condensed", "framework", "rsvp_token", "segment"):
                assert "旧款" not in payload_text, (
                    f"iteration {iteration}: pre-clear content after clear: {event}"
                )
    _passed("clear fencing (100 randomized interleavings, zero violations)")


def test_end_to_end_replay_determinism(tmp_path) -> None:
    """Two replays of the bundled fixture produce byte-identical logs."""
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert main(["replay", "--fixture", str(FIXTURE), "--out", str(a)]) == 0
    assert main(["replay", "--fixture", str(FIXTURE), "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    _passed("end-to-end determinism (byte-identical replay logs)")


def test_rsvp_properties() -> None:
    """Token conservation on random mixed-script text; exact span
    arithmetic; exactly-once emission under random control scripts."""
    rng = random.Random(4242)
    alphabet = "今天特价九折包邮 abc XY 9.37元，。！? T恤U盘"
    for case in range(200):
        text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 40)))
        spans = token_spans(text)
        rebuilt = []
        pos = 0
        for span in spans:
            gap = text[pos : span.start]
            assert gap.strip() == "", f"case {case}: token dropped in {text!r}"
            rebuilt.append(gap)
            rebuilt.append(span.text)
            pos = span.end
        rebuilt.append(text[pos:])
        assert "".join(rebuilt) == text, f"case {case}"

    for rate in (60, 144, 180, 300, 601, 900):
        tokens = schedule([f"t{i}" for i in range(17)], rate_tpm=rate)
        assert tokens[-1].onset_ms + tokens[-1].duration_ms == 17 * token_duration_ms(rate)

    for case in range(200):
        rng2 = random.Random(9000 + case)
        texts = [f"tok{i}" for i in range(rng2.randint(1, 15))]
        player = RsvpPlayer(schedule(texts, rate_tpm=rng2.choice([90, 180, 600])))
        now = 0
        emitted: list[str] = []
        for _ in range(rng2.randint(0, 30)):
            op = rng2.choice(["advance", "pause", "resume", "set_rate"])
            if op == "advance":
                now += rng2.randint(0, 700)
                emitted.extend(t.text for t in player.due_tokens(now))
            elif op == "pause" and not player.paused and not player.finished:
                player.pause(now)
            elif op == "resume" and player.paused:
                now += rng2.randint(0, 400)
                player.resume(now)
            elif op == "set_rate":
                player.set_rate(now, rng2.choice([60, 240, 880]))
        if player.paused:
            player.resume(now)
        while not player.finished:
            nxt = player.next_onset_ms()
            now = max(now, nxt)
            emitted.extend(t.text for t in player.due_tokens(now))
        assert emitted == texts, f"case {case}"
    _passed("rsvp properties (conservation, span arithmetic, exactly-once)")


def test_condensed_limit_under_adversarial_outputs() -> None:
    """Provider replies up to 10x the limit: every emitted update honors
    the bound and carries the truncation flag."""
    limit = 50
    adversarial = [
        {"text": "价" * (limit * 10)},
        {"text": "word " * (limit * 10)},
        {"text": "九折" * (limit * 5)},
        {"text": ("X价 " * (limit * 4)).strip()},
    ]
    provider = ScriptedLLMProvider({"condense": adversarial}, default={"text": "🏷️"})
    scheduler = VirtualScheduler(VirtualClock())
    engine = SessionEngine(scheduler, provider, config=EngineConfig(condensed_limit=limit))
    events = []
    engine.subscribe(events.append)
    speech = [
        TranscriptSegment(i, i * 30_000 + 1_000, i * 30_000 + 4_000, f"第{i}波9.9元。", True)
        for i in range(4)
    ]
    engine.handle_command(SessionCommand(id="start", kind="start_capture"))
    ReplaySource(scheduler, engine, speech).start()
    engine.schedule_stop(4 * 30_000)
    scheduler.run_until_idle()

    condensed = [e.payload for e in events if e.kind == "condensed"]
    assert len(condensed) == 4
    for payload in condensed:
        measure = "graphemes" if is_cjk_dominant(payload["text"]) else "words"
        assert text_length(payload["text"]) <= limit, (measure, payload["text"])
        assert payload["truncated"] is True
    _passed("condensed limit (adversarial 10x outputs bounded, flag set)")
