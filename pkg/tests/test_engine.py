"""Engine orchestration: ticks, jobs, fencing, commands, RSVP pacing."""

from __future__ import annotations

import pytest

from livecap.clock import VirtualClock
from livecap.ingest.segments import TranscriptSegment
from livecap.scheduler import VirtualScheduler
from livecap.session.engine import EngineConfig, EngineEvent, SessionCommand, SessionEngine
from livecap.session.sources import ReplaySource
from livecap.summarize.mock import DeterministicMockProvider
from livecap.summarize.providers import ScriptedLLMProvider


def _seg(seq: int, start: int, end: int, text: str, final: bool = True) -> TranscriptSegment:
    return TranscriptSegment(seq=seq, t_start_ms=start, t_end_ms=end, text=text, final=final)


def _engine(provider=None, config=None):
    scheduler = VirtualScheduler(VirtualClock())
    engine = SessionEngine(
        scheduler,
        provider or DeterministicMockProvider(),
        config=config or EngineConfig(),
    )
    events: list[EngineEvent] = []
    engine.subscribe(events.append)
    return scheduler, engine, events


def _kinds(events: list[EngineEvent]) -> list[str]:
    return [e.kind for e in events]


SPEECH = [
    _seg(0, 1_000, 5_000, "这款纯棉T恤现价9.9元。"),
    _seg(1, 31_000, 36_000, "全场包邮，七天无理由退货。"),
    _seg(2, 61_000, 66_000, "有问题全额退款。"),
]


class TestTicking:
    def test_condensed_event_per_voiced_tick(self) -> None:
        scheduler, engine, events = _engine()
        engine.handle_command(SessionCommand(id="c1", kind="start_capture"))
        ReplaySource(scheduler, engine, SPEECH).start()
        engine.schedule_stop(90_000)
        scheduler.run_until_idle()
        condensed = [e for e in events if e.kind == "condensed"]
        assert [e.payload["tick_index"] for e in condensed] == [0, 1, 2]
        assert "9.9" in condensed[0].payload["text"]

    def test_silent_window_produces_no_condense_job(self) -> None:
        scheduler, engine, events = _engine()
        engine.handle_command(SessionCommand(id="c1", kind="start_capture"))
        ReplaySource(scheduler, engine, [_seg(0, 1_000, 2_000, "只有这一句价9元。")]).start()
        engine.schedule_stop(120_000)
        scheduler.run_until_idle()
        condensed = [e for e in events if e.kind == "condensed"]
        # Only tick 0's window [0,30s) overlaps the segment; ticks 1..3 are
        # silent and produce no condense job.
        assert [e.payload["tick_index"] for e in condensed] == [0]
        assert engine.state.tick_index == 4  # ticks still advanced

    def test_framework_accumulates_over_ticks(self) -> None:
        scheduler, engine, events = _engine()
        engine.handle_command(SessionCommand(id="c1", kind="start_capture"))
        ReplaySource(scheduler, engine, SPEECH).start()
        engine.schedule_stop(90_000)
        scheduler.run_until_idle()
        frameworks = [e.payload["fields"] for e in events if e.kind == "framework"]
        assert len(frameworks) == 3
        assert frameworks[0]["price"] == "9.9"
        assert frameworks[0]["free_shipping"] is None
        assert frameworks[1]["free_shipping"] == "是"
        assert frameworks[1]["price"] == "9.9"  # accumulation keeps old values
        assert frameworks[2]["after_sales"] == "全额退款"

    def test_stop_capture_halts_ticks_but_flushes_inflight(self) -> None:
        provider = ScriptedLLMProvider(
            {"condense": [{"text": "特价9.9元", "delay_ms": 5_000}]},
            default={"text": "🏷️"},
        )
        scheduler, engine, events = _engine(provider=provider)
        engine.handle_command(SessionCommand(id="c1", kind="start_capture"))
        ReplaySource(scheduler, engine, SPEECH).start()
        engine.schedule_stop(30_000)  # stop right at the first tick
        scheduler.run_until_idle()
        condensed = [e for e in events if e.kind == "condensed"]
        assert len(condensed) == 1  # the in-flight job completed after stop
        assert engine.state.capturing is False
        assert engine.state.tick_index == 1


class TestSegments:
    def test_segment_events_and_revision(self) -> None:
        scheduler, engine, events = _engine()
        engine.handle_command(SessionCommand(id="c1", kind="start_capture"))
        ReplaySource(
            scheduler,
            engine,
            [
                _seg(0, 1_000, 2_000, "今天特", final=False),
                _seg(0, 1_000, 3_000, "今天特价", final=True),
            ],
        ).start()
        engine.schedule_stop(5_000)
        scheduler.run_until_idle()
        assert "segment" in _kinds(events)
        assert "segment_revised" in _kinds(events)
        assert engine.state.segments()[0].text == "今天特价"

    def test_segments_ignored_when_not_capturing(self) -> None:
        scheduler, engine, events = _engine()
        engine.ingest_segment(_seg(0, 0, 10, "别收"))
        assert engine.state.buffer_size == 0
        assert "segment" not in _kinds(events)


class TestClearFencing:
    def test_slow_condense_result_is_fenced_after_clear(self) -> None:
        provider = ScriptedLLMProvider(
            {"condense": [{"text": "旧世界的摘要", "delay_ms": 8_000}]},
            default={"text": "新9.9元"},
        )
        scheduler, engine, events = _engine(provider=provider)
        engine.handle_command(SessionCommand(id="c1", kind="start_capture"))
        ReplaySource(scheduler, engine, SPEECH).start()
        # Tick 0 fires at 30s; its reply would arrive at 38s. Clear at 31s.
        scheduler.call_at(
            31_000, engine.handle_command, SessionCommand(id="clr", kind="clear")
        )
        engine.schedule_stop(70_000)
        scheduler.run_until_idle()

        clear_ack_at = next(
            i for i, e in enumerate(events)
            if e.kind == "state" and e.payload.get("ack_id") == "clr"
        )
        post_clear_gen = events[clear_ack_at].generation
        assert post_clear_gen == 1
        for event in events[clear_ack_at:]:
            assert event.generation >= post_clear_gen, event
        texts = [e.payload["text"] for e in events if e.kind == "condensed"]
        assert all("旧世界" not in t for t in texts)
        assert engine.fenced_drops >= 1

    def test_clear_resets_tick_origin(self) -> None:
        scheduler, engine, events = _engine()
        engine.handle_command(SessionCommand(id="c1", kind="start_capture"))
        segments = [
            _seg(0, 1_000, 2_000, "老产品价格9元。"),
            _seg(1, 66_000, 68_000, "新产品只要5.5元。"),
        ]
        ReplaySource(scheduler, engine, segments).start()
        scheduler.call_at(
            65_000, engine.handle_command, SessionCommand(id="clr", kind="clear")
        )
        engine.schedule_stop(96_000)
        scheduler.run_until_idle()
        condensed = [e for e in events if e.kind == "condensed" and e.generation == 1]
        # Post-clear tick 0 window is [65s, 95s): only the new product.
        assert len(condensed) == 1
        assert condensed[0].payload["window_start_ms"] == 65_000
        assert condensed[0].payload["window_end_ms"] == 95_000
        assert "5.5" in condensed[0].payload["text"]
        assert "9元" not in condensed[0].payload["text"]


class TestCommands:
    def test_every_command_gets_exactly_one_ack_or_error(self) -> None:
        scheduler, engine, events = _engine()
        commands = [
            SessionCommand(id="a", kind="start_capture"),
            SessionCommand(id="b", kind="set_mode", args={"mode": "framework"}),
            SessionCommand(id="c", kind="set_rsvp_rate", args={"rate": 240}),
            SessionCommand(id="d", kind="set_appearance", args={"prefs": {"bg": "comic"}}),
            SessionCommand(id="e", kind="set_rsvp_rate", args={"rate": 0}),  # error
            SessionCommand(id="f", kind="bogus_kind"),  # error
            SessionCommand(id="g", kind="stop_capture"),
        ]
        for cmd in commands:
            engine.handle_command(cmd)
        acked = [
            e.payload["ack_id"]
            for e in events
            if e.kind in ("state", "error", "history") and "ack_id" in e.payload
        ]
        assert sorted(acked) == ["a", "b", "c", "d", "e", "f", "g"]
        errors = {e.payload["ack_id"]: e.payload["code"] for e in events if e.kind == "error"}
        assert errors == {"e": "bad_args", "f": "unknown_command"}

    def test_set_mode_is_a_view_change_only(self) -> None:
        scheduler, engine, events = _engine()
        engine.handle_command(SessionCommand(id="a", kind="start_capture"))
        ReplaySource(scheduler, engine, SPEECH).start()
        scheduler.call_at(
            10_000,
            engine.handle_command,
            SessionCommand(id="m", kind="set_mode", args={"mode": "framework"}),
        )
        engine.schedule_stop(40_000)
        scheduler.run_until_idle()
        assert engine.state.mode == "framework"
        # The condensed/RSVP pipeline kept running after the mode switch.
        assert any(e.kind == "condensed" for e in events)
        assert any(e.kind == "rsvp_token" for e in events)

    def test_invalid_rate_leaves_rate_unchanged(self) -> None:
        _, engine, events = _engine()
        engine.handle_command(SessionCommand(id="r", kind="set_rsvp_rate", args={"rate": -5}))
        assert engine.state.rsvp_rate == 180.0

    def test_start_twice_is_invalid_in_state(self) -> None:
        _, engine, events = _engine()
        engine.handle_command(SessionCommand(id="a", kind="start_capture"))
        engine.handle_command(SessionCommand(id="b", kind="start_capture"))
        errors = [e for e in events if e.kind == "error"]
        assert errors and errors[0].payload["code"] == "invalid_state"

    def test_pause_rsvp_invalid_when_idle(self) -> None:
        _, engine, events = _engine()
        engine.handle_command(SessionCommand(id="p", kind="pause_rsvp"))
        assert events[-1].kind == "error"
        assert events[-1].payload["code"] == "invalid_state"

    def test_appearance_is_opaque_and_echoed_in_snapshot(self) -> None:
        _, engine, events = _engine()
        engine.handle_command(
            SessionCommand(id="a", kind="set_appearance", args={"prefs": {"bg": "comic", "opacity": 0.8}})
        )
        snap = events[-1].payload["snapshot"]
        assert snap["appearance"] == {"bg": "comic", "opacity": 0.8}


class TestRsvpFlow:
    def test_tokens_emitted_at_uniform_cadence(self) -> None:
        config = EngineConfig(rsvp_rate=300.0)  # 200 ms per token
        scheduler, engine, events = _engine(config=config)
        engine.handle_command(SessionCommand(id="a", kind="start_capture"))
        ReplaySource(scheduler, engine, [_seg(0, 1_000, 2_000, "特价9.9元")]).start()
        engine.schedule_stop(30_000)
        scheduler.run_until_idle()
        tokens = [e for e in events if e.kind == "rsvp_token"]
        texts = [e.payload["text"] for e in tokens]
        assert texts == ["特", "价", "9.9", "元"]
        onsets = [e.at_ms for e in tokens]
        assert [b - a for a, b in zip(onsets, onsets[1:])] == [200, 200, 200]

    def test_set_rate_changes_cadence_midstream(self) -> None:
        config = EngineConfig(rsvp_rate=300.0)
        scheduler, engine, events = _engine(config=config)
        engine.handle_command(SessionCommand(id="a", kind="start_capture"))
        ReplaySource(scheduler, engine, [_seg(0, 1_000, 2_000, "一二三四五六")]).start()
        # Tokens start at 30s; speed up after the second token.
        scheduler.call_at(
            30_450,
            engine.handle_command,
            SessionCommand(id="r", kind="set_rsvp_rate", args={"rate": 600}),
        )
        engine.schedule_stop(60_000)
        scheduler.run_until_idle()
        tokens = [e for e in events if e.kind == "rsvp_token"]
        onsets = [e.at_ms for e in tokens]
        gaps = [b - a for a, b in zip(onsets, onsets[1:])]
        assert len(tokens) == 6
        assert gaps[0] == 200 and gaps[-1] == 100

    def test_pause_and_resume_shift_remaining_tokens(self) -> None:
        config = EngineConfig(rsvp_rate=300.0)
        scheduler, engine, events = _engine(config=config)
        engine.handle_command(SessionCommand(id="a", kind="start_capture"))
        ReplaySource(scheduler, engine, [_seg(0, 1_000, 2_000, "一二三四")]).start()
        scheduler.call_at(
            30_250, engine.handle_command, SessionCommand(id="p", kind="pause_rsvp")
        )
        scheduler.call_at(
            35_250, engine.handle_command, SessionCommand(id="r", kind="resume_rsvp")
        )
        engine.schedule_stop(60_000)
        scheduler.run_until_idle()
        tokens = [e for e in events if e.kind == "rsvp_token"]
        assert [e.payload["text"] for e in tokens] == ["一", "二", "三", "四"]
        onsets = [e.at_ms for e in tokens]
        assert onsets[2] - onsets[1] == 5_000 + 200  # paused 5 s between tokens 2 and 3


class TestFrameworkWindow:
    def test_more_than_ten_updates_slide_the_item_window(self) -> None:
        captured: list[int] = []

        class CountingMock(DeterministicMockProvider):
            def complete(self, dialogue, deadline_ms=None):
                from livecap.summarize.prompts import dialogue_kind

                if dialogue_kind(dialogue) == "framework":
                    captured.append(len(dialogue[-1].text.splitlines()))
                return super().complete(dialogue, deadline_ms)

        speech = [
            _seg(i, i * 30_000 + 1_000, i * 30_000 + 3_000, f"第{i}波只要{i}.9元。")
            for i in range(12)
        ]
        scheduler, engine, events = _engine(provider=CountingMock())
        engine.handle_command(SessionCommand(id="a", kind="start_capture"))
        ReplaySource(scheduler, engine, speech).start()
        engine.schedule_stop(12 * 30_000)
        scheduler.run_until_idle()
        assert captured[:3] == [1, 2, 3]
        assert captured[-1] == 10  # capped at the most recent ten items
        assert len(captured) == 12
