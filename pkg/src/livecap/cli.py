"""Headless operation: replay sessions, serve the gateway, run evaluations,
and browse history.

Exit codes: 0 success, 2 usage error, 1 runtime failure. Defaults mirror the
pipeline constants (640-byte chunks / 40 ms, 30 s tick, 40 s window, limit
50, RSVP 180 tokens/min).
"""

from __future__ import annotations

import argparse
import asyncio
import json
import math
import signal
import sys
from datetime import datetime, timezone
from pathlib import Path

from .clock import RealClock, VirtualClock
from .evaluation import (
    EvalError,
    aggregate,
    load_annotations,
    load_scores_file,
    observed_from_event_log,
    render_report,
    report_records,
    score_session,
)
from .gateway.protocol import encode_event, event_to_json
from .gateway.server import GatewayServer
from .ingest.providers import EchoASRProvider, ScriptedASRProvider
from .ingest.segments import FixtureError, load_fixture
from .scheduler import AsyncioScheduler, VirtualScheduler
from .session.engine import EngineConfig, SessionCommand, SessionEngine
from .session.history import HistoryError, HistoryStore
from .session.sources import ChunkedAudioSource, ReplaySource
from .session.state import VIRTUAL_EPOCH
from .summarize.mock import DeterministicMockProvider
from .summarize.providers import CassetteProvider, LLMProviderError

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


class EventLogWriter:
    """Writes every session event as one wire message per line."""

    def __init__(self) -> None:
        self.lines: list[str] = []
        self._seq = 0

    def __call__(self, event) -> None:
        self._seq += 1
        self.lines.append(event_to_json(encode_event(self._seq, event)))

    def write(self, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(self.lines) + ("\n" if self.lines else ""), encoding="utf-8")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="livecap", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    replay = sub.add_parser("replay", help="run a recorded session on a virtual clock")
    replay.add_argument("--fixture", required=True, help="transcript fixture (JSONL)")
    replay.add_argument("--out", required=True, help="event log output path (JSONL)")
    _add_run_flags(replay)
    replay.add_argument(
        "--duration-ms",
        type=int,
        default=None,
        help="capture length; defaults to the fixture end rounded up to a tick",
    )
    replay.add_argument("--history-dir", default=None, help="save session history here")

    ev = sub.add_parser("eval", help="score event logs against annotations")
    ev.add_argument("--annotations", help="directory of per-session annotation JSON files")
    ev.add_argument("--logs", help="directory of per-session event logs (JSONL)")
    ev.add_argument("--scores", help="pre-scored {platform,category,total} JSONL instead")
    ev.add_argument("--out", default=None, help="write machine-readable results here")

    serve = sub.add_parser("serve", help="serve the session gateway over websockets")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8765)
    serve.add_argument("--fixture", default=None, help="replay this transcript fixture")
    serve.add_argument("--audio", default=None, help="raw audio file for the chunker")
    serve.add_argument(
        "--asr",
        default="echo",
        help="ASR provider for --audio: echo | scripted:<script.jsonl>",
    )
    _add_run_flags(serve)
    serve.add_argument("--history-dir", default=None, help="save session history here")

    history = sub.add_parser("history", help="browse saved session history")
    hsub = history.add_subparsers(dest="history_command", required=True)
    hlist = hsub.add_parser("list", help="list saved sessions")
    hlist.add_argument("--dir", required=True)
    hshow = hsub.add_parser("show", help="print one saved session")
    hshow.add_argument("--dir", required=True)
    hshow.add_argument("record_id")

    return parser


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--llm", default="mock", help="mock | mock:<keywords.json> | cassette:<path>")
    p.add_argument("--chunk-bytes", type=int, default=640)
    p.add_argument("--interval-ms", type=int, default=40)
    p.add_argument("--tick-ms", type=int, default=30_000)
    p.add_argument("--window-ms", type=int, default=40_000)
    p.add_argument("--condensed-limit", type=int, default=50)
    p.add_argument("--rsvp-rate", type=float, default=180.0)
    p.add_argument("--config", default=None, help="JSON config file; explicit flags win")


def _apply_config_file(args: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
    if getattr(args, "config", None) is None:
        return
    try:
        overrides = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read config file: {exc}")
    given = {a for a in sys.argv if a.startswith("--")}
    for key, value in overrides.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            continue
        if f"--{key.replace('_', '-')}" in given:
            continue  # explicit flag wins
        setattr(args, attr, value)


def _engine_config(args: argparse.Namespace) -> EngineConfig:
    return EngineConfig(
        chunk_bytes=args.chunk_bytes,
        interval_ms=args.interval_ms,
        tick_ms=args.tick_ms,
        window_ms=args.window_ms,
        condensed_limit=args.condensed_limit,
        rsvp_rate=args.rsvp_rate,
    )


def _llm_provider(spec: str):
    if spec == "mock":
        return DeterministicMockProvider()
    if spec.startswith("mock:"):
        return DeterministicMockProvider(keyword_table=spec.split(":", 1)[1])
    if spec.startswith("cassette:"):
        return CassetteProvider(spec.split(":", 1)[1])
    raise ValueError(f"unknown --llm provider spec: {spec!r}")


def cmd_replay(args: argparse.Namespace) -> int:
    try:
        segments = load_fixture(args.fixture)
        provider = _llm_provider(args.llm)
    except (FixtureError, LLMProviderError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    scheduler = VirtualScheduler(VirtualClock())
    history = HistoryStore(args.history_dir) if args.history_dir else None
    engine = SessionEngine(
        scheduler,
        provider,
        config=_engine_config(args),
        history_store=history,
        session_id=Path(args.fixture).stem,
        started_at=VIRTUAL_EPOCH,
    )
    log = EventLogWriter()
    engine.subscribe(log)

    fixture_end = max((s.t_end_ms for s in segments), default=0)
    duration = args.duration_ms
    if duration is None:
        duration = max(args.tick_ms, math.ceil(fixture_end / args.tick_ms) * args.tick_ms)

    engine.emit_snapshot()
    engine.handle_command(SessionCommand(id="replay-start", kind="start_capture"))
    ReplaySource(scheduler, engine, segments).start()
    engine.schedule_stop(duration, save=history is not None)
    scheduler.run_until_idle()

    log.write(Path(args.out))
    print(f"wrote {len(log.lines)} events to {args.out}")
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    if args.scores:
        try:
            triples = load_scores_file(args.scores)
        except (EvalError, OSError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_RUNTIME
        table = aggregate(triples)
        print(render_report(table))
        if args.out:
            _write_records(Path(args.out), report_records(table, []))
        return EXIT_OK

    if not args.annotations or not args.logs:
        print("error: need --annotations and --logs (or --scores)", file=sys.stderr)
        return EXIT_USAGE

    ann_dir, log_dir = Path(args.annotations), Path(args.logs)
    ann_files = {p.stem: p for p in sorted(ann_dir.glob("*.json"))}
    log_files = {p.stem: p for p in sorted(log_dir.glob("*.jsonl"))}
    if set(ann_files) != set(log_files):
        missing_logs = sorted(set(ann_files) - set(log_files))
        missing_anns = sorted(set(log_files) - set(ann_files))
        print(
            f"error: session mismatch: no logs for {missing_logs}, "
            f"no annotations for {missing_anns}",
            file=sys.stderr,
        )
        return EXIT_RUNTIME

    scores = []
    try:
        for stem, ann_path in ann_files.items():
            annotations = load_annotations(ann_path)
            observed = observed_from_event_log(
                log_files[stem].read_text(encoding="utf-8").splitlines()
            )
            scores.append(score_session(annotations, observed))
    except (EvalError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    table = aggregate(scores)
    print(render_report(table))
    if args.out:
        _write_records(Path(args.out), report_records(table, scores))
    return EXIT_OK


def _write_records(path: Path, records: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")


def cmd_serve(args: argparse.Namespace) -> int:
    try:
        provider = _llm_provider(args.llm)
        segments = load_fixture(args.fixture) if args.fixture else None
        audio = Path(args.audio).read_bytes() if args.audio else None
    except (FixtureError, LLMProviderError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    if segments is not None and audio is not None:
        print("error: pass either --fixture or --audio, not both", file=sys.stderr)
        return EXIT_USAGE

    async def _run() -> int:
        loop = asyncio.get_running_loop()
        scheduler = AsyncioScheduler(loop, RealClock())
        history = HistoryStore(args.history_dir) if args.history_dir else None
        engine = SessionEngine(
            scheduler,
            provider,
            config=_engine_config(args),
            history_store=history,
            started_at=datetime.now(timezone.utc),
        )
        server = GatewayServer(engine, host=args.host, port=args.port)
        try:
            await server.start()
        except OSError as exc:
            print(f"error: cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
            return EXIT_RUNTIME

        if segments is not None or audio is not None:
            engine.handle_command(SessionCommand(id="serve-start", kind="start_capture"))
            if segments is not None:
                ReplaySource(scheduler, engine, segments).start()
            else:
                asr = _asr_provider(args.asr, scheduler)
                ChunkedAudioSource(
                    scheduler, engine, audio, asr, args.chunk_bytes, args.interval_ms
                ).start()

        stop = asyncio.Event()
        for sig in (signal.SIGINT, signal.SIGTERM):
            loop.add_signal_handler(sig, stop.set)
        print(f"gateway listening on ws://{args.host}:{server.bound_port}", flush=True)
        await stop.wait()
        if history is not None:
            engine.save_history()
        await server.stop()
        return EXIT_OK

    return asyncio.run(_run())


def _asr_provider(spec: str, scheduler):
    if spec == "echo":
        provider = EchoASRProvider()
    elif spec.startswith("scripted:"):
        provider = ScriptedASRProvider.from_file(spec.split(":", 1)[1], scheduler.clock)
    else:
        raise ValueError(f"unknown --asr provider spec: {spec!r}")
    return provider


def cmd_history(args: argparse.Namespace) -> int:
    store = HistoryStore(args.dir)
    if args.history_command == "list":
        for entry in store.list_records():
            print(f"{entry.record_id}\t{entry.started_at.isoformat()}")
        return EXIT_OK
    try:
        record = store.load(args.record_id)
    except HistoryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    for seg in record.segments:
        marker = "" if seg.final else " [provisional]"
        print(f"[{seg.t_start_ms:>8}ms] {seg.text}{marker}")
    for update in record.condensed:
        emojis = "".join(tag.symbol for tag in update.emojis)
        print(f"(tick {update.tick_index}) {update.text} {emojis}".rstrip())
    if record.frameworks:
        from .framework import render_framework

        print(render_framework(record.frameworks[-1]))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    _apply_config_file(args, parser)
    try:
        if args.command == "replay":
            return cmd_replay(args)
        if args.command == "eval":
            return cmd_eval(args)
        if args.command == "serve":
            return cmd_serve(args)
        if args.command == "history":
            return cmd_history(args)
    except KeyboardInterrupt:
        return EXIT_RUNTIME
    parser.error(f"unknown command {args.command!r}")
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
