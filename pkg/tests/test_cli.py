"""Command-line behavior: exit codes, determinism, file outputs."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from livecap.cli import main

FIXTURE = Path(__file__).parent.parent / "src" / "livecap" / "fixtures" / "demo_session.jsonl"
GOLDEN = Path(__file__).parent / "data" / "golden"


def test_replay_writes_event_log(tmp_path) -> None:
    out = tmp_path / "log.jsonl"
    assert main(["replay", "--fixture", str(FIXTURE), "--out", str(out)]) == 0
    lines = out.read_text(encoding="utf-8").splitlines()
    messages = [json.loads(line) for line in lines]
    condensed = [m for m in messages if m["kind"] == "condensed"]
    assert len(condensed) == 10
    assert [m["payload"]["tick_index"] for m in condensed] == list(range(10))


def test_replay_twice_is_byte_identical(tmp_path) -> None:
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert main(["replay", "--fixture", str(FIXTURE), "--out", str(a)]) == 0
    assert main(["replay", "--fixture", str(FIXTURE), "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_replay_missing_fixture_flag_is_usage_error(capsys) -> None:
    with pytest.raises(SystemExit) as exc:
        main(["replay", "--out", "/tmp/x.jsonl"])
    assert exc.value.code == 2


def test_replay_nonexistent_fixture_is_runtime_error(tmp_path, capsys) -> None:
    rc = main(
        ["replay", "--fixture", str(tmp_path / "absent.jsonl"), "--out", str(tmp_path / "o")]
    )
    assert rc == 1
    assert "error" in capsys.readouterr().err


def test_replay_malformed_fixture_names_line(tmp_path, capsys) -> None:
    bad = tmp_path / "bad.jsonl"
    bad.write_text("not json\n", encoding="utf-8")
    rc = main(["replay", "--fixture", str(bad), "--out", str(tmp_path / "o.jsonl")])
    assert rc == 1
    assert "bad.jsonl:1" in capsys.readouterr().err


def test_replay_with_history_dir_saves_record(tmp_path) -> None:
    hist = tmp_path / "history"
    rc = main(
        [
            "replay",
            "--fixture",
            str(FIXTURE),
            "--out",
            str(tmp_path / "log.jsonl"),
            "--history-dir",
            str(hist),
        ]
    )
    assert rc == 0
    records = list(hist.glob("*.jsonl"))
    assert len(records) == 1
    # Virtual session: named from the 1970 epoch.
    assert records[0].stem == "1970-01-01T00-00-00-000"


def test_eval_on_golden_fixtures(tmp_path, capsys) -> None:
    out = tmp_path / "results.jsonl"
    rc = main(
        [
            "eval",
            "--annotations",
            str(GOLDEN / "annotations"),
            "--logs",
            str(GOLDEN / "logs"),
            "--out",
            str(out),
        ]
    )
    assert rc == 0
    table = capsys.readouterr().out
    assert "8.00" in table  # hand-scored golden total
    records = [json.loads(line) for line in out.read_text(encoding="utf-8").splitlines()]
    session = next(r for r in records if r["kind"] == "session")
    assert session["total"] == 8
    assert [s["point"] for s in session["per_sample"]] == [1, 0, 1, 0, 1, 1, 1, 1, 1, 1]


def test_eval_scores_file_reproduces_published_averages(tmp_path, capsys) -> None:
    scores = tmp_path / "scores.jsonl"
    table = {
        "PDD": {"Fruits": 7, "Make-ups": 8, "Clothes": 9, "Furniture": 6},
        "Kwai": {"Fruits": 7, "Make-ups": 8, "Clothes": 9, "Furniture": 10},
        "Douyin": {"Fruits": 5, "Make-ups": 9, "Clothes": 3, "Furniture": 10},
        "Taobao": {"Fruits": 1, "Make-ups": 10, "Clothes": 7, "Furniture": 10},
        "Xigua Video": {"Fruits": 4, "Make-ups": 10, "Clothes": 10, "Furniture": 10},
    }
    scores.write_text(
        "\n".join(
            json.dumps({"platform": p, "category": c, "total": t})
            for p, row in table.items()
            for c, t in row.items()
        ),
        encoding="utf-8",
    )
    assert main(["eval", "--scores", str(scores)]) == 0
    out = capsys.readouterr().out
    for value in ("7.50", "8.50", "6.75", "7.00", "4.80", "9.00", "7.60", "9.20", "7.65"):
        assert value in out


def test_eval_mismatched_dirs_fail(tmp_path, capsys) -> None:
    (tmp_path / "ann").mkdir()
    (tmp_path / "logs").mkdir()
    (tmp_path / "ann" / "a.json").write_text("{}", encoding="utf-8")
    rc = main(["eval", "--annotations", str(tmp_path / "ann"), "--logs", str(tmp_path / "logs")])
    assert rc == 1
    assert "mismatch" in capsys.readouterr().err


def test_eval_empty_dirs_is_ok(tmp_path, capsys) -> None:
    (tmp_path / "ann").mkdir()
    (tmp_path / "logs").mkdir()
    rc = main(["eval", "--annotations", str(tmp_path / "ann"), "--logs", str(tmp_path / "logs")])
    assert rc == 0
    assert "(no scores)" in capsys.readouterr().out


def test_history_list_and_show(tmp_path, capsys) -> None:
    hist = tmp_path / "history"
    main(
        [
            "replay",
            "--fixture",
            str(FIXTURE),
            "--out",
            str(tmp_path / "log.jsonl"),
            "--history-dir",
            str(hist),
        ]
    )
    capsys.readouterr()
    assert main(["history", "list", "--dir", str(hist)]) == 0
    listing = capsys.readouterr().out
    assert "1970-01-01T00-00-00-000" in listing

    assert main(["history", "show", "--dir", str(hist), "1970-01-01T00-00-00-000"]) == 0
    shown = capsys.readouterr().out
    assert "纯棉T恤" in shown
    assert "Price: 9.9" in shown


def test_serve_port_in_use_is_runtime_error(tmp_path, capsys) -> None:
    import socket

    blocker = socket.socket()
    blocker.bind(("127.0.0.1", 0))
    blocker.listen(1)
    port = blocker.getsockname()[1]
    try:
        rc = main(["serve", "--port", str(port)])
    finally:
        blocker.close()
    assert rc == 1
    assert "cannot bind" in capsys.readouterr().err


def test_config_file_applies_but_flags_win(tmp_path) -> None:
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"tick_ms": 60_000}), encoding="utf-8")
    out = tmp_path / "log.jsonl"
    rc = main(
        ["replay", "--fixture", str(FIXTURE), "--out", str(out), "--config", str(config)]
    )
    assert rc == 0
    messages = [json.loads(l) for l in out.read_text(encoding="utf-8").splitlines()]
    condensed = [m for m in messages if m["kind"] == "condensed"]
    assert len(condensed) == 5  # 300 s at a 60 s tick
