import json

import pytest

from oan.cli import _joints, build_parser, main
from oan.dialogue import tone, write_wav
from oan.motion import load_pos
from oan.orchestrator import read_log
from oan.robot_model import ARMS, JointId


def test_parser_has_every_command():
    parser = build_parser()
    for argv in (["sim", "--duration", "1"], ["play", "x.pos"], ["record", "--mask", "head",
                                                                   "--out", "o.pos"],
                 ["walk", "--vx", "0.05"], ["led", "eyes", "solid(red)"], ["track"],
                 ["mock-services", "--port", "0"], ["chat", "--audio", "file:a.wav"]):
        args = parser.parse_args(argv)
        assert callable(args.func)


def test_joints_groups():
    assert _joints(None) is None
    assert set(_joints("arms")) == ARMS
    assert _joints("HeadYaw, head") == sorted({JointId.HeadYaw, JointId.HeadPitch})
    with pytest.raises(ValueError):
        _joints("Tail")


def test_led_command(capsys):
    assert main(["led", "eyes", "blink(red, 0.2s)", "--duration", "0.3", "--with-sim"]) == 0
    shown = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert shown == {"LeftEye": "blink(red, 0.2s, 0.5)", "RightEye": "blink(red, 0.2s, 0.5)"}


def test_led_command_errors(capsys):
    assert main(["led", "tail", "solid(red)", "--with-sim"]) == 2
    assert main(["led", "eyes", "solid(mauve)", "--with-sim"]) == 1
    assert "mauve" in capsys.readouterr().err


def test_walk_command(capsys):
    assert main(["walk", "--vx", "0.05", "--duration", "1.0", "--with-sim"]) == 0
    assert "walked 1.0 s" in capsys.readouterr().out


def test_play_command(tmp_path, capsys):
    path = tmp_path / "nod.pos"
    path.write_text("joints HeadPitch\n0.2 200\n0.0 200\n")
    assert main(["play", str(path), "--mask", "head", "--with-sim"]) == 0
    assert "played nod" in capsys.readouterr().out


def test_record_command(tmp_path, capsys):
    out = tmp_path / "demo.pos"
    assert main(["record", "--mask", "HeadYaw", "--out", str(out), "--duration", "0.3",
                 "--with-sim"]) == 0
    script = load_pos(out)
    assert script.roster == (JointId.HeadYaw,)
    assert "keyframes" in capsys.readouterr().out


def test_track_command(capsys):
    assert main(["track", "--duration", "1.2", "--with-sim"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines and "cx=" in lines[-1]


def test_chat_command(tmp_path, services, capsys):
    wav = tmp_path / "hello.wav"
    write_wav(wav, tone(440, 1.0))
    log = tmp_path / "events.jsonl"
    argv = ["chat", "--audio", f"file:{wav}", "--services", services.base_url,
            "--log", str(log), "--with-sim", "--fast"]
    assert main(argv) == 0
    assert "ownership conflicts: 0" in capsys.readouterr().out
    states = [e["state"] for e in read_log(log) if e["event"] == "state"]
    assert states == ["Idle", "Listening", "Thinking", "Speaking", "Listening"]


def test_bad_audio_spec(capsys):
    assert main(["chat", "--audio", "mic:0", "--with-sim"]) == 1
    assert "unknown audio source" in capsys.readouterr().err
