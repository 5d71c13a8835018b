import time

import numpy as np
import pytest

from oan.dialogue import Services, ServiceConfig, ToneSource, WavFileSink
from oan.led import format_animation
from oan.lola import GrantConflict
from oan.motion import parse_pos
from oan.orchestrator import (BUILTIN_GESTURES, ChatSession, ConfigError, EventLog,
                              GestureError, GestureLibrary, IdleSwayAction, InteractionState,
                              builtin_gesture, from_mapping, idle_sway, load_config,
                              pick_gesture, sway_script, without_time)
from oan.robot_model import ARMS, HEAD, LEGS, JointId, load_model
from oan.walk import WalkAction

MODEL = load_model()
SEQUENCE = ["Idle", "Listening", "Thinking", "Speaking", "Listening"]


def session_for(robot, services, *, tones=((440.0, 1.0),), seed=7, realtime=False,
                **overrides):
    config = load_config()
    config.services = ServiceConfig.from_mapping({"base_url": services.base_url, "timeout": 5},
                                                 env={})
    config.gestures.reseed(seed)
    for key, value in overrides.items():
        setattr(config, key, value)
    sink = WavFileSink()
    session = ChatSession(robot, config, Services.from_config(config.services),
                          ToneSource(tones), sink, realtime_playback=realtime)
    return session, sink


# -- gestures ------------------------------------------------------------------

def test_builtin_gestures_valid():
    for name in BUILTIN_GESTURES:
        script = builtin_gesture(name)
        assert set(script.roster) <= ARMS | HEAD
        for kf in script.keyframes:
            values = {j: v for j, v in zip(script.roster, kf.targets) if v is not None}
            assert all(MODEL.lower[j] <= v <= MODEL.upper[j] for j, v in values.items())


def test_pick_gesture_no_repeat():
    lib = GestureLibrary.default(seed=3)
    names = [pick_gesture(lib, "speaking")[0] for _ in range(200)]
    assert all(a != b for a, b in zip(names, names[1:]))
    assert set(names) == set(BUILTIN_GESTURES)


def test_pick_gesture_seeded():
    lib1, lib2 = GestureLibrary.default(seed=11), GestureLibrary.default(seed=11)
    assert [pick_gesture(lib1, "speaking")[0] for _ in range(20)] == \
        [pick_gesture(lib2, "speaking")[0] for _ in range(20)]


def test_pick_gesture_single_and_empty():
    lib = GestureLibrary({"nod": (builtin_gesture("nod"), "speaking")})
    assert [pick_gesture(lib, "speaking")[0] for _ in range(3)] == ["nod"] * 3
    with pytest.raises(GestureError):
        pick_gesture(lib, "idle")


def test_speaking_gestures_arms_and_head_only():
    legs = parse_pos("joints LKneePitch\n0.5 300\n")
    with pytest.raises(GestureError):
        GestureLibrary({"kick": (legs, "speaking")})
    GestureLibrary({"kick": (legs, "idle")})
    with pytest.raises(GestureError):
        GestureLibrary({"x": (legs, "dancing")})


# -- sway ----------------------------------------------------------------------

def test_sway_amplitude_bound():
    stance = np.zeros(len(JointId))
    script = sway_script(stance, 0.03)
    assert set(script.roster) == LEGS
    values = np.array([kf.targets for kf in script.keyframes])
    assert np.max(np.abs(values)) <= 0.03 + 1e-12
    with pytest.raises(GestureError):
        sway_script(stance, 0.031)
    with pytest.raises(GestureError):
        IdleSwayAction(amplitude=0.05)


def test_sway_on_robot_stays_small(robot):
    stance = robot.sensor.joint_positions.copy()
    handle = idle_sway(robot, amplitude=0.03, period=1.0)
    worst = 0.0
    end = time.monotonic() + 1.5
    while time.monotonic() < end:
        legs = sorted(LEGS)
        worst = max(worst, float(np.max(np.abs(robot.commanded.joint_positions[legs]
                                              - stance[legs]))))
        time.sleep(0.01)
    handle.cancel()
    handle.wait(2.0)
    assert 0.02 < worst <= 0.03 + 1e-9


def test_sway_refuses_while_walking(robot):
    walk = robot.start(WalkAction())
    with pytest.raises(GrantConflict):
        idle_sway(robot)
    walk.cancel()
    walk.wait(2.0)
    time.sleep(0.05)
    handle = idle_sway(robot)
    handle.cancel()
    handle.wait(2.0)


# -- config ----------------------------------------------------------------------

def test_example_config_loads():
    cfg = load_config(env={})
    assert cfg.persona.name == "NAO" and "robot" in cfg.persona.system_instructions
    assert cfg.gestures.seed == 7
    assert cfg.gestures.names("speaking") == sorted(
        ["open_arms", "wave_right", "explain_left", "shrug"])
    assert format_animation(cfg.led("Listening").animation) == \
        "rotate([blue, black*7], 0.8s)"
    assert cfg.tracking.label == "face"
    assert cfg.walk.step_period == 0.30


@pytest.mark.parametrize("data,fragment", [
    ({"colours": {}}, "unknown sections"),
    ({"persona": {"mood": "grumpy"}}, "mood"),
    ({"persona": {"instructions": " "}}, "empty"),
    ({"leds": {"thinking": "blink(chest, mauve, 1s)"}}, "mauve"),
    ({"gestures": {"speaking": ["moonwalk"]}}, "moonwalk"),
    ({"gestures": {"sway_amplitude": 0.1}}, "sway_amplitude"),
    ({"tracking": {"strategy": "random"}}, "strategy"),
    ({"tracking": {"k_yaw": 0}}, "gains"),
    ({"session": {"listening_timeout": "soon"}}, "listening_timeout"),
    ({"walk": {"step_period": -1}}, "step_period"),
])
def test_config_errors(data, fragment):
    with pytest.raises(ConfigError, match=fragment):
        from_mapping(data, env={})


def test_config_file_gesture_path(tmp_path):
    (tmp_path / "bow.pos").write_text("joints HeadPitch LShoulderPitch\n0.3 0.5 400\n")
    (tmp_path / "c.toml").write_text('[gestures]\nspeaking = ["bow.pos", "nod"]\n'
                                     '[services]\nbase_url = "http://x:1"\n')
    cfg = load_config(tmp_path / "c.toml", env={"OAN_CHAT_URL": "http://y/chat"})
    assert cfg.gestures.names("speaking") == ["bow", "nod"]
    assert cfg.services.stt_url == "http://x:1/stt"
    assert cfg.services.chat_url == "http://y/chat"
    (tmp_path / "bad.toml").write_text("[persona\n")
    with pytest.raises(ConfigError):
        load_config(tmp_path / "bad.toml")


def test_event_log_monotone(tmp_path):
    ticks = iter([0.0, 1.0, 0.5, 2.0, 1.5])
    log = EventLog(tmp_path / "e.jsonl", clock=lambda: next(ticks))
    for i in range(4):
        log.emit("x", i=i)
    log.close()
    times = [e["t"] for e in log.events]
    assert times == sorted(times) == [1.0, 1.0, 2.0, 2.0]
    assert without_time(log.events)[0] == {"event": "x", "i": 0}


# -- sessions --------------------------------------------------------------------

def test_session_sequence(robot, services):
    samples = []
    session, sink = session_for(robot, services, realtime=True)
    robot.hooks.append(lambda bot, s: samples.append((session.state.value,
                                                      session.leds.shown())))
    session.start()
    assert session.wait(20.0)
    log = session.log
    assert log.states() == SEQUENCE
    assert session.end_reason == "audio exhausted"
    assert [e["text"] for e in log.of("service") if e["service"] == "chat"] == \
        ["Hello! I am NAO."]
    assert sum(e["started"] for e in log.of("gesture")) == 1
    assert sink.played and sink.played[0].duration == pytest.approx(4 * 0.06)
    assert log.of("ownership")[-1]["conflicts"] == 0
    assert robot.arbiter.conflicts() == []
    # every state slice shows its own binding
    cfg = session.config
    for e in log.of("leds"):
        binding = cfg.led(e["state"])
        assert e["groups"] == {g.value: format_animation(binding.animation)
                               for g in binding.groups}
    for state in ("Listening", "Speaking"):
        expected = {g.value: format_animation(cfg.led(state).animation)
                    for g in cfg.led(state).groups}
        assert any(st == state and shown == expected for st, shown in samples)
    # tracking keeps running in every state
    tracked = {e["state"] for e in log.of("tracking") if e["active"]}
    assert {"Listening", "Thinking", "Speaking"} <= tracked
    time.sleep(0.05)
    assert robot.arbiter.holders() == {}


def test_stop_during_thinking(robot, services):
    services.inject_fault("/chat", "delay:3")
    session, _ = session_for(robot, services)
    session.start()
    end = time.monotonic() + 10
    while session.state is not InteractionState.Thinking and time.monotonic() < end:
        time.sleep(0.01)
    assert session.state is InteractionState.Thinking
    session.stop()
    assert session.finished
    assert session.state is InteractionState.Idle
    assert session.log.states()[-1] == "Idle"
    assert session.end_reason == "stopped"
    time.sleep(0.05)
    assert robot.arbiter.holders() == {}
    assert robot.active_actions() == []


def test_chat_failure_falls_back(robot, services):
    services.inject_fault("/chat", "status", count=2)
    session, _ = session_for(robot, services)
    session.start()
    assert session.wait(20.0)
    assert session.log.states() == SEQUENCE
    spoken = [e["text"] for e in session.log.of("speak")]
    assert spoken == [session.config.session.fallback]
    assert any(not e["ok"] for e in session.log.of("service"))


def test_stt_failure_keeps_listening(robot, services):
    services.inject_fault("/stt", "status", count=2)
    session, _ = session_for(robot, services, tones=((440.0, 1.0), (880.0, 1.0)))
    session.start()
    assert session.wait(20.0)
    states = session.log.states()
    assert states == SEQUENCE
    assert [e["text"] for e in session.log.of("service")
            if e["service"] == "stt" and e["ok"]] == ["goodbye"]


def test_thinking_timeout_apologizes(robot, services):
    services.inject_fault("/chat", "delay:2")
    session, _ = session_for(robot, services)
    session.config.session.thinking_timeout = 0.3
    session.start()
    assert session.wait(20.0)
    assert session.log.states() == SEQUENCE
    assert session.log.of("timeout")
    assert [e["text"] for e in session.log.of("speak")] == [session.config.session.apology]


def test_two_turns(robot, services):
    session, _ = session_for(robot, services, tones=((440.0, 1.0), (550.0, 1.0)))
    session.start()
    assert session.wait(20.0)
    assert session.log.states() == SEQUENCE + ["Thinking", "Speaking", "Listening"]
    replies = [e["text"] for e in session.log.of("speak")]
    assert replies == ["Hello! I am NAO.", "My name is NAO."]
    gestures = [e["name"] for e in session.log.of("gesture")]
    assert len(gestures) == 2 and gestures[0] != gestures[1]
    assert len(session.history.messages) == 5


def test_seeded_runs_identical(sim, services):
    from oan.runtime import Robot

    logs = []
    for _ in range(2):
        bot = Robot.connect(sim.endpoint)
        try:
            session, _ = session_for(bot, services, tones=((440.0, 1.0), (660.0, 1.0)))
            session.start()
            assert session.wait(20.0)
            logs.append(without_time(session.log.events))
        finally:
            bot.stop()
    assert logs[0] == logs[1]
