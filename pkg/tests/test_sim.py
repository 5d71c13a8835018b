import time

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oan.lola import ActuatorFrame, connect, decode_sensors, encode_actuators, encode_sensors
from oan.lola.codec import sensors_from_message
from oan.robot_model import JointId, load_model
from oan.sim import (CYCLE_PERIOD, ScenarioError, SimConfig, initial_state, load_scenario,
                     parse_scenario, sense, step)

MODEL = load_model()


def hold_frame(state):
    return ActuatorFrame(state.positions.copy(), np.ones(25))


def test_command_equal_to_position_is_fixpoint():
    cfg = SimConfig()
    state = initial_state(cfg)
    new, frame = step(state, hold_frame(state), CYCLE_PERIOD, cfg)
    assert np.array_equal(new.positions, state.positions)
    assert frame.cycle_index == state.cycle_index + 1


def test_head_yaw_step_is_velocity_clamped():
    cfg = SimConfig()
    state = initial_state(cfg)
    act = hold_frame(state)
    act.joint_positions[JointId.HeadYaw] = 1.0
    new, _ = step(state, act, 1 / 83, cfg)
    expected = min(1.0, 8.26 / 83)
    assert new.positions[JointId.HeadYaw] == pytest.approx(expected, abs=1e-15)
    assert round(new.positions[JointId.HeadYaw], 4) == 0.0995


def test_zero_stiffness_leaves_joint_free():
    cfg = SimConfig()
    state = initial_state(cfg)
    act = ActuatorFrame(state.positions.copy(), np.zeros(25))
    act.joint_positions[JointId.HeadYaw] = 1.0
    new, _ = step(state, act, CYCLE_PERIOD, cfg)
    assert new.positions[JointId.HeadYaw] == 0.0


def test_standing_fsr_is_symmetric():
    frame = sense(initial_state(SimConfig()), SimConfig())
    assert frame.left_fsr == pytest.approx(frame.right_fsr)
    assert frame.left_fsr + frame.right_fsr == pytest.approx(5.48)
    assert frame.fsr.shape == (8,)


def test_imu_baseline():
    frame = sense(initial_state(SimConfig()), SimConfig())
    assert frame.accel.tolist() == [0.0, 0.0, 9.81]
    assert frame.gyro.tolist() == [0.0, 0.0, 0.0]


def _stream(seed, commands):
    cfg = SimConfig(seed=seed, sensor_noise_std={"gyro": 0.01, "fsr": 0.05})
    state = initial_state(cfg)
    out = []
    for act in commands:
        state, frame = step(state, act, cfg.cycle_period, cfg)
        out.append(encode_sensors(frame))
    return out


def _commands(rng, n):
    out = []
    for _ in range(n):
        pos = MODEL.lower + rng.random(25) * (MODEL.upper - MODEL.lower)
        out.append(ActuatorFrame(MODEL.clamp(pos), np.ones(25)))
    return out


def test_determinism_under_fixed_seed():
    cmds = _commands(np.random.default_rng(3), 50)
    assert _stream(7, cmds) == _stream(7, cmds)
    assert _stream(7, cmds) != _stream(8, cmds)


@given(st.integers(0, 2**31), st.integers(5, 40))
def test_velocity_bound_and_protocol_conformance(seed, n):
    cfg = SimConfig(seed=seed, sensor_noise_std={"gyro": 0.1, "accel": 0.1, "fsr": 0.5})
    state = initial_state(cfg)
    prev = state.positions.copy()
    for act in _commands(np.random.default_rng(seed), n):
        state, frame = step(state, act, cfg.cycle_period, cfg)
        assert np.all(np.abs(frame.joint_positions - prev)
                      <= MODEL.max_velocity * cfg.cycle_period + 1e-9)
        assert decode_sensors(encode_sensors(frame)) == frame
        prev = frame.joint_positions


SCENARIO = """\
# standing, then lift the right foot
0.0   fsr 2.7 2.7
0.5   fsr 2.7 0.0
0.5   gyro 0.0 0.3 0.0
1.0   touch HeadFront 1
1.5   battery 0.5
"""


def test_scenario_events_apply_on_time():
    cfg = SimConfig(scenario=parse_scenario(SCENARIO))
    state = initial_state(cfg)
    frames = []
    for _ in range(int(2.0 * 83)):
        state, frame = step(state, None, cfg.cycle_period, cfg)
        frames.append(frame)
    at = {round(f.timestamp, 6): f for f in frames}
    before = frames[int(0.45 * 83)]
    after = frames[int(0.55 * 83)]
    assert before.right_fsr == pytest.approx(2.7) and after.right_fsr == 0.0
    assert after.gyro[1] == 0.3
    assert frames[-1].touched("HeadFront") and frames[-1].battery_charge == 0.5
    assert len(at) == len(frames)


@pytest.mark.parametrize("text, line", [
    ("0.0 fsr 1 2 3\n", 1),
    ("0.0 gyro 0 0 0\n0.5 wobble 1\n", 2),
    ("# c\n\n1.0 battery 0.5\n0.5 battery 0.4\n", 4),
    ("x gyro 0 0 0\n", 1),
    ("0.0 touch Nose 1\n", 1),
    ("0.0 battery 2\n", 1),
    ("0.0 joint Elbow 1\n", 1),
])
def test_scenario_errors_carry_line(text, line):
    with pytest.raises(ScenarioError) as info:
        parse_scenario(text)
    assert info.value.line == line


def test_load_scenario(tmp_path):
    path = tmp_path / "s.txt"
    path.write_text(SCENARIO)
    assert len(load_scenario(path).events) == 5


def test_server_streams_valid_frames(sim):
    session = connect(sim.endpoint)
    cycles = [sensors_from_message(session.recv(1.0)).cycle_index for _ in range(10)]
    session.close()
    assert np.all(np.diff(cycles) == 1)


def test_server_holds_pose_and_accepts_reconnect(sim, endpoint):
    session = connect(endpoint)
    frame = sensors_from_message(session.recv(1.0))
    act = ActuatorFrame(frame.joint_positions.copy(), np.ones(25))
    act.joint_positions[JointId.HeadPitch] = 0.2
    for _ in range(20):
        session.recv(1.0)
        session.send(encode_actuators(act))
    session.close()
    time.sleep(0.1)
    held = sim.snapshot().positions[JointId.HeadPitch]
    assert held == pytest.approx(0.2)
    session = connect(endpoint)
    again = sensors_from_message(session.recv(1.0))
    session.close()
    assert again.joint_positions[JointId.HeadPitch] == pytest.approx(0.2)
    assert sim.sessions == 2
