"""Helpers shared by the integration and acceptance tests."""

import math
import struct
import time

import numpy as np

from oan.motion import KeyFrame, PlayAction, PosScript, record, reduce_to_script
from oan.motion.pos import HOLD
from oan.robot_model import JointId, load_model
from oan.runtime import Robot
from oan.sim import SimConfig, SimServer, parse_scenario
from oan.walk import FootPose

MODEL = load_model()
G = MODEL.geometry
DT = 1.0 / 83.0


def oracle_sample(script: PosScript, start: dict, t: float) -> np.ndarray:
    """Brute-force interpolation: walk the segments one by one."""
    current = np.array([start[j] for j in script.roster], dtype=float)
    seg_start = 0.0
    for kf in script.keyframes:
        seg_end = seg_start + kf.duration / 1000.0
        target = np.array([current[i] if v is HOLD else v
                           for i, v in enumerate(kf.targets)], dtype=float)
        if t <= seg_end:
            if t <= seg_start:
                return current
            a = (t - seg_start) / (seg_end - seg_start)
            return current + a * (target - current)
        current = target
        seg_start = seg_end
    return current


def random_script(rng: np.random.Generator, n_keyframes: int = 5) -> PosScript:
    joints = sorted(rng.choice(25, size=int(rng.integers(1, 6)), replace=False))
    frames = []
    for _ in range(n_keyframes):
        targets = []
        for j in joints:
            if rng.random() < 0.15:
                targets.append(HOLD)
            else:
                lo, hi = MODEL.lower[j], MODEL.upper[j]
                targets.append(float(lo + rng.random() * (hi - lo)))
        frames.append(KeyFrame(tuple(targets), float(rng.integers(10, 800))))
    return PosScript(tuple(JointId(int(j)) for j in joints), tuple(frames), "random")


def demonstration_scenario(duration: float = 1.5) -> str:
    """A hand moving HeadYaw and LShoulderPitch smoothly, one event per cycle."""
    lines = []
    n = int(duration * 83)
    for k in range(1, n + 1):
        t = k * DT
        yaw = 0.6 * math.sin(2 * math.pi * t / duration)
        sp = 0.4 * (1 - math.cos(2 * math.pi * t / duration))
        lines.append(f"{t!r} joint HeadYaw {yaw!r}")
        lines.append(f"{t!r} joint LShoulderPitch {sp!r}")
    return "\n".join(lines) + "\n"


def record_reduce_replay(endpoint: str, tolerance: float = 0.01):
    """Record a demonstration on the sim, reduce it and replay it.

    Returns (recording, script, max deviation, allowed deviation).
    """
    mask = (JointId.HeadYaw, JointId.LShoulderPitch)
    cfg = SimConfig(scenario=parse_scenario(demonstration_scenario()))
    with SimServer(endpoint, cfg):
        robot = Robot.connect(endpoint)
        try:
            handle, _ = record(robot, mask, duration=1.4)
            handle.wait(5.0)
            recording = handle.result
            script = reduce_to_script(recording, tolerance)

            # back to where the demonstration started, then replay
            home = PosScript(mask, (KeyFrame(tuple(float(v) for v in recording.samples[0]),
                                             1000.0),), "home")
            robot.run(PlayAction(home), timeout=5.0)
            trace = {}
            robot.hooks.append(lambda r, s: trace.__setitem__(
                s.cycle_index, s.joint_positions[list(mask)].copy()))
            replay = PlayAction(script)
            robot.run(replay, timeout=10.0)
            time.sleep(0.05)
        finally:
            robot.stop()

    # a command computed at script time e is observed one cycle later
    first = round(replay._t0 / DT)
    worst = 0.0
    for t, ref in zip(recording.timestamps, recording.samples):
        cycle = first + round(recording.script_time(t) / DT) + 1
        worst = max(worst, float(np.max(np.abs(trace[cycle] - ref))))
    vmax = MODEL.max_velocity[list(mask)].max()
    return recording, script, worst, tolerance + vmax * DT


def simulate_walk(cmd, swing: str = "left", seconds: float = 20.0, params=None,
                  scenario=None):
    """Close the walk controller around the plant model, cycle by cycle.

    Returns (commands, positions): leg joint commands and sensed leg positions,
    one row per cycle, columns in LEG_JOINTS order.
    """
    from oan.lola import ActuatorFrame
    from oan.sim import initial_state, sense, step
    from oan.walk import LEG_JOINTS, GaitParams, WalkState, walk_tick

    params = params or GaitParams()
    cfg = SimConfig(scenario=scenario)
    state = initial_state(cfg)
    sensor = sense(state, cfg)
    ws = WalkState(swing=swing)
    act = ActuatorFrame.holding(sensor)
    act.joint_stiffness[14:] = 1.0
    commands, positions = [], []
    for _ in range(int(round(seconds * 83))):
        joints = walk_tick(sensor, cmd, ws, params)
        row = np.array([joints[j] for j in LEG_JOINTS])
        commands.append(row)
        act.joint_positions[14:25] = row
        state, sensor = step(state, act, cfg.cycle_period, cfg)
        positions.append(sensor.joint_positions[14:25].copy())
    return np.array(commands), np.array(positions)


def mirror_legs(rows: np.ndarray) -> np.ndarray:
    """Swap left/right leg columns (LEG_JOINTS order) and flip the roll signs."""
    flip = np.array([-1.0, 1.0, 1.0, 1.0, -1.0])
    return np.concatenate([rows[:, :1], rows[:, 6:11] * flip, rows[:, 1:6] * flip], axis=1)


def crossing_period(signal: np.ndarray, dt: float = DT) -> float:
    """Mean interval between upward mean-crossings (linearly interpolated)."""
    x = signal - 0.5 * (signal.max() + signal.min())
    ups = []
    for k in range(len(x) - 1):
        if x[k] < 0 <= x[k + 1]:
            ups.append((k + x[k] / (x[k] - x[k + 1])) * dt)
    return float(np.mean(np.diff(ups)))


PHASE_SCRIPT = (  # (cycles, left kg, right kg, expected label)
    (40, 2.7, 2.7, "DoubleSupport"),
    (40, 5.4, 0.0, "LeftSupport"),
    (20, 0.0, 0.0, "Airborne"),
    (40, 0.0, 5.4, "RightSupport"),
)


def phase_stream(dither: float = 0.0, seed: int = 0):
    """FSR frames following PHASE_SCRIPT, each foot sum dithered by up to
    ``dither`` kg. Returns (list of 8-vectors, expected labels per frame)."""
    rng = np.random.default_rng(seed)
    frames, labels = [], []
    for cycles, left, right, label in PHASE_SCRIPT:
        for _ in range(cycles):
            sums = np.array([left, right]) + rng.uniform(-dither, dither, 2)
            sums = np.maximum(sums, 0.0)
            frames.append(np.repeat(sums / 4.0, 4))
            labels.append(label)
    return frames, labels


def boundary_phase_stream(threshold: float, seed: int = 0, settle: int = 3):
    """Like :func:`phase_stream`, but after ``settle`` clear cycles per segment a
    loaded foot dithers in threshold·(1 ± 0.4) and an unloaded one in
    threshold·(0.5 ± 0.4): both sides of each hysteresis edge."""
    rng = np.random.default_rng(seed)
    frames, labels = [], []
    for cycles, left, right, label in PHASE_SCRIPT:
        for k in range(cycles):
            sums = np.array([left, right], dtype=float)
            if k >= settle:
                centre = np.where(sums > 0, threshold, 0.5 * threshold)
                sums = centre + rng.uniform(-0.4, 0.4, 2) * threshold
            frames.append(np.repeat(sums / 4.0, 4))
            labels.append(label)
    return frames, labels


# -- codec --------------------------------------------------------------------------

def _str(s: str) -> bytes:
    raw = s.encode()
    assert len(raw) < 32
    return bytes([0xA0 | len(raw)]) + raw


def _doubles(values) -> bytes:
    n = len(values)
    head = bytes([0x90 | n]) if n < 16 else b"\xdc" + struct.pack(">H", n)
    return head + b"".join(b"\xcb" + struct.pack(">d", v) for v in values)


def golden_actuator_bytes() -> bytes:
    positions = [0.0] * 25
    positions[5] = -0.0349   # LElbowRoll sits at its upper limit in the neutral pose
    positions[11] = 0.0349   # RElbowRoll, lower limit
    positions[0] = 0.5       # HeadYaw
    positions[2] = -1.25     # LShoulderPitch
    stiffness = [0.0] * 25
    stiffness[0] = 1.0
    stiffness[2] = 1.0
    out = b"\x8a"
    out += _str("Position") + _doubles(positions)
    out += _str("Stiffness") + _doubles(stiffness)
    for key, n in (("Chest", 3), ("LEye", 24), ("REye", 24), ("LEar", 10), ("REar", 10),
                   ("LFoot", 3), ("RFoot", 3), ("Skull", 12)):
        out += _str(key) + _doubles([0.0] * n)
    return out


# -- kinematics ---------------------------------------------------------------------

def rotation_error(R, yaw):
    c, s = math.cos(yaw), math.sin(yaw)
    Rz = np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])
    cos_angle = (np.trace(Rz.T @ R) - 1) / 2
    return math.acos(min(1.0, max(-1.0, cos_angle)))


def reachable_targets(rng, side, n):
    """Flat-foot poses whose ankle lies inside the leg's reach."""
    out = []
    hip = G.hip(side)
    while len(out) < n:
        d = rng.uniform(0.6, 0.995) * G.reach
        el = rng.uniform(-0.45, 0.45)
        az = rng.uniform(-0.35, 0.35)
        ankle = hip + d * np.array([math.sin(el), math.cos(el) * math.sin(az),
                                    -math.cos(el) * math.cos(az)])
        out.append(FootPose(ankle[0], ankle[1], ankle[2] - G.foot_height,
                            rng.uniform(-0.4, 0.4)))
    return out
