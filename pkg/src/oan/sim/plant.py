"""Kinematic plant model of the simulated robot."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from oan.kernels import servo_step
from oan.lola.frames import TOUCH_NAMES, ActuatorFrame, SensorFrame
from oan.robot_model import NUM_JOINTS, JointId, load_model
from oan.sim.scenario import ScenarioScript

CYCLE_PERIOD = 1.0 / 83.0
ROBOT_MASS_KG = 5.48
GRAVITY = 9.81
EVENT_EPS = 1e-6  # scenario times written with a few decimals still land on their cycle


def standing_fsr() -> np.ndarray:
    return np.full(8, ROBOT_MASS_KG / 8.0)


@dataclass
class SimConfig:
    cycle_period: float = CYCLE_PERIOD
    max_joint_velocity: np.ndarray | None = None
    sensor_noise_std: dict = field(default_factory=dict)  # gyro/accel/fsr/angles -> std
    seed: int = 0
    scenario: ScenarioScript | None = None

    def __post_init__(self):
        if not self.cycle_period > 0:
            raise ValueError("cycle_period must be > 0")
        if self.max_joint_velocity is None:
            self.max_joint_velocity = load_model().max_velocity.copy()
        self.max_joint_velocity = np.asarray(self.max_joint_velocity, dtype=float)
        for key, std in self.sensor_noise_std.items():
            if std < 0:
                raise ValueError(f"noise std for {key} must be >= 0")


@dataclass
class SimState:
    cycle_index: int = 0
    time: float = 0.0
    positions: np.ndarray = field(default_factory=lambda: np.zeros(NUM_JOINTS))
    stiffness: np.ndarray = field(default_factory=lambda: np.zeros(NUM_JOINTS))
    gyro_offset: np.ndarray = field(default_factory=lambda: np.zeros(3))
    accel_offset: np.ndarray = field(default_factory=lambda: np.zeros(3))
    angles: np.ndarray = field(default_factory=lambda: np.zeros(2))
    fsr: np.ndarray = field(default_factory=standing_fsr)
    touch: np.ndarray = field(default_factory=lambda: np.zeros(8, dtype=bool))
    battery: float = 1.0
    next_event: int = 0

    def copy(self) -> "SimState":
        return replace(
            self, positions=self.positions.copy(), stiffness=self.stiffness.copy(),
            gyro_offset=self.gyro_offset.copy(), accel_offset=self.accel_offset.copy(),
            angles=self.angles.copy(), fsr=self.fsr.copy(), touch=self.touch.copy())


def apply_event(state: SimState, event) -> None:
    ch, v = event.channel, event.values
    if ch == "fsr":
        state.fsr = np.array(v) if len(v) == 8 else np.repeat(np.array(v) / 4.0, 4)
    elif ch == "gyro":
        state.gyro_offset = np.array(v)
    elif ch == "accel":
        state.accel_offset = np.array(v)
    elif ch == "angles":
        state.angles = np.array(v)
    elif ch == "touch":
        state.touch[TOUCH_NAMES.index(event.name)] = v[0] != 0
    elif ch == "battery":
        state.battery = float(v[0])
    elif ch == "joint":
        joint = JointId.parse(event.name)
        model = load_model()
        state.positions[joint] = min(max(v[0], model.lower[joint]), model.upper[joint])


def sense(state: SimState, config: SimConfig) -> SensorFrame:
    """Sensor frame for ``state``; noise depends only on (seed, cycle)."""
    noise = config.sensor_noise_std
    rng = np.random.default_rng([config.seed, state.cycle_index])
    gyro = state.gyro_offset.copy()
    accel = np.array([0.0, 0.0, GRAVITY]) + state.accel_offset
    angles = state.angles.copy()
    fsr = state.fsr.copy()
    if noise.get("gyro", 0.0) > 0:
        gyro += rng.normal(0.0, noise["gyro"], 3)
    if noise.get("accel", 0.0) > 0:
        accel += rng.normal(0.0, noise["accel"], 3)
    if noise.get("angles", 0.0) > 0:
        angles += rng.normal(0.0, noise["angles"], 2)
    if noise.get("fsr", 0.0) > 0:
        fsr = np.maximum(fsr + rng.normal(0.0, noise["fsr"], 8), 0.0)
    return SensorFrame(
        cycle_index=state.cycle_index, timestamp=state.time,
        joint_positions=state.positions.copy(), joint_stiffness=state.stiffness.copy(),
        gyro=gyro, accel=accel, torso_angles=angles, fsr=fsr,
        touch=state.touch.copy(), battery_charge=state.battery)


def step(state: SimState, actuators: ActuatorFrame | None, dt: float,
         config: SimConfig) -> tuple[SimState, SensorFrame]:
    """Advance the plant by ``dt`` under ``actuators`` (``None`` holds)."""
    if not dt > 0:
        raise ValueError("dt must be > 0")
    new = state.copy()
    if actuators is not None:
        model = load_model()
        command = model.clamp(np.asarray(actuators.joint_positions, dtype=float))
        new.stiffness = np.clip(np.asarray(actuators.joint_stiffness, dtype=float), 0.0, 1.0)
        servo_step(state.positions, command, new.stiffness, config.max_joint_velocity,
                   dt, new.positions)
    new.cycle_index = state.cycle_index + 1
    new.time = new.cycle_index * config.cycle_period
    if config.scenario is not None:
        events = config.scenario.events
        while new.next_event < len(events) and events[new.next_event].t <= new.time + EVENT_EPS:
            apply_event(new, events[new.next_event])
            new.next_event += 1
    return new, sense(new, config)


def initial_state(config: SimConfig) -> SimState:
    state = SimState(positions=load_model().clamp(np.zeros(NUM_JOINTS)))
    if config.scenario is not None:
        events = config.scenario.events
        while state.next_event < len(events) and events[state.next_event].t <= 0.0:
            apply_event(state, events[state.next_event])
            state.next_event += 1
    return state
