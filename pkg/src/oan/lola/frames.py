"""Per-cycle hardware state exchanged with the robot."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from oan.robot_model import NUM_JOINTS, LedGroup, load_model

TOUCH_NAMES = (
    "HeadFront", "HeadMiddle", "HeadRear", "ChestButton",
    "LFootLeft", "LFootRight", "RFootLeft", "RFootRight",
)
# per foot: front-left, front-right, rear-left, rear-right; left foot first
FSR_NAMES = (
    "LFrontLeft", "LFrontRight", "LRearLeft", "LRearRight",
    "RFrontLeft", "RFrontRight", "RRearLeft", "RRearRight",
)


def led_arity(group: LedGroup) -> int:
    return load_model().leds[group].arity


class LedState:
    """LED channel values per group, all in [0, 1]."""

    __slots__ = ("values",)

    def __init__(self, values: dict | None = None):
        self.values = {g: np.zeros(led_arity(g)) for g in LedGroup}
        if values:
            for group, arr in values.items():
                self.values[LedGroup(group)] = np.asarray(arr, dtype=float).copy()

    def __getitem__(self, group: LedGroup) -> np.ndarray:
        return self.values[group]

    def __setitem__(self, group: LedGroup, value) -> None:
        self.values[group] = np.asarray(value, dtype=float).copy()

    def copy(self) -> "LedState":
        return LedState(self.values)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LedState):
            return NotImplemented
        return all(np.array_equal(self.values[g], other.values[g]) for g in LedGroup)

    def __repr__(self) -> str:
        return f"LedState({ {g.value: v.tolist() for g, v in self.values.items()} })"


def _arr_eq(a, b) -> bool:
    return np.array_equal(np.asarray(a), np.asarray(b))


@dataclass(eq=False)
class SensorFrame:
    cycle_index: int = 0
    timestamp: float = 0.0
    joint_positions: np.ndarray = field(default_factory=lambda: np.zeros(NUM_JOINTS))
    joint_stiffness: np.ndarray = field(default_factory=lambda: np.zeros(NUM_JOINTS))
    gyro: np.ndarray = field(default_factory=lambda: np.zeros(3))
    accel: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 9.81]))
    torso_angles: np.ndarray = field(default_factory=lambda: np.zeros(2))
    fsr: np.ndarray = field(default_factory=lambda: np.zeros(8))
    touch: np.ndarray = field(default_factory=lambda: np.zeros(8, dtype=bool))
    battery_charge: float = 1.0

    def __eq__(self, other) -> bool:
        if not isinstance(other, SensorFrame):
            return NotImplemented
        return (
            self.cycle_index == other.cycle_index
            and self.timestamp == other.timestamp
            and self.battery_charge == other.battery_charge
            and all(_arr_eq(getattr(self, f), getattr(other, f)) for f in (
                "joint_positions", "joint_stiffness", "gyro", "accel",
                "torso_angles", "fsr", "touch"))
        )

    def touched(self, name: str) -> bool:
        return bool(self.touch[TOUCH_NAMES.index(name)])

    @property
    def left_fsr(self) -> float:
        return float(np.sum(self.fsr[:4]))

    @property
    def right_fsr(self) -> float:
        return float(np.sum(self.fsr[4:]))


@dataclass(eq=False)
class ActuatorFrame:
    joint_positions: np.ndarray = field(default_factory=lambda: np.zeros(NUM_JOINTS))
    joint_stiffness: np.ndarray = field(default_factory=lambda: np.zeros(NUM_JOINTS))
    leds: LedState = field(default_factory=LedState)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ActuatorFrame):
            return NotImplemented
        return (
            _arr_eq(self.joint_positions, other.joint_positions)
            and _arr_eq(self.joint_stiffness, other.joint_stiffness)
            and self.leds == other.leds
        )

    def copy(self) -> "ActuatorFrame":
        return ActuatorFrame(
            self.joint_positions.copy(), self.joint_stiffness.copy(), self.leds.copy()
        )

    @classmethod
    def holding(cls, sensor: SensorFrame) -> "ActuatorFrame":
        """Frame that keeps the robot where the sensors say it is."""
        model = load_model()
        return cls(model.clamp(sensor.joint_positions.copy()),
                   sensor.joint_stiffness.copy())
