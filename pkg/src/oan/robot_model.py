"""Joint roster, joint limits, leg geometry and LED layout of the NAO V6.

Everything is loaded once from the bundled ``nao_v6_limits.txt`` table.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from importlib import resources

import numpy as np

LIMITS_FILE = "nao_v6_limits.txt"
SUPPORTED_VERSION = 1


class LimitsFileError(ValueError):
    pass


class JointId(enum.IntEnum):
    HeadYaw = 0
    HeadPitch = 1
    LShoulderPitch = 2
    LShoulderRoll = 3
    LElbowYaw = 4
    LElbowRoll = 5
    LWristYaw = 6
    LHand = 7
    RShoulderPitch = 8
    RShoulderRoll = 9
    RElbowYaw = 10
    RElbowRoll = 11
    RWristYaw = 12
    RHand = 13
    HipYawPitch = 14
    LHipRoll = 15
    LHipPitch = 16
    LKneePitch = 17
    LAnklePitch = 18
    LAnkleRoll = 19
    RHipRoll = 20
    RHipPitch = 21
    RKneePitch = 22
    RAnklePitch = 23
    RAnkleRoll = 24

    @classmethod
    def parse(cls, name: str) -> "JointId":
        try:
            return cls[name]
        except KeyError:
            raise ValueError(f"unknown joint name {name!r}") from None


NUM_JOINTS = len(JointId)

HEAD = frozenset({JointId.HeadYaw, JointId.HeadPitch})
LEFT_ARM = frozenset(JointId(i) for i in range(2, 8))
RIGHT_ARM = frozenset(JointId(i) for i in range(8, 14))
ARMS = LEFT_ARM | RIGHT_ARM
LEFT_LEG = frozenset({JointId.HipYawPitch} | {JointId(i) for i in range(15, 20)})
RIGHT_LEG = frozenset({JointId.HipYawPitch} | {JointId(i) for i in range(20, 25)})
LEGS = LEFT_LEG | RIGHT_LEG

# (hipYawPitch, hipRoll, hipPitch, kneePitch, anklePitch, ankleRoll)
LEG_CHAIN = {
    "left": (JointId.HipYawPitch, JointId.LHipRoll, JointId.LHipPitch,
             JointId.LKneePitch, JointId.LAnklePitch, JointId.LAnkleRoll),
    "right": (JointId.HipYawPitch, JointId.RHipRoll, JointId.RHipPitch,
              JointId.RKneePitch, JointId.RAnklePitch, JointId.RAnkleRoll),
}


class LedGroup(enum.Enum):
    Chest = "Chest"
    LeftEye = "LeftEye"
    RightEye = "RightEye"
    LeftEar = "LeftEar"
    RightEar = "RightEar"
    LeftFoot = "LeftFoot"
    RightFoot = "RightFoot"
    Skull = "Skull"


@dataclass(frozen=True)
class LedLayout:
    count: int
    rgb: bool

    @property
    def arity(self) -> int:
        return self.count * 3 if self.rgb else self.count

    @property
    def is_ring(self) -> bool:
        return self.count > 1


@dataclass(frozen=True)
class LegGeometry:
    hip_offset_y: float
    hip_offset_z: float
    thigh_length: float
    tibia_length: float
    foot_height: float

    @property
    def reach(self) -> float:
        return self.thigh_length + self.tibia_length

    def hip(self, side: str) -> np.ndarray:
        sign = 1.0 if side == "left" else -1.0
        return np.array([0.0, sign * self.hip_offset_y, -self.hip_offset_z])


@dataclass(frozen=True)
class RobotModel:
    version: int
    lower: np.ndarray
    upper: np.ndarray
    max_velocity: np.ndarray
    geometry: LegGeometry
    leds: dict

    def clamp(self, positions: np.ndarray) -> np.ndarray:
        return np.clip(positions, self.lower, self.upper)

    def within(self, joint: JointId, value: float, eps: float = 0.0) -> bool:
        return self.lower[joint] - eps <= value <= self.upper[joint] + eps


def parse_limits(text: str) -> RobotModel:
    version = None
    joints = {}
    geometry = {}
    leds = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        try:
            if kind == "version":
                version = int(parts[1])
            elif kind == "joint":
                _, name, ordinal, lo, hi, vel = parts
                joints[JointId.parse(name)] = (int(ordinal), float(lo), float(hi), float(vel))
            elif kind == "geometry":
                geometry[parts[1]] = float(parts[2])
            elif kind == "led":
                _, name, count, mode = parts
                leds[LedGroup(name)] = LedLayout(int(count), mode == "rgb")
            else:
                raise LimitsFileError(f"line {lineno}: unknown record {kind!r}")
        except (ValueError, IndexError) as exc:
            if isinstance(exc, LimitsFileError):
                raise
            raise LimitsFileError(f"line {lineno}: {exc}") from None
    if version != SUPPORTED_VERSION:
        raise LimitsFileError(f"unsupported limits file version {version}")
    if set(joints) != set(JointId):
        raise LimitsFileError("limits file must list all 25 joints")
    lower = np.empty(NUM_JOINTS)
    upper = np.empty(NUM_JOINTS)
    vel = np.empty(NUM_JOINTS)
    for joint, (ordinal, lo, hi, v) in joints.items():
        if ordinal != int(joint):
            raise LimitsFileError(f"{joint.name}: ordinal {ordinal} != {int(joint)}")
        if not lo < hi or v <= 0:
            raise LimitsFileError(f"{joint.name}: invalid limits")
        lower[joint], upper[joint], vel[joint] = lo, hi, v
    if set(leds) != set(LedGroup):
        raise LimitsFileError("limits file must list all LED groups")
    return RobotModel(version, lower, upper, vel, LegGeometry(**geometry), leds)


_MODEL = None


def load_model() -> RobotModel:
    global _MODEL
    if _MODEL is None:
        text = resources.files("oan.data").joinpath(LIMITS_FILE).read_text()
        _MODEL = parse_limits(text)
    return _MODEL
