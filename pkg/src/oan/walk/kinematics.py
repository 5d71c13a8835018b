"""Analytic leg kinematics with the 45-degree shared HipYawPitch axis.

Poses are in the torso frame (x forward, y left, z up). A FootPose is the
sole point under the ankle; the foot is kept flat and ``yaw`` is its heading.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from oan import kernels
from oan.robot_model import LEG_CHAIN, LegGeometry, load_model

SIDES = ("left", "right")


class OutOfWorkspace(ValueError):
    pass


@dataclass(frozen=True)
class FootPose:
    x: float
    y: float
    z: float
    yaw: float = 0.0

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def mirrored(self) -> "FootPose":
        return FootPose(self.x, -self.y, self.z, -self.yaw)


@dataclass(frozen=True)
class LegJoints:
    hip_yaw_pitch: float = 0.0
    hip_roll: float = 0.0
    hip_pitch: float = 0.0
    knee_pitch: float = 0.0
    ankle_pitch: float = 0.0
    ankle_roll: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.hip_yaw_pitch, self.hip_roll, self.hip_pitch,
                         self.knee_pitch, self.ankle_pitch, self.ankle_roll])

    @classmethod
    def from_array(cls, a) -> "LegJoints":
        return cls(*(float(x) for x in a))

    def mirrored(self) -> "LegJoints":
        return LegJoints(self.hip_yaw_pitch, -self.hip_roll, self.hip_pitch,
                         self.knee_pitch, self.ankle_pitch, -self.ankle_roll)


def side_sign(side: str) -> float:
    if side not in SIDES:
        raise ValueError(f"side must be 'left' or 'right', not {side!r}")
    return 1.0 if side == "left" else -1.0


def geometry_vector(geometry: LegGeometry | None = None) -> np.ndarray:
    g = geometry or load_model().geometry
    return np.array([g.hip_offset_y, g.hip_offset_z, g.thigh_length,
                     g.tibia_length, g.foot_height])


def leg_fk_full(joints, side: str, geometry: LegGeometry | None = None):
    """Sole position and foot rotation matrix."""
    j = joints.as_array() if isinstance(joints, LegJoints) else np.asarray(joints, dtype=float)
    return kernels.leg_fk_kernel(j, side_sign(side), geometry_vector(geometry))


def leg_fk(joints, side: str, geometry: LegGeometry | None = None) -> FootPose:
    sole, rot = leg_fk_full(joints, side, geometry)
    return FootPose(float(sole[0]), float(sole[1]), float(sole[2]),
                    math.atan2(rot[1, 0], rot[0, 0]))


def ankle_distance(target: FootPose, side: str, geometry: LegGeometry | None = None) -> float:
    g = geometry or load_model().geometry
    ankle = target.position + np.array([0.0, 0.0, g.foot_height])
    return float(np.linalg.norm(ankle - g.hip(side)))


def check_limits(joints: np.ndarray, side: str, eps: float = 1e-9) -> list:
    model = load_model()
    bad = []
    for joint, value in zip(LEG_CHAIN[side], joints):
        if not model.within(joint, value, eps):
            bad.append((joint.name, float(value)))
    return bad


def leg_ik(target: FootPose, side: str, geometry: LegGeometry | None = None,
           hip_yaw_pitch: float | None = None, enforce_limits: bool = True) -> LegJoints:
    """Joint angles placing the flat foot at ``target``.

    With ``hip_yaw_pitch`` given, the shared joint is held at that value and the
    foot heading follows from it instead of from ``target.yaw``.
    Raises :class:`OutOfWorkspace` when the pose cannot be reached.
    """
    g = geometry or load_model().geometry
    gv = geometry_vector(g)
    sign = side_sign(side)
    d = ankle_distance(target, side, g)
    if d > g.reach + 1e-12:
        raise OutOfWorkspace(f"{side} foot target {d:.6f} m from hip, reach is {g.reach:.6f} m")
    sole = target.position
    if hip_yaw_pitch is None:
        model = load_model()
        hyp_limit = max(abs(model.lower[LEG_CHAIN[side][0]]), abs(model.upper[LEG_CHAIN[side][0]]))
        if abs(target.yaw) > hyp_limit:
            raise OutOfWorkspace(f"foot yaw {target.yaw} beyond HipYawPitch range")
        joints, status = kernels.leg_ik_kernel(sole, float(target.yaw), sign, gv, 1e-12)
    else:
        joints, status = kernels.leg_ik_fixed_hyp_kernel(sole, float(hip_yaw_pitch), sign, gv, 1e-12)
    if status != kernels.IK_OK:
        raise OutOfWorkspace(f"{side} foot target {target} is not reachable")
    if enforce_limits:
        bad = check_limits(joints, side)
        if bad:
            raise OutOfWorkspace(f"{side} foot target {target} needs joints beyond limits: {bad}")
    return LegJoints.from_array(joints)
