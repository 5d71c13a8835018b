"""Open-loop omnidirectional gait: foot targets from a velocity command."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

from oan.robot_model import load_model
from oan.walk.kinematics import FootPose, ankle_distance

WORKSPACE_MARGIN = 1e-4


@dataclass(frozen=True)
class WalkCommand:
    vx: float = 0.0
    vy: float = 0.0
    omega: float = 0.0

    def clamped(self, params: "GaitParams") -> "WalkCommand":
        return WalkCommand(
            min(max(self.vx, -params.max_vx), params.max_vx),
            min(max(self.vy, -params.max_vy), params.max_vy),
            min(max(self.omega, -params.max_omega), params.max_omega))

    def scaled(self, k: float) -> "WalkCommand":
        return WalkCommand(self.vx * k, self.vy * k, self.omega * k)

    def mirrored(self) -> "WalkCommand":
        return WalkCommand(self.vx, -self.vy, -self.omega)

    @property
    def is_zero(self) -> bool:
        return self.vx == 0.0 and self.vy == 0.0 and self.omega == 0.0


@dataclass(frozen=True)
class GaitParams:
    step_period: float = 0.24
    step_height: float = 0.015
    body_height: float = 0.30
    foot_separation: float = 0.10
    max_vx: float = 0.10
    max_vy: float = 0.05
    max_omega: float = 0.5
    gyro_gain_pitch: float = 0.10
    gyro_gain_roll: float = 0.10
    gyro_lowpass_alpha: float = 0.2
    fsr_contact_threshold: float = 0.2
    max_swap_delay: float = 0.12

    def __post_init__(self):
        for f in fields(self):
            if not getattr(self, f.name) > 0:
                raise ValueError(f"{f.name} must be positive")
        if self.gyro_lowpass_alpha > 1:
            raise ValueError("gyro_lowpass_alpha must be in (0, 1]")
        g = load_model().geometry
        if not self.body_height < g.hip_offset_z + g.reach + g.foot_height:
            raise ValueError("body_height exceeds the fully stretched leg")

    @classmethod
    def from_mapping(cls, data: dict) -> "GaitParams":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown walk parameters: {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in data.items()})


def _poses(tau: float, swing: str, cmd: WalkCommand, params: GaitParams):
    T = params.step_period
    sx, sy, sw = cmd.vx * T, cmd.vy * T, cmd.omega * T
    lift = 0.0 if cmd.is_zero else params.step_height * math.sin(math.pi * tau)
    swing_k = -math.cos(math.pi * tau) / 2.0
    support_k = 0.5 - tau
    half = params.foot_separation / 2.0
    out = {}
    for side in ("left", "right"):
        bias = half if side == "left" else -half
        if side == swing:
            out[side] = FootPose(sx * swing_k, bias + sy * swing_k,
                                 -params.body_height + lift, sw * swing_k)
        else:
            out[side] = FootPose(sx * support_k, bias + sy * support_k,
                                 -params.body_height, sw * support_k)
    return out["left"], out["right"]


def _inside(pose: FootPose, side: str) -> bool:
    reach = load_model().geometry.reach
    return ankle_distance(pose, side) <= reach - WORKSPACE_MARGIN


def gait_targets(tau: float, swing: str, cmd: WalkCommand, params: GaitParams):
    """(left, right) foot poses at step phase ``tau`` in [0, 1).

    The swing foot travels from -s/2 to +s/2 along a half-cosine while lifting
    by ``step_height * sin(pi * tau)``; the support foot slides linearly from
    +s/2 to -s/2, where s = command * step_period. Commands that would leave
    the workspace are scaled down.
    """
    if swing not in ("left", "right"):
        raise ValueError("swing must be 'left' or 'right'")
    left, right = _poses(tau, swing, cmd, params)
    k = 1.0
    while not (_inside(left, "left") and _inside(right, "right")):
        k *= 0.9
        if k < 1e-3:
            left, right = _poses(tau, swing, WalkCommand(), params)
            if not (_inside(left, "left") and _inside(right, "right")):
                raise ValueError("neutral stance is outside the leg workspace; check body_height")
            break
        left, right = _poses(tau, swing, cmd.scaled(k), params)
    return left, right
