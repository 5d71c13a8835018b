"""Per-cycle walk controller: phase -> foot targets -> IK -> balance."""

from __future__ import annotations

import functools
import threading
from dataclasses import dataclass, field

import numpy as np

from oan.kernels import velocity_clamp
from oan.lola.arbitration import CommandRequest
from oan.lola.frames import SensorFrame
from oan.robot_model import LEG_CHAIN, LEGS, JointId, load_model
from oan.runtime import Action
from oan.walk.balance import balance_correct
from oan.walk.gait import GaitParams, WalkCommand, gait_targets
from oan.walk.kinematics import leg_ik
from oan.walk.phase import Support, SupportState, detect_phase

LEG_JOINTS = tuple(JointId(i) for i in range(14, 25))
NOMINAL_DT = 1.0 / 83.0


class WalkError(RuntimeError):
    pass


@dataclass
class WalkState:
    tau: float = 0.0
    swing: str = "left"
    command: WalkCommand = field(default_factory=WalkCommand)
    support: SupportState = field(default_factory=SupportState)
    filtered_gyro: np.ndarray = field(default_factory=lambda: np.zeros(3))
    last_command: np.ndarray | None = None  # leg joints in LEG_JOINTS order
    last_time: float | None = None
    swap_wait: float = 0.0


def _swap_allowed(support: Support, new_support: str) -> bool:
    if support == Support.DoubleSupport:
        return True
    if support == Support.Airborne:
        return False
    return (support == Support.LeftSupport) == (new_support == "left")


def leg_targets(left_pose, right_pose, swing: str) -> dict:
    """IK for both legs; the swing leg decides the shared HipYawPitch."""
    support = "right" if swing == "left" else "left"
    poses = {"left": left_pose, "right": right_pose}
    swing_joints = leg_ik(poses[swing], swing)
    support_joints = leg_ik(poses[support], support, hip_yaw_pitch=swing_joints.hip_yaw_pitch)
    out = {}
    for side, sol in ((swing, swing_joints), (support, support_joints)):
        for joint, value in zip(LEG_CHAIN[side], sol.as_array()):
            out[joint] = float(value)
    return out


@functools.lru_cache(maxsize=8)
def _stance(params: GaitParams) -> tuple:
    # one canonical solution, so a zero command is an exact fixpoint across swing swaps
    left, right = gait_targets(0.0, "left", WalkCommand(), params)
    return tuple(sorted(leg_targets(left, right, "left").items()))


def walk_tick(sensor: SensorFrame, cmd: WalkCommand, state: WalkState,
              params: GaitParams) -> dict:
    """Advance the gait by one cycle and return leg joint commands.

    ``state`` is updated in place. The command is latched at each step start.
    """
    model = load_model()
    if state.last_time is None:
        dt = NOMINAL_DT
        state.command = cmd.clamped(params)
    else:
        dt = sensor.timestamp - state.last_time
        if not dt > 0:
            dt = NOMINAL_DT
    state.last_time = sensor.timestamp
    if state.last_command is None:
        state.last_command = sensor.joint_positions[list(LEG_JOINTS)].copy()

    state.support = detect_phase(sensor.fsr, state.support, params.fsr_contact_threshold,
                                 sensor.timestamp)
    state.tau += dt / params.step_period
    if state.tau >= 1.0:
        new_support = state.swing
        if _swap_allowed(state.support.phase, new_support) or state.swap_wait >= params.max_swap_delay:
            state.tau -= 1.0
            state.swing = "right" if state.swing == "left" else "left"
            state.command = cmd.clamped(params)
            state.swap_wait = 0.0
        else:
            state.swap_wait += dt
            state.tau = 1.0 - 1e-9

    try:
        if state.command.is_zero:
            targets = dict(_stance(params))
        else:
            left, right = gait_targets(state.tau, state.swing, state.command, params)
            targets = leg_targets(left, right, state.swing)
    except ValueError as exc:
        raise WalkError(f"gait target unreachable after rescaling: {exc}") from exc
    targets, state.filtered_gyro = balance_correct(
        sensor.gyro, state.filtered_gyro, targets, params, state.support.phase)

    desired = np.array([targets[j] for j in LEG_JOINTS])
    desired = np.clip(desired, model.lower[14:25], model.upper[14:25])
    out = np.empty(len(LEG_JOINTS))
    velocity_clamp(state.last_command, desired, model.max_velocity[14:25], dt, out)
    state.last_command = out
    return {j: float(v) for j, v in zip(LEG_JOINTS, out)}


class WalkAction(Action):
    """Walks until cancelled; the command can be changed from any thread."""

    source_id = "walk"
    priority = 20

    def __init__(self, command: WalkCommand | None = None, params: GaitParams | None = None,
                 duration: float | None = None, stiffness: float = 1.0):
        self.params = params or GaitParams()
        self.state = WalkState()
        self.duration = duration
        self.stiffness = stiffness
        self._command = command or WalkCommand()
        self._lock = threading.Lock()
        self._t0 = None
        self.result = None

    def set_command(self, command: WalkCommand) -> None:
        with self._lock:
            self._command = command

    def channels(self):
        return sorted(LEGS), ()

    def begin(self, robot, sensor):
        self._t0 = sensor.timestamp

    def step(self, robot, sensor):
        with self._lock:
            cmd = self._command
        joints = walk_tick(sensor, cmd, self.state, self.params)
        robot.submit(CommandRequest(self.source_id, joint_targets={
            j: (v, self.stiffness) for j, v in joints.items()}, priority=self.priority))
        return self.duration is not None and sensor.timestamp - self._t0 >= self.duration
