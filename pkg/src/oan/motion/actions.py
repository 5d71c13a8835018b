"""Playback and kinesthetic recording as cycle-loop actions."""

from __future__ import annotations

import itertools
import threading

import numpy as np

from oan.lola.arbitration import CommandRequest
from oan.motion.pos import PosScript, knots, velocity_violations
from oan.motion.reduce import Recording
from oan.kernels import interp_at
from oan.robot_model import JointId
from oan.runtime import Action

_ids = itertools.count(1)
DEFAULT_SAMPLE_PERIOD = 1.0 / 83.0


class PlayAction(Action):
    """Plays ``script`` on ``mask`` ∩ roster, starting from the sensed pose."""

    priority = 10

    def __init__(self, script: PosScript, mask=None, stiffness: float = 1.0,
                 source_id: str | None = None, priority: int | None = None):
        if not 0.0 <= stiffness <= 1.0:
            raise ValueError("stiffness must be in [0, 1]")
        mask = set(script.roster) if mask is None else {JointId(j) for j in mask}
        self.script = script
        self.joints = [j for j in script.roster if j in mask]
        self._cols = [script.roster.index(j) for j in self.joints]
        self.stiffness = stiffness
        self.source_id = source_id or f"play-{script.name or 'script'}-{next(_ids)}"
        if priority is not None:
            self.priority = priority
        self.progress = 0.0
        self.result = None
        self.warnings: list = []
        self._t0 = None
        self._times = self._values = None
        self._row = None

    def channels(self):
        return self.joints, ()

    def begin(self, robot, sensor):
        self._t0 = sensor.timestamp
        self._times, self._values = knots(self.script, sensor.joint_positions)
        self._row = np.empty(self._values.shape[1])
        self.warnings = velocity_violations(self.script, sensor.joint_positions)

    def step(self, robot, sensor):
        elapsed = sensor.timestamp - self._t0
        interp_at(self._times, self._values, elapsed, self._row)
        targets = {j: (float(self._row[c]), self.stiffness)
                   for j, c in zip(self.joints, self._cols)}
        robot.submit(CommandRequest(self.source_id, joint_targets=targets,
                                    priority=self.priority))
        total = self._times[-1]
        self.progress = min(1.0, elapsed / total) if total > 0 else 1.0
        return elapsed >= total


class RecordAction(Action):
    """Makes ``mask`` compliant and samples it until :meth:`stop` is called."""

    priority = 10

    def __init__(self, mask, sample_period: float = DEFAULT_SAMPLE_PERIOD,
                 stiffness_during_record: float = 0.0, duration: float | None = None,
                 source_id: str | None = None):
        if sample_period < 0.01:
            raise ValueError("sample_period must be at least one 10 ms cycle")
        self.mask = tuple(sorted({JointId(j) for j in mask}))
        if not self.mask:
            raise ValueError("empty mask")
        self.sample_period = sample_period
        self.record_stiffness = stiffness_during_record
        self.duration = duration
        self.source_id = source_id or f"record-{next(_ids)}"
        self._stop = threading.Event()
        self._prior_stiffness = None
        self._times: list = []
        self._samples: list = []
        self._t0 = None
        self.result = None

    def channels(self):
        return self.mask, ()

    def stop(self) -> None:
        self._stop.set()

    def begin(self, robot, sensor):
        self._prior_stiffness = robot.commanded.joint_stiffness[list(self.mask)].copy()
        self._t0 = sensor.timestamp

    def step(self, robot, sensor):
        pos = sensor.joint_positions
        robot.submit(CommandRequest(self.source_id, joint_targets={
            j: (float(pos[j]), self.record_stiffness) for j in self.mask},
            priority=self.priority))
        t = sensor.timestamp
        if not self._times or t - self._times[-1] >= self.sample_period - 1e-9:
            self._times.append(t)
            self._samples.append(pos[list(self.mask)].copy())
        if self.duration is not None and t - self._t0 >= self.duration:
            return True
        return self._stop.is_set()

    def end(self, robot, sensor, cancelled):
        if sensor is not None and self._prior_stiffness is not None:
            pos = sensor.joint_positions
            robot.submit(CommandRequest(self.source_id, joint_targets={
                j: (float(pos[j]), float(s)) for j, s in zip(self.mask, self._prior_stiffness)},
                priority=self.priority))
        if len(self._times) >= 2:
            self.result = Recording(self.mask, self.sample_period,
                                    np.array(self._times), np.array(self._samples))


def play(robot, script: PosScript, mask=None, stiffness: float = 1.0):
    """Start playback; returns an :class:`~oan.runtime.ActionHandle`."""
    return robot.start(PlayAction(script, mask, stiffness))


def record(robot, mask, sample_period: float = DEFAULT_SAMPLE_PERIOD,
           stiffness_during_record: float = 0.0, duration: float | None = None):
    """Start a recording. Returns ``(handle, action)``; call ``action.stop()``
    then ``handle.wait()``; the :class:`Recording` is ``handle.result``."""
    if not robot.loop.running:
        raise RuntimeError("cycle loop is not running")
    action = RecordAction(mask, sample_period, stiffness_during_record, duration)
    return robot.start(action), action
