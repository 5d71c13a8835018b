"""Action runtime on top of the cycle loop.

Actions are stepped from the loop's tick and talk to the robot only through
CommandRequests. Ownership is granted when an action is started (so a conflict
fails before any motion) and released one cycle after it ends, once its final
request has been arbitrated.
"""

from __future__ import annotations

import logging
import threading

from oan.kernels import warmup
from oan.lola.arbitration import Arbiter, CommandRequest
from oan.lola.frames import SensorFrame
from oan.lola.loop import CycleLoop
from oan.lola.transport import connect

log = logging.getLogger(__name__)


class Action:
    """Base class: subclasses set ``source_id`` and override the hooks."""

    source_id = "action"
    priority = 0

    def channels(self) -> tuple:
        """(joints, led groups) to grant exclusively before starting."""
        return (), ()

    def begin(self, robot: "Robot", sensor: SensorFrame) -> None:
        pass

    def step(self, robot: "Robot", sensor: SensorFrame) -> bool:
        """Advance one cycle; return True when finished."""
        return True

    def end(self, robot: "Robot", sensor: SensorFrame | None, cancelled: bool) -> None:
        pass


class ActionHandle:
    def __init__(self, action: Action):
        self.action = action
        self.progress = 0.0
        self.result = None
        self.error: BaseException | None = None
        self._cancel = threading.Event()
        self._done = threading.Event()

    def cancel(self) -> None:
        self._cancel.set()

    @property
    def cancelled(self) -> bool:
        return self._cancel.is_set()

    @property
    def done(self) -> bool:
        return self._done.is_set()

    def wait(self, timeout: float | None = None) -> bool:
        return self._done.wait(timeout)


class Robot:
    def __init__(self, loop: CycleLoop):
        self.loop = loop
        self.arbiter: Arbiter = loop.arbiter
        self._user_tick = loop.tick
        loop.tick = self._tick
        self._lock = threading.Lock()
        self._pending: list[ActionHandle] = []
        self._active: list[tuple[ActionHandle, bool]] = []
        self._release: list[ActionHandle] = []
        self.sensor: SensorFrame | None = None
        self.hooks: list = []  # callables(robot, sensor) run every tick

    @classmethod
    def connect(cls, endpoint: str | None = None, arbiter: Arbiter | None = None) -> "Robot":
        warmup()  # compile before frames start queueing on the socket
        loop = CycleLoop(connect(endpoint), arbiter=arbiter)
        robot = cls(loop)
        loop.start()
        loop.wait_for_sensor()
        return robot

    # -- commands ------------------------------------------------------------

    def submit(self, request: CommandRequest) -> None:
        self.loop.submit(request)

    @property
    def commanded(self):
        return self.loop.previous

    @property
    def time(self) -> float:
        return self.sensor.timestamp if self.sensor is not None else 0.0

    def latest_sensor(self) -> SensorFrame:
        return self.loop.wait_for_sensor()

    # -- actions -------------------------------------------------------------

    def start(self, action: Action) -> ActionHandle:
        if not self.loop.running:
            raise RuntimeError("cycle loop is not running")
        joints, leds = action.channels()
        self.arbiter.grant_ownership(action.source_id, joints=joints, leds=leds)
        handle = ActionHandle(action)
        with self._lock:
            self._pending.append(handle)
        return handle

    def run(self, action: Action, timeout: float | None = None):
        handle = self.start(action)
        if not handle.wait(timeout):
            handle.cancel()
            handle.wait(1.0)
            raise TimeoutError(f"{action.source_id} did not finish")
        if handle.error is not None:
            raise handle.error
        return handle.result

    def active_actions(self) -> list:
        with self._lock:
            return [h.action for h, _ in self._active] + [h.action for h in self._pending]

    def stop(self) -> None:
        with self._lock:
            handles = [h for h, _ in self._active] + list(self._pending)
        for h in handles:
            h.cancel()
        self.loop.stop()
        for h in self._release:
            self.arbiter.release_ownership(h.action.source_id)
            h._done.set()
        self._release = []
        for h in handles:
            if not h.done:
                self._finish(h, None, True)

    def _finish(self, handle: ActionHandle, sensor, cancelled: bool) -> None:
        try:
            handle.action.end(self, sensor, cancelled)
        except Exception as exc:
            handle.error = exc
            log.exception("%s end failed", handle.action.source_id)
        handle.result = getattr(handle.action, "result", None)
        if self.loop.running and threading.current_thread() is self.loop._thread:
            self._release.append(handle)
        else:
            self.arbiter.release_ownership(handle.action.source_id)
            handle._done.set()

    def _tick(self, sensor: SensorFrame) -> None:
        self.sensor = sensor
        for handle in self._release:
            self.arbiter.release_ownership(handle.action.source_id)
            handle._done.set()
        self._release = []
        with self._lock:
            for h in self._pending:
                self._active.append((h, False))
            self._pending.clear()
            active = list(self._active)
        still = []
        for handle, begun in active:
            if handle.cancelled:
                self._finish(handle, sensor, True)
                continue
            try:
                if not begun:
                    handle.action.begin(self, sensor)
                    begun = True
                finished = handle.action.step(self, sensor)
            except Exception as exc:
                handle.error = exc
                log.exception("%s failed", handle.action.source_id)
                self._finish(handle, sensor, True)
                continue
            progress = getattr(handle.action, "progress", None)
            if progress is not None:
                handle.progress = progress
            if finished:
                self._finish(handle, sensor, False)
            else:
                still.append((handle, begun))
        with self._lock:
            self._active = still
        for hook in list(self.hooks):
            try:
                hook(self, sensor)
            except Exception:
                log.exception("tick hook failed")
        if self._user_tick is not None:
            self._user_tick(sensor)
