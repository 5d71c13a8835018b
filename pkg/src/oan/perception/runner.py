"""Detection flow: pulls frames, detects, selects and publishes at frame rate."""

from __future__ import annotations

import logging
import threading
import time

from oan.perception.tracking import LocationBoard, select_target
from oan.perception.types import TargetPolicy

log = logging.getLogger(__name__)


class DetectionRunner:
    """Background thread feeding ``board`` from ``source`` through ``detector``.

    Publications are stamped with ``clock()`` (robot sensor time in practice)
    so the tracking action can judge staleness in the loop's own time base.
    """

    def __init__(self, source, detector, board: LocationBoard, policy: TargetPolicy | None = None,
                 fps: float = 15.0, clock=time.monotonic):
        self.source = source
        self.detector = detector
        self.board = board
        self.policy = policy or TargetPolicy()
        self.period = 1.0 / fps
        self.clock = clock
        self.frames = 0
        self.published = 0
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None

    def start(self) -> "DetectionRunner":
        self._thread = threading.Thread(target=self._run, name="detection", daemon=True)
        self._thread.start()
        return self

    def stop(self, timeout: float = 2.0) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout)

    def step(self) -> bool:
        frame = self.source.next_frame()
        if frame is None:
            return False
        self.frames += 1
        target = select_target(self.detector.detect(frame), self.policy)
        self.board.publish(target, self.clock())
        self.published += target is not None
        return True

    def _run(self) -> None:
        deadline = time.monotonic()
        while not self._stop.is_set():
            try:
                if not self.step():
                    break
            except Exception:
                log.exception("detection step failed")
            deadline += self.period
            delay = deadline - time.monotonic()
            if delay > 0:
                self._stop.wait(delay)
            else:
                deadline = time.monotonic()
