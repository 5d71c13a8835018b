"""Sensor-paced cycle loop: read, tick, arbitrate, write."""

from __future__ import annotations

import logging
import queue
import threading
import time
from dataclasses import dataclass

import numpy as np

from oan.kernels import interval_stats, warmup
from oan.lola.arbitration import Arbiter, CommandRequest
from oan.lola.codec import DecodeError, encode_actuators, sensors_from_message
from oan.lola.frames import ActuatorFrame, SensorFrame
from oan.lola.transport import ConnectionClosed, Session

log = logging.getLogger(__name__)

CYCLE_PERIOD = 1.0 / 83.0
STATS_WINDOW = 4096


@dataclass(frozen=True)
class CycleStats:
    cycles: int
    missed_deadlines: int
    decode_errors: int
    tick_errors: int
    reads: int
    writes: int
    mean_rate_hz: float
    p99_jitter_s: float
    max_jitter_s: float


class LatestValue:
    """Single-slot snapshot cell; readers never block the writer for long."""

    def __init__(self, value=None):
        self._lock = threading.Lock()
        self._value = value
        self._stamp = None

    def set(self, value, stamp: float | None = None) -> None:
        with self._lock:
            self._value = value
            self._stamp = time.monotonic() if stamp is None else stamp

    def get(self):
        with self._lock:
            return self._value

    def get_with_stamp(self):
        with self._lock:
            return self._value, self._stamp


class CycleLoop:
    """Runs one exchange per sensor message on a dedicated thread.

    ``tick(sensor)`` is called once per cycle. Other threads hand commands to
    the loop through :meth:`submit`; they are arbitrated after the tick and
    exactly one actuator message is written per sensor message read.
    """

    def __init__(self, session: Session, tick=None, arbiter: Arbiter | None = None,
                 period: float = CYCLE_PERIOD, recv_timeout: float = 1.0):
        warmup()
        self.session = session
        self.tick = tick
        self.arbiter = arbiter or Arbiter()
        self.period = period
        self.recv_timeout = recv_timeout
        self.latest = LatestValue()
        self.previous: ActuatorFrame | None = None
        self._mailbox: queue.SimpleQueue = queue.SimpleQueue()
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None
        self.error: BaseException | None = None
        self.cycles = 0
        self.missed_deadlines = 0
        self.decode_errors = 0
        self.tick_errors = 0
        self.reads = 0
        self.writes = 0
        self.max_read_write_gap = 0
        self._intervals = np.zeros(STATS_WINDOW)
        self._n_intervals = 0
        self._last_recv: float | None = None
        self._first_recv: float | None = None
        self._latest_recv: float | None = None

    # -- cross-thread API ------------------------------------------------------

    def submit(self, request: CommandRequest) -> None:
        self._mailbox.put(request)

    @property
    def running(self) -> bool:
        return self._thread is not None and self._thread.is_alive()

    def start(self) -> "CycleLoop":
        self._thread = threading.Thread(target=self._run_guarded, name="cycle-loop", daemon=True)
        self._thread.start()
        return self

    def stop(self, timeout: float = 2.0) -> None:
        self._stop.set()
        if self._thread is not None and self._thread is not threading.current_thread():
            self._thread.join(timeout)
            # frees the server for the next client
            self.session.close()

    def join(self, timeout: float | None = None) -> None:
        if self._thread is not None:
            self._thread.join(timeout)

    def wait_for_sensor(self, timeout: float = 5.0) -> SensorFrame:
        end = time.monotonic() + timeout
        while time.monotonic() < end:
            frame = self.latest.get()
            if frame is not None:
                return frame
            if self.error is not None:
                raise self.error
            time.sleep(0.002)
        raise TimeoutError("no sensor frame received")

    # -- loop --------------------------------------------------------------------

    def _run_guarded(self) -> None:
        try:
            self.run()
        except ConnectionClosed as exc:
            self.error = exc
            log.warning("cycle loop ended: %s", exc)
        except BaseException as exc:  # surfaced through .error
            self.error = exc
            log.exception("cycle loop crashed")

    def run(self, max_cycles: int | None = None, duration: float | None = None) -> None:
        end = None if duration is None else time.perf_counter() + duration
        while not self._stop.is_set():
            if max_cycles is not None and self.cycles >= max_cycles:
                break
            if end is not None and time.perf_counter() >= end:
                break
            try:
                msg = self.session.recv(self.recv_timeout)
            except TimeoutError:
                continue
            self.cycle(msg, time.perf_counter())

    def cycle(self, msg, t_recv: float) -> None:
        self.reads += 1
        self._record_interval(t_recv)
        try:
            sensor = sensors_from_message(msg)
        except DecodeError as exc:
            self.decode_errors += 1
            log.warning("skipping cycle, bad sensor message: %s", exc)
            sensor = None
        if sensor is not None:
            if self.previous is None:
                self.previous = ActuatorFrame.holding(sensor)
            self.latest.set(sensor)
            if self.tick is not None:
                try:
                    self.tick(sensor)
                except Exception:
                    self.tick_errors += 1
                    log.exception("tick failed")
        if self.previous is not None:
            requests = []
            while True:
                try:
                    requests.append(self._mailbox.get_nowait())
                except queue.Empty:
                    break
            if sensor is not None:
                self.previous = self.arbiter.arbitrate(requests, self.previous)
            elif requests:
                # skipped cycle: keep the commands for the next good one
                for r in requests:
                    self._mailbox.put(r)
            self.session.send(encode_actuators(self.previous))
            self.writes += 1
        self.max_read_write_gap = max(self.max_read_write_gap, abs(self.reads - self.writes))
        self.cycles += 1
        if time.perf_counter() - t_recv > self.period:
            self.missed_deadlines += 1

    def _record_interval(self, t_recv: float) -> None:
        if self._first_recv is None:
            self._first_recv = t_recv
        if self._last_recv is not None:
            self._intervals[self._n_intervals % STATS_WINDOW] = t_recv - self._last_recv
            self._n_intervals += 1
        self._last_recv = t_recv
        self._latest_recv = t_recv

    def stats(self) -> CycleStats:
        n = min(self._n_intervals, STATS_WINDOW)
        mean, p99, worst = interval_stats(self._intervals[:n].copy(), self.period)
        rate = 0.0
        if self._n_intervals and self._latest_recv > self._first_recv:
            rate = self._n_intervals / (self._latest_recv - self._first_recv)
        return CycleStats(self.cycles, self.missed_deadlines, self.decode_errors,
                          self.tick_errors, self.reads, self.writes, rate, p99, worst)
