"""Simulated robot endpoint speaking the lola-link wire protocol."""

from __future__ import annotations

import logging
import socket
import threading
import time

from oan.kernels import warmup
from oan.lola.codec import DecodeError, actuators_from_message, encode_sensors
from oan.lola.transport import ConnectionClosed, Session, listen, resolve_endpoint
from oan.sim.plant import SimConfig, SimState, apply_event, initial_state, sense, step

log = logging.getLogger(__name__)

SPIN_TAIL = 0.0005


def sleep_until(deadline: float) -> None:
    while True:
        remaining = deadline - time.perf_counter()
        if remaining <= 0:
            return
        if remaining > SPIN_TAIL:
            time.sleep(remaining - SPIN_TAIL)
        else:
            time.sleep(0)


class SimServer:
    """Serves one client at a time, emitting a sensor frame every cycle.

    The latest actuator frame received before a cycle boundary is applied at
    that boundary. On disconnect the robot holds its pose and the server
    waits for the next client.
    """

    def __init__(self, endpoint: str | None = None, config: SimConfig | None = None):
        self.endpoint = resolve_endpoint(endpoint)
        self.config = config or SimConfig()
        self._state = initial_state(self.config)
        self._lock = threading.Lock()
        self._stop = threading.Event()
        self._ready = threading.Event()
        self._injected: list = []
        self._thread: threading.Thread | None = None
        self._listener: socket.socket | None = None
        self.sent = 0
        self.received = 0
        self.decode_errors = 0
        self.sessions = 0
        self.last_actuators = None
        self.sensor_log: list | None = None

    # -- state inspection ----------------------------------------------------

    def snapshot(self) -> SimState:
        with self._lock:
            return self._state.copy()

    def inject(self, event) -> None:
        """Apply a scenario event at the next cycle boundary."""
        with self._lock:
            self._injected.append(event)

    # -- lifecycle -------------------------------------------------------------

    def start(self) -> "SimServer":
        warmup()
        self._listener = listen(self.endpoint)
        self._thread = threading.Thread(target=self._serve, name="sim-nao", daemon=True)
        self._thread.start()
        self._ready.set()
        return self

    def serve_forever(self) -> None:
        warmup()
        self._listener = listen(self.endpoint)
        self._ready.set()
        self._serve()

    def stop(self) -> None:
        self._stop.set()
        if self._listener is not None:
            try:
                self._listener.close()
            except OSError:
                pass
        if self._thread is not None:
            self._thread.join(timeout=2.0)

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()

    def _serve(self) -> None:
        self._listener.settimeout(0.2)
        while not self._stop.is_set():
            try:
                conn, _ = self._listener.accept()
            except socket.timeout:
                continue
            except OSError:
                break
            self.sessions += 1
            session = Session(conn)
            try:
                self._run_session(session)
            except ConnectionClosed as exc:
                log.info("client disconnected: %s", exc)
            finally:
                session.close()

    def _run_session(self, session: Session) -> None:
        period = self.config.cycle_period
        with self._lock:
            frame = sense(self._state, self.config)
        session.send(encode_sensors(frame))
        self.sent += 1
        if self.sensor_log is not None:
            self.sensor_log.append(frame)
        deadline = time.perf_counter() + period
        actuators = None
        while not self._stop.is_set():
            sleep_until(deadline)
            for msg in session.recv_available():
                self.received += 1
                try:
                    actuators = actuators_from_message(msg)
                except DecodeError as exc:
                    self.decode_errors += 1
                    log.warning("bad actuator message: %s", exc)
            if actuators is not None:
                self.last_actuators = actuators
            with self._lock:
                for event in self._injected:
                    apply_event(self._state, event)
                self._injected.clear()
                self._state, frame = step(self._state, actuators, period, self.config)
            session.send(encode_sensors(frame))
            self.sent += 1
            if self.sensor_log is not None:
                self.sensor_log.append(frame)
            deadline += period
            now = time.perf_counter()
            if now - deadline > 5 * period:
                deadline = now
