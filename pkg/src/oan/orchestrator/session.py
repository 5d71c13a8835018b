"""The conversation state machine.

One session thread consumes events from a queue. Service calls, listening and
audio playback run on worker threads and post their completion back to the
queue tagged with the state generation they belong to, so a late answer from
an abandoned stage is ignored.
"""

from __future__ import annotations

import enum
import logging
import queue
import threading
import time

from oan.dialogue.clients import ServiceError, Services
from oan.dialogue.history import ChatHistory, chat
from oan.dialogue.vad import NoSpeech, detect_utterance
from oan.led.literal import format_animation
from oan.led.registry import LedRegistry
from oan.lola.arbitration import GrantConflict
from oan.motion.actions import PlayAction
from oan.orchestrator.config import BehaviorConfig
from oan.orchestrator.events import EventLog
from oan.orchestrator.gestures import IdleSwayAction, pick_gesture
from oan.perception.detectors import BlobDetector, RemoteDetector, WorldTargetDetector
from oan.perception.runner import DetectionRunner
from oan.perception.sources import SyntheticFrameSource, TickSource
from oan.perception.tracking import HeadTrackAction, LocationBoard
from oan.robot_model import ARMS, JointId

log = logging.getLogger(__name__)


class InteractionState(enum.Enum):
    Idle = "Idle"
    Listening = "Listening"
    Thinking = "Thinking"
    Speaking = "Speaking"


ALLOWED = {
    InteractionState.Idle: {InteractionState.Listening},
    InteractionState.Listening: {InteractionState.Thinking},
    InteractionState.Thinking: {InteractionState.Speaking},
    InteractionState.Speaking: {InteractionState.Listening},
}


class TransitionError(RuntimeError):
    pass


def build_tracking(robot, cfg, board: LocationBoard) -> DetectionRunner:
    """Detection flow for the ``[tracking]`` detector setting."""
    tr = cfg.tracking

    def head():
        sensor = robot.sensor
        if sensor is None:
            return (0.0, 0.0)
        return (float(sensor.joint_positions[JointId.HeadYaw]),
                float(sensor.joint_positions[JointId.HeadPitch]))

    clock = lambda: robot.time  # noqa: E731
    yaw, pitch = tr.stub_target
    if tr.detector == "stub":
        detector = WorldTargetDetector(yaw, pitch, tr.camera, label=tr.label or "face", head=head)
        source = TickSource(tr.fps, clock)
    else:
        source = SyntheticFrameSource(yaw, pitch, head, tr.camera, clock=clock, fps=tr.fps)
        if tr.detector == "blob":
            detector = BlobDetector(label=tr.label or "blob")
        elif tr.detector.startswith(("http://", "https://")):
            detector = RemoteDetector(tr.detector)
        else:
            raise ValueError(f"unknown detector {tr.detector!r}")
    return DetectionRunner(source, detector, board, tr.policy, tr.fps, clock)


class ChatSession:
    def __init__(self, robot, config: BehaviorConfig, services: Services, audio_source,
                 audio_sink=None, log_path=None, event_log: EventLog | None = None,
                 realtime_playback: bool = True):
        self.robot = robot
        self.config = config
        self.services = services
        self.audio_source = audio_source
        self.audio_sink = audio_sink
        self.realtime_playback = realtime_playback
        self.log = event_log or EventLog(log_path)
        self.leds = LedRegistry(robot, source_id="leds")
        self.history = ChatHistory(config.max_turns)
        self.state = InteractionState.Idle
        self.entered_at = 0.0
        self.board = LocationBoard()
        self._queue: queue.SimpleQueue = queue.SimpleQueue()
        self._gen = 0
        self._thread: threading.Thread | None = None
        self._finished = threading.Event()
        self._stop_requested = threading.Event()
        self._runner: DetectionRunner | None = None
        self._track = None
        self._sway = None
        self._gesture = None
        self._gesture_name = None
        self.end_reason = None

    # -- public -----------------------------------------------------------------

    def start(self) -> "ChatSession":
        self._thread = threading.Thread(target=self._run_guarded, name="chat-session", daemon=True)
        self._thread.start()
        return self

    def stop(self, timeout: float = 5.0) -> None:
        self._stop_requested.set()
        self._queue.put((-1, "stop", None))
        self.wait(timeout)

    def wait(self, timeout: float | None = None) -> bool:
        return self._finished.wait(timeout)

    @property
    def finished(self) -> bool:
        return self._finished.is_set()

    # -- state ------------------------------------------------------------------

    def _enter(self, state: InteractionState, force: bool = False) -> None:
        if not force and state not in ALLOWED[self.state]:
            raise TransitionError(f"{self.state.value} -> {state.value} is not allowed")
        self._log_tracking()
        prev = self.state
        self.state = state
        self.entered_at = time.monotonic()
        self._gen += 1
        self.log.emit("state", state=state.value, previous=prev.value)
        self._bind_leds(state)

    def _bind_leds(self, state: InteractionState) -> None:
        self.leds.detach_all()
        binding = self.config.led(state.value)
        self.leds.attach_binding(binding, tag=state.value)
        self.log.emit("leds", state=state.value,
                      groups={g.value: format_animation(binding.animation) for g in binding.groups})

    def _log_tracking(self) -> None:
        if self._track is None:
            return
        # engaged = fresh target in view at the end of the slice
        self.log.emit("tracking", state=self.state.value, active=not self._track.suspended)

    # -- workers ----------------------------------------------------------------

    def _post(self, gen: int, kind: str, payload=None) -> None:
        self._queue.put((gen, kind, payload))

    def _spawn(self, name: str, fn) -> None:
        gen = self._gen

        def work():
            try:
                kind, payload = fn()
            except Exception as exc:  # reported as an event, never lost
                log.exception("%s worker failed", name)
                kind, payload = f"{name}_error", exc
            self._post(gen, kind, payload)

        threading.Thread(target=work, name=f"chat-{name}", daemon=True).start()

    def _listen(self) -> None:
        stream = self.audio_source.stream()

        def work():
            if stream is None:
                return "exhausted", None
            try:
                return "utterance", detect_utterance(stream, self.config.session.vad)
            except NoSpeech as exc:
                return "no_speech", str(exc)

        self._spawn("listen", work)

    def _speak(self, text: str) -> None:
        self._enter(InteractionState.Speaking)
        voice = self.config.session.voice

        def work():
            try:
                return "audio", self.services.tts.synthesize(text, voice)
            except ServiceError as exc:
                return "tts_failed", exc

        self.log.emit("speak", text=text)
        self._spawn("tts", work)

    # -- main loop ----------------------------------------------------------------

    def _run_guarded(self) -> None:
        try:
            self._run()
        except Exception as exc:
            log.exception("chat session crashed")
            self.log.emit("error", where="session", error=f"{type(exc).__name__}: {exc}")
            self._shutdown(to_idle=True, reason="error")
        finally:
            self._finished.set()

    def _run(self) -> None:
        self.log.emit("state", state=InteractionState.Idle.value, previous=None)
        self._bind_leds(InteractionState.Idle)
        self._start_background()
        self._enter(InteractionState.Listening)
        self._listen()
        while True:
            try:
                gen, kind, payload = self._queue.get(timeout=0.05)
            except queue.Empty:
                self._check_timeouts()
                continue
            if kind == "stop":
                self._shutdown(to_idle=True, reason="stopped")
                return
            if gen != self._gen:
                log.info("dropping stale %s event", kind)
                continue
            if not self._handle(kind, payload):
                return

    def _check_timeouts(self) -> None:
        if self.state is InteractionState.Thinking:
            if time.monotonic() - self.entered_at > self.config.session.thinking_timeout:
                self.log.emit("timeout", state="Thinking")
                self._speak(self.config.session.apology)

    def _handle(self, kind: str, payload) -> bool:
        if kind == "exhausted":
            self._shutdown(to_idle=False, reason="audio exhausted")
            return False
        if kind == "no_speech":
            if getattr(self.audio_source, "exhausted", False):
                self._shutdown(to_idle=False, reason="audio exhausted")
                return False
            self.log.emit("no_speech", detail=payload)
            self._listen()
        elif kind == "utterance":
            self.log.emit("utterance", duration=round(payload.duration, 3))
            utterance = payload

            def work():
                try:
                    return "transcript", self.services.stt.transcribe(utterance)
                except ServiceError as exc:
                    return "stt_failed", exc

            self._spawn("stt", work)
        elif kind == "transcript":
            self.log.emit("service", service="stt", ok=True, text=payload.text,
                          confidence=payload.confidence)
            self._enter(InteractionState.Thinking)
            history, persona, text = self.history, self.config.persona, payload.text

            def work():
                try:
                    return "reply", chat(history, persona, text, self.services.chat)
                except ServiceError as exc:
                    return "chat_failed", exc

            self._spawn("chat", work)
        elif kind == "reply":
            reply, self.history = payload
            self.log.emit("service", service="chat", ok=True, text=reply)
            self._speak(reply)
        elif kind == "audio":
            self.log.emit("service", service="tts", ok=True,
                          duration=round(payload.duration, 3))
            self._play(payload)
        elif kind == "played":
            self._end_gesture()
            self._enter(InteractionState.Listening)
            self._listen()
        elif kind in ("stt_failed", "listen_error", "stt_error"):
            self.log.emit("service", service="stt", ok=False, error=str(payload))
            self._listen()
        elif kind in ("chat_failed", "chat_error"):
            self.log.emit("service", service="chat", ok=False, error=str(payload))
            self._speak(self.config.session.fallback)
        elif kind in ("tts_failed", "tts_error", "play_error"):
            self.log.emit("service", service="tts", ok=False, error=str(payload))
            self._end_gesture()
            self._enter(InteractionState.Listening)
            self._listen()
        else:
            log.warning("unhandled event %s", kind)
        return True

    def _play(self, audio) -> None:
        self._start_gesture()
        sink, realtime = self.audio_sink, self.realtime_playback

        def work():
            t0 = time.monotonic()
            if sink is not None:
                sink.play(audio)
            if realtime:
                remaining = audio.duration - (time.monotonic() - t0)
                if remaining > 0:
                    time.sleep(remaining)
            return "played", None

        self._spawn("play", work)

    # -- robot side -------------------------------------------------------------

    def _start_background(self) -> None:
        cfg = self.config
        if cfg.sway_enabled:
            try:
                self._sway = self.robot.start(IdleSwayAction(cfg.sway_amplitude, cfg.sway_period))
                self.log.emit("sway", started=True, amplitude=cfg.sway_amplitude)
            except GrantConflict as exc:
                self.log.emit("sway", started=False, error=str(exc))
        if cfg.tracking.enabled:
            self._runner = build_tracking(self.robot, cfg, self.board)
            self._track = HeadTrackAction(self.board, cfg.tracking.camera, cfg.tracking.gains,
                                          cfg.tracking.max_age)
            try:
                self._track_handle = self.robot.start(self._track)
            except GrantConflict as exc:
                self.log.emit("tracking_start", started=False, error=str(exc))
                self._track = None
                self._runner = None
            else:
                self._runner.start()
                end = time.monotonic() + 1.0
                while self._track.suspended and time.monotonic() < end:
                    time.sleep(0.005)
                self.log.emit("tracking_start", started=True, detector=cfg.tracking.detector)

    def _start_gesture(self) -> None:
        try:
            name, script = pick_gesture(self.config.gestures, "speaking")
        except ValueError:
            return
        mask = set(script.roster) & ARMS if self._track is not None else set(script.roster)
        if not mask:
            mask = set(script.roster) - {JointId.HeadYaw, JointId.HeadPitch}
        try:
            self._gesture = self.robot.start(PlayAction(script, mask, source_id="gesture",
                                                        priority=10))
        except GrantConflict as exc:
            self.log.emit("gesture", name=name, started=False, error=str(exc))
            return
        self._gesture_name = name
        self.log.emit("gesture", name=name, started=True)

    def _end_gesture(self) -> None:
        if self._gesture is None:
            return
        handle, self._gesture = self._gesture, None
        finished = handle.done
        handle.cancel()
        handle.wait(2.0)
        self.log.emit("gesture_end", name=self._gesture_name,
                      outcome="finished" if finished else "cancelled")

    def _shutdown(self, to_idle: bool, reason: str) -> None:
        self._gen += 1  # orphan any worker still running
        self._end_gesture()
        if to_idle:
            self._log_tracking()
            prev, self.state = self.state, InteractionState.Idle
            self.log.emit("state", state="Idle", previous=prev.value)
        else:
            self._log_tracking()
        if self._runner is not None:
            self._runner.stop()
        for handle in (self._sway, getattr(self, "_track_handle", None)):
            if handle is not None:
                handle.cancel()
        for handle in (self._sway, getattr(self, "_track_handle", None)):
            if handle is not None:
                handle.wait(2.0)
        self.leds.detach_all()
        self._await_release(2.0)
        holders = self.robot.arbiter.holders()
        conflicts = self.robot.arbiter.conflicts()
        self.log.emit("ownership", conflicts=len(conflicts),
                      held=sorted(holders))
        self.end_reason = reason
        self.log.emit("session_end", reason=reason)
        self.log.close()

    def _await_release(self, timeout: float) -> None:
        end = time.monotonic() + timeout
        while time.monotonic() < end:
            if not self.robot.arbiter.owned_by(self.leds.source_id):
                return
            if not self.robot.loop.running:
                # no more ticks will come; drop the grant directly
                self.robot.arbiter.release_ownership(self.leds.source_id)
                return
            time.sleep(0.005)


def run_chat_session(robot, config: BehaviorConfig, services: Services, audio_source,
                     audio_sink=None, log_path=None, realtime_playback: bool = True) -> ChatSession:
    return ChatSession(robot, config, services, audio_source, audio_sink, log_path,
                       realtime_playback=realtime_playback).start()
