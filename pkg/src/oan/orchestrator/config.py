"""Behavior configuration loaded from a TOML file (grammar in docs/config.md)."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from oan.dialogue.clients import ServiceConfig
from oan.dialogue.history import Persona
from oan.dialogue.vad import VadParams
from oan.led.literal import LedBinding, parse_led
from oan.orchestrator.gestures import (BUILTIN_GESTURES, GestureLibrary, MAX_SWAY_AMPLITUDE,
                                       resolve_gesture)
from oan.perception.types import STRATEGIES, CameraModel, TargetPolicy, TrackGains
from oan.walk.gait import GaitParams

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10
    import tomli as tomllib

STATES = ("idle", "listening", "thinking", "speaking")

DEFAULT_LEDS = {
    "idle": "solid(eyes, white)",
    "listening": "rotate(eyes, [blue, black×7], 0.8s)",
    "thinking": "loop(chest, blink(white, 1s, 0.5))",
    "speaking": "solid(eyes, green)",
}

DEFAULT_INSTRUCTIONS = (
    "You are NAO, a small humanoid robot made by Aldebaran, talking with visitors "
    "in a university robotics lab. Answer briefly and kindly, in one or two sentences.")


class ConfigError(ValueError):
    pass


@dataclass
class TrackingConfig:
    enabled: bool = True
    label: str | None = None
    strategy: str = "highest_confidence"
    detector: str = "stub"  # stub | blob | http://...
    stub_target: tuple = (0.25, 0.1)  # world target (yaw, pitch) for the stub
    fps: float = 15.0
    max_age: float = 0.5
    gains: TrackGains = field(default_factory=TrackGains)
    camera: CameraModel = field(default_factory=CameraModel)

    @property
    def policy(self) -> TargetPolicy:
        return TargetPolicy(self.label, self.strategy)


@dataclass
class SessionConfig:
    listening_timeout: float = 15.0
    thinking_timeout: float = 20.0
    vad: VadParams = field(default_factory=VadParams)
    voice: str = "default"
    apology: str = "Sorry, I could not think of an answer."
    fallback: str = "Sorry, something went wrong."


@dataclass
class BehaviorConfig:
    persona: Persona = field(default_factory=lambda: Persona(DEFAULT_INSTRUCTIONS))
    max_turns: int = 10
    services: ServiceConfig = field(default_factory=ServiceConfig)
    walk: GaitParams = field(default_factory=GaitParams)
    leds: dict = field(default_factory=lambda: {s: parse_led(t) for s, t in DEFAULT_LEDS.items()})
    gestures: GestureLibrary = field(default_factory=GestureLibrary.default)
    sway_enabled: bool = True
    sway_amplitude: float = 0.02
    sway_period: float = 4.0
    tracking: TrackingConfig = field(default_factory=TrackingConfig)
    session: SessionConfig = field(default_factory=SessionConfig)

    def led(self, state: str) -> LedBinding:
        return self.leds[state.lower()]


def _take(section: dict, key: str, default, kind=None):
    value = section.pop(key, default)
    if kind is not None and value is not None:
        try:
            value = kind(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{key}: {exc}") from None
    return value


def _leftover(name: str, section: dict) -> None:
    if section:
        raise ConfigError(f"[{name}] unknown keys: {', '.join(sorted(section))}")


def from_mapping(data: dict, base_dir: Path | None = None, env=None) -> BehaviorConfig:
    data = {k: dict(v) if isinstance(v, dict) else v for k, v in data.items()}
    known = {"persona", "services", "walk", "leds", "gestures", "tracking", "session"}
    if set(data) - known:
        raise ConfigError(f"unknown sections: {', '.join(sorted(set(data) - known))}")
    cfg = BehaviorConfig()
    try:
        p = data.get("persona", {})
        cfg.persona = Persona(_take(p, "instructions", DEFAULT_INSTRUCTIONS, str),
                              _take(p, "name", "NAO", str), _take(p, "language", "en-US", str))
        cfg.max_turns = _take(p, "max_turns", 10, int)
        _leftover("persona", p)

        cfg.services = ServiceConfig.from_mapping(data.get("services", {}), env=env)
        cfg.walk = GaitParams.from_mapping(data.get("walk", {}))

        leds = data.get("leds", {})
        for state in STATES:
            cfg.leds[state] = parse_led(str(leds.pop(state, DEFAULT_LEDS[state])))
        _leftover("leds", leds)

        g = data.get("gestures", {})
        seed = _take(g, "seed", 0, int)
        library = GestureLibrary({}, seed)
        for tag in ("speaking", "idle"):
            default = list(BUILTIN_GESTURES[:4]) if tag == "speaking" else []
            for spec in _take(g, tag, default, list):
                script = resolve_gesture(str(spec), base_dir)
                library.add(Path(str(spec)).stem, script, tag)
        cfg.gestures = library
        cfg.sway_enabled = _take(g, "sway", True, bool)
        cfg.sway_amplitude = _take(g, "sway_amplitude", 0.02, float)
        cfg.sway_period = _take(g, "sway_period", 4.0, float)
        if not 0 < cfg.sway_amplitude <= MAX_SWAY_AMPLITUDE:
            raise ConfigError(f"sway_amplitude must be in (0, {MAX_SWAY_AMPLITUDE}]")
        _leftover("gestures", g)

        t = data.get("tracking", {})
        tr = TrackingConfig()
        tr.enabled = _take(t, "enabled", True, bool)
        tr.label = _take(t, "label", None, str)
        tr.strategy = _take(t, "strategy", "highest_confidence", str)
        if tr.strategy not in STRATEGIES:
            raise ConfigError(f"tracking strategy must be one of {', '.join(STRATEGIES)}")
        tr.detector = _take(t, "detector", "stub", str)
        tr.stub_target = tuple(float(x) for x in _take(t, "stub_target", (0.25, 0.1)))
        tr.fps = _take(t, "fps", 15.0, float)
        tr.max_age = _take(t, "max_age", 0.5, float)
        tr.gains = TrackGains(_take(t, "k_yaw", 0.3, float), _take(t, "k_pitch", 0.3, float),
                              _take(t, "deadband", 0.03, float), _take(t, "max_step", 0.03, float))
        tr.camera = CameraModel(_take(t, "horizontal_fov", 1.064, float),
                                _take(t, "vertical_fov", 0.831, float),
                                _take(t, "pitch_offset", 0.0, float))
        _leftover("tracking", t)
        cfg.tracking = tr

        s = data.get("session", {})
        sc = SessionConfig()
        sc.listening_timeout = _take(s, "listening_timeout", 15.0, float)
        sc.thinking_timeout = _take(s, "thinking_timeout", 20.0, float)
        sc.vad = VadParams(_take(s, "rms_threshold", 500.0, float),
                           _take(s, "min_speech", 0.3, float),
                           _take(s, "end_silence", 0.8, float), sc.listening_timeout)
        sc.voice = _take(s, "voice", "default", str)
        sc.apology = _take(s, "apology", sc.apology, str)
        sc.fallback = _take(s, "fallback", sc.fallback, str)
        _leftover("session", s)
        cfg.session = sc
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def load_config(path=None, env=None) -> BehaviorConfig:
    """Load ``path``; without a path, the bundled example configuration."""
    if path is None:
        text = resources.files("oan.data").joinpath("chat_example.toml").read_text()
        base = None
    else:
        path = Path(path)
        text = path.read_text(encoding="utf-8")
        base = path.parent
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path or 'chat_example.toml'}: {exc}") from None
    return from_mapping(data, base, env)
