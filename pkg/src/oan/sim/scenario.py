"""Scenario scripts: timed sensor overrides for the simulated robot.

Line grammar::

    # comment
    <t_seconds> <channel> <values...>

Channels: ``fsr`` (8 values in kg, or 2 per-foot totals), ``gyro x y z``,
``accel x y z`` (offsets), ``angles roll pitch``, ``touch NAME 0|1``,
``battery LEVEL`` and ``joint NAME RAD`` (moves a joint from outside, the way
a hand moves a compliant limb).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from oan.lola.frames import TOUCH_NAMES
from oan.robot_model import JointId

_ARITY = {"gyro": 3, "accel": 3, "angles": 2, "battery": 1}


class ScenarioError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class ScenarioEvent:
    t: float
    channel: str
    values: tuple
    name: str | None = None


@dataclass(frozen=True)
class ScenarioScript:
    events: tuple = ()

    def __post_init__(self):
        times = [e.t for e in self.events]
        if any(t < 0 for t in times):
            raise ValueError("event times must be >= 0")
        if times != sorted(times):
            raise ValueError("events must be sorted by time")


def parse_scenario(text: str) -> ScenarioScript:
    events = []
    last_t = 0.0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) < 3:
            raise ScenarioError(lineno, "expected '<t> <channel> <values...>'")
        try:
            t = float(parts[0])
        except ValueError:
            raise ScenarioError(lineno, f"bad time {parts[0]!r}") from None
        if not t >= 0:
            raise ScenarioError(lineno, "time must be >= 0")
        if t < last_t:
            raise ScenarioError(lineno, f"time {t} is earlier than previous event {last_t}")
        last_t = t
        channel, args = parts[1], parts[2:]
        name = None
        if channel in ("touch", "joint"):
            if len(args) != 2:
                raise ScenarioError(lineno, f"{channel} takes NAME VALUE")
            name, args = args[0], args[1:]
            if channel == "touch" and name not in TOUCH_NAMES:
                raise ScenarioError(lineno, f"unknown touch sensor {name!r}")
            if channel == "joint":
                try:
                    JointId.parse(name)
                except ValueError as exc:
                    raise ScenarioError(lineno, str(exc)) from None
        elif channel == "fsr":
            if len(args) not in (2, 8):
                raise ScenarioError(lineno, "fsr takes 8 sensor values or 2 foot totals")
        elif channel in _ARITY:
            if len(args) != _ARITY[channel]:
                raise ScenarioError(lineno, f"{channel} takes {_ARITY[channel]} values")
        else:
            raise ScenarioError(lineno, f"unknown channel {channel!r}")
        try:
            values = tuple(float(a) for a in args)
        except ValueError:
            raise ScenarioError(lineno, f"non-numeric value in {args}") from None
        if channel == "fsr" and any(v < 0 for v in values):
            raise ScenarioError(lineno, "fsr values must be >= 0")
        if channel == "battery" and not 0 <= values[0] <= 1:
            raise ScenarioError(lineno, "battery level must be in [0, 1]")
        events.append(ScenarioEvent(t, channel, values, name))
    return ScenarioScript(tuple(events))


def load_scenario(path) -> ScenarioScript:
    return parse_scenario(Path(path).read_text(encoding="utf-8"))
