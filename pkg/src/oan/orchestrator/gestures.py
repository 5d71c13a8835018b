"""Gesture library, seeded gesture choice and the idle sway action."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from oan.lola.arbitration import CommandRequest
from oan.motion.pos import KeyFrame, PosScript, knots, load_pos, parse_pos
from oan.kernels import interp_at
from oan.robot_model import ARMS, HEAD, LEG_CHAIN, LEGS, load_model
from oan.runtime import Action

TAGS = ("speaking", "idle")
BUILTIN_GESTURES = ("open_arms", "wave_right", "explain_left", "shrug", "nod")
MAX_SWAY_AMPLITUDE = 0.03


class GestureError(ValueError):
    pass


def builtin_gesture(name: str) -> PosScript:
    ref = resources.files("oan.data.gestures").joinpath(f"{name}.pos")
    if not ref.is_file():
        raise GestureError(f"no built-in gesture {name!r}")
    return parse_pos(ref.read_text(), name)


def resolve_gesture(spec: str, base_dir: Path | None = None) -> PosScript:
    """A built-in gesture name or a path to a .pos file."""
    if spec in BUILTIN_GESTURES:
        return builtin_gesture(spec)
    path = Path(spec)
    if not path.is_absolute() and base_dir is not None:
        path = base_dir / path
    if not path.is_file():
        raise GestureError(f"gesture {spec!r} is neither built in nor a file")
    return load_pos(path)


@dataclass
class GestureLibrary:
    scripts: dict = field(default_factory=dict)  # name -> (PosScript, tag)
    seed: int = 0

    def __post_init__(self):
        for name, (script, tag) in self.scripts.items():
            self._check(name, script, tag)
        self.rng = random.Random(self.seed)
        self._last: dict = {}

    @staticmethod
    def _check(name, script, tag) -> None:
        if tag not in TAGS:
            raise GestureError(f"{name}: unknown tag {tag!r}")
        if tag == "speaking" and not set(script.roster) <= (ARMS | HEAD):
            extra = ", ".join(j.name for j in script.roster if j not in ARMS | HEAD)
            raise GestureError(f"{name}: speaking gestures may only move arms and head ({extra})")

    def add(self, name: str, script: PosScript, tag: str) -> None:
        self._check(name, script, tag)
        self.scripts[name] = (script, tag)

    def names(self, tag: str) -> list:
        return sorted(n for n, (_, t) in self.scripts.items() if t == tag)

    def reseed(self, seed: int) -> None:
        self.seed = seed
        self.rng = random.Random(seed)
        self._last.clear()

    @classmethod
    def default(cls, seed: int = 0) -> "GestureLibrary":
        return cls({n: (builtin_gesture(n), "speaking") for n in BUILTIN_GESTURES}, seed)


def pick_gesture(library: GestureLibrary, tag: str) -> tuple:
    """Seeded uniform choice among ``tag`` gestures, never the previous pick
    when there is an alternative. Returns ``(name, script)``."""
    names = library.names(tag)
    if not names:
        raise GestureError(f"no gestures tagged {tag!r}")
    last = library._last.get(tag)
    pool = [n for n in names if n != last] if len(names) > 1 else names
    name = library.rng.choice(pool)
    library._last[tag] = name
    return name, library.scripts[name][0]


def sway_script(stance, amplitude: float = 0.02, period: float = 4.0) -> PosScript:
    """One lateral sway cycle around ``stance`` (a 25-vector), as a leg script.

    Hip rolls lean one way and ankle rolls the other so the feet stay flat.
    """
    if not 0 < amplitude <= MAX_SWAY_AMPLITUDE:
        raise GestureError(f"sway amplitude must be in (0, {MAX_SWAY_AMPLITUDE}] rad")
    roster = tuple(sorted(LEGS))
    stance = np.asarray(stance, dtype=float)
    sign = np.zeros(len(roster))
    for side in ("left", "right"):
        _, hip_roll, _, _, _, ankle_roll = LEG_CHAIN[side]
        sign[roster.index(hip_roll)] = 1.0
        sign[roster.index(ankle_roll)] = -1.0
    base = stance[list(roster)]
    quarter = period * 1000.0 / 4
    model = load_model()
    lo, hi = model.lower[list(roster)], model.upper[list(roster)]
    base = np.clip(base, lo, hi)
    frames = (KeyFrame(tuple(np.clip(base + amplitude * sign, lo, hi)), quarter),
              KeyFrame(tuple(np.clip(base - amplitude * sign, lo, hi)), 2 * quarter),
              KeyFrame(tuple(base), quarter))
    return PosScript(roster, frames, "sway")


class IdleSwayAction(Action):
    """Loops the sway script on the legs until cancelled."""

    source_id = "sway"
    priority = 1

    def __init__(self, amplitude: float = 0.02, period: float = 4.0, stiffness: float = 1.0,
                 stance=None):
        if not 0 < amplitude <= MAX_SWAY_AMPLITUDE:
            raise GestureError(f"sway amplitude must be in (0, {MAX_SWAY_AMPLITUDE}] rad")
        self.amplitude = amplitude
        self.period = period
        self.stiffness = stiffness
        self.stance = None if stance is None else np.asarray(stance, dtype=float)
        self.joints = tuple(sorted(LEGS))
        self.script = None
        self._t0 = None
        self._times = self._values = self._row = None

    def channels(self):
        return self.joints, ()

    def begin(self, robot, sensor):
        stance = self.stance if self.stance is not None else sensor.joint_positions
        self.script = sway_script(stance, self.amplitude, self.period)
        self._times, self._values = knots(self.script, stance)
        self._row = np.empty(len(self.joints))
        self._t0 = sensor.timestamp

    def step(self, robot, sensor):
        t = math.fmod(sensor.timestamp - self._t0, self._times[-1])
        interp_at(self._times, self._values, t, self._row)
        robot.submit(CommandRequest(self.source_id, joint_targets={
            j: (float(v), self.stiffness) for j, v in zip(self.joints, self._row)},
            priority=self.priority))
        return False


def idle_sway(robot, amplitude: float = 0.02, period: float = 4.0):
    """Start swaying; raises GrantConflict while another source holds a leg."""
    return robot.start(IdleSwayAction(amplitude, period))
