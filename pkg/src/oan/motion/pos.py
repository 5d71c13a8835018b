"""Keyframe motion scripts (``.pos`` files) and their linear interpolation.

Grammar (UTF-8, ``#`` starts a comment)::

    joints HeadYaw HeadPitch        # optional; default is all 25 joints
    0.0  -0.2  500                  # one value per roster joint + duration in ms
    1.0  ~     1000                 # ``~`` holds the joint where it was
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from oan.kernels import interp_at, interp_many
from oan.robot_model import NUM_JOINTS, JointId, load_model

MIN_DURATION_MS = 10.0
HOLD = None


class PosSyntaxError(ValueError):
    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class KeyFrame:
    targets: tuple  # float radians or None (hold) per roster joint
    duration: float  # milliseconds to reach this frame from the previous state


@dataclass(frozen=True)
class PosScript:
    roster: tuple
    keyframes: tuple
    name: str = ""

    def __post_init__(self):
        roster = tuple(JointId(j) for j in self.roster)
        object.__setattr__(self, "roster", roster)
        if len(set(roster)) != len(roster):
            raise ValueError("duplicate joint in roster")
        if not self.keyframes:
            raise ValueError("a script needs at least one keyframe")
        model = load_model()
        for i, kf in enumerate(self.keyframes):
            if len(kf.targets) != len(roster):
                raise ValueError(f"keyframe {i}: {len(kf.targets)} values for {len(roster)} joints")
            if not kf.duration >= MIN_DURATION_MS or not math.isfinite(kf.duration):
                raise ValueError(f"keyframe {i}: duration {kf.duration} ms below {MIN_DURATION_MS}")
            for joint, value in zip(roster, kf.targets):
                if value is HOLD:
                    continue
                if not math.isfinite(value):
                    raise ValueError(f"keyframe {i}: non-finite value for {joint.name}")
                if not model.within(joint, value, 1e-9):
                    raise ValueError(f"keyframe {i}: {joint.name}={value} outside joint limits")

    @property
    def total_duration(self) -> float:
        """Seconds."""
        return sum(kf.duration for kf in self.keyframes) / 1000.0


def parse_pos(text: str, name: str = "") -> PosScript:
    model = load_model()
    roster = None
    keyframes = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        tokens = _tokens(body)
        if not tokens:
            continue
        col, first = tokens[0]
        if first == "joints":
            if roster is not None or keyframes:
                raise PosSyntaxError(lineno, col, "'joints' header must come first and only once")
            if len(tokens) < 2:
                raise PosSyntaxError(lineno, col, "'joints' header needs at least one joint")
            names = []
            for c, tok in tokens[1:]:
                try:
                    names.append(JointId.parse(tok))
                except ValueError:
                    raise PosSyntaxError(lineno, c, f"unknown joint name {tok!r}") from None
                if names.count(names[-1]) > 1:
                    raise PosSyntaxError(lineno, c, f"duplicate joint {tok!r}")
            roster = tuple(names)
            continue
        if roster is None:
            roster = tuple(JointId)
        if len(tokens) != len(roster) + 1:
            raise PosSyntaxError(lineno, col, f"expected {len(roster)} values and a duration, "
                                              f"got {len(tokens)} tokens")
        targets = []
        for joint, (c, tok) in zip(roster, tokens[:-1]):
            if tok == "~":
                targets.append(HOLD)
                continue
            value = _number(tok, lineno, c)
            if not model.within(joint, value, 1e-9):
                raise PosSyntaxError(lineno, c, f"{joint.name}={value} outside "
                                                f"[{model.lower[joint]}, {model.upper[joint]}]")
            targets.append(value)
        c, tok = tokens[-1]
        duration = _number(tok, lineno, c)
        if duration <= 0:
            raise PosSyntaxError(lineno, c, f"duration must be positive, got {tok}")
        if duration < MIN_DURATION_MS:
            raise PosSyntaxError(lineno, c, f"duration {tok} ms is shorter than one cycle "
                                            f"({MIN_DURATION_MS:g} ms)")
        keyframes.append(KeyFrame(tuple(targets), duration))
    if not keyframes:
        raise PosSyntaxError(max(1, len(text.splitlines())), 1, "script has no keyframes")
    return PosScript(roster, tuple(keyframes), name)


def _tokens(line: str) -> list:
    out = []
    i = 0
    n = len(line)
    while i < n:
        if line[i].isspace():
            i += 1
            continue
        j = i
        while j < n and not line[j].isspace():
            j += 1
        out.append((i + 1, line[i:j]))
        i = j
    return out


def _number(tok: str, line: int, col: int) -> float:
    try:
        value = float(tok)
    except ValueError:
        raise PosSyntaxError(line, col, f"not a number: {tok!r}") from None
    if not math.isfinite(value):
        raise PosSyntaxError(line, col, f"value must be finite: {tok!r}")
    return value


def _fmt(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def serialize_pos(script: PosScript) -> str:
    lines = []
    if script.name:
        lines.append(f"# {script.name}")
    lines.append("joints " + " ".join(j.name for j in script.roster))
    for kf in script.keyframes:
        vals = ["~" if v is HOLD else repr(float(v)) for v in kf.targets]
        lines.append(" ".join(vals + [_fmt(kf.duration)]))
    return "\n".join(lines) + "\n"


def load_pos(path) -> PosScript:
    path = Path(path)
    return parse_pos(path.read_text(encoding="utf-8"), name=path.stem)


def save_pos(script: PosScript, path) -> None:
    Path(path).write_text(serialize_pos(script), encoding="utf-8")


# -- sampling ------------------------------------------------------------------

def roster_pose(script: PosScript, pose) -> np.ndarray:
    """Pick roster values out of a dict, a 25-vector or a roster-sized vector."""
    if isinstance(pose, dict):
        return np.array([float(pose[j]) for j in script.roster])
    arr = np.asarray(pose, dtype=float)
    if arr.shape == (NUM_JOINTS,):
        return arr[list(script.roster)].copy()
    if arr.shape == (len(script.roster),):
        return arr.copy()
    raise ValueError(f"start pose of shape {arr.shape} does not cover the roster")


def knots(script: PosScript, start_pose) -> tuple[np.ndarray, np.ndarray]:
    """Knot times (s) and fully resolved knot values, holds filled in."""
    start = roster_pose(script, start_pose)
    values = np.empty((len(script.keyframes) + 1, len(script.roster)))
    times = np.empty(len(script.keyframes) + 1)
    values[0] = start
    times[0] = 0.0
    elapsed_ms = 0.0
    for i, kf in enumerate(script.keyframes, 1):
        elapsed_ms += kf.duration
        times[i] = elapsed_ms / 1000.0
        for j, v in enumerate(kf.targets):
            values[i, j] = values[i - 1, j] if v is HOLD else v
    return times, values


def sample(script: PosScript, start_pose, t: float) -> np.ndarray:
    times, values = knots(script, start_pose)
    return interp_at(times, values, float(t), np.empty(values.shape[1]))


def sample_many(script: PosScript, start_pose, ts) -> np.ndarray:
    times, values = knots(script, start_pose)
    return interp_many(times, values, np.asarray(ts, dtype=float))


def velocity_violations(script: PosScript, start_pose) -> list:
    """Segments whose linear motion would exceed a joint's velocity limit."""
    model = load_model()
    times, values = knots(script, start_pose)
    out = []
    for i in range(1, len(times)):
        dt = times[i] - times[i - 1]
        for j, joint in enumerate(script.roster):
            speed = abs(values[i, j] - values[i - 1, j]) / dt
            if speed > model.max_velocity[joint]:
                out.append((i - 1, joint, speed))
    return out
