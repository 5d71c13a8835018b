"""LED animation combinators compiled into per-cycle samplers.

Colors are linear RGB triples in [0, 1]. Intensity-only groups (ears, skull)
show the brightest channel of the color.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from oan.robot_model import LedGroup, load_model

BLACK = (0.0, 0.0, 0.0)


class AnimationError(ValueError):
    pass


def _color(c) -> tuple:
    c = tuple(float(x) for x in c)
    if len(c) != 3 or not all(0.0 <= x <= 1.0 for x in c):
        raise AnimationError(f"color {c} must be three values in [0, 1]")
    return c


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not value > 0 or not math.isfinite(value):
        raise AnimationError(f"{name} must be a positive number, got {value}")
    return value


@dataclass(frozen=True)
class Solid:
    color: tuple

    def __post_init__(self):
        object.__setattr__(self, "color", _color(self.color))


@dataclass(frozen=True)
class Blink:
    color: tuple
    period: float
    duty: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "color", _color(self.color))
        _positive("period", self.period)
        if not 0.0 < self.duty < 1.0:
            raise AnimationError("duty must be in (0, 1)")


@dataclass(frozen=True)
class Fade:
    start: tuple
    end: tuple
    duration: float

    def __post_init__(self):
        object.__setattr__(self, "start", _color(self.start))
        object.__setattr__(self, "end", _color(self.end))
        _positive("duration", self.duration)


@dataclass(frozen=True)
class Rotate:
    colors: tuple
    period: float

    def __post_init__(self):
        if not self.colors:
            raise AnimationError("rotate needs at least one color")
        object.__setattr__(self, "colors", tuple(_color(c) for c in self.colors))
        _positive("period", self.period)


@dataclass(frozen=True)
class Sequence:
    steps: tuple  # ((animation, duration), ...)

    def __post_init__(self):
        if not self.steps:
            raise AnimationError("sequence needs at least one step")
        for anim, duration in self.steps:
            _positive("sequence step duration", duration)


@dataclass(frozen=True)
class Loop:
    animation: object


Animation = Solid | Blink | Fade | Rotate | Sequence | Loop


def total_duration(anim) -> float:
    """Natural length of one pass; 0 for animations that never change."""
    if isinstance(anim, Solid):
        return 0.0
    if isinstance(anim, (Blink, Rotate)):
        return anim.period
    if isinstance(anim, Fade):
        return anim.duration
    if isinstance(anim, Sequence):
        return sum(d for _, d in anim.steps)
    if isinstance(anim, Loop):
        return total_duration(anim.animation)
    raise AnimationError(f"not an animation: {anim!r}")


def validate(anim, group: LedGroup) -> None:
    layout = load_model().leds[LedGroup(group)]
    if isinstance(anim, Rotate):
        if not layout.is_ring:
            raise AnimationError(f"rotate needs a ring group, {LedGroup(group).value} has one LED")
        if len(anim.colors) > layout.count:
            raise AnimationError(f"rotate lists {len(anim.colors)} colors for "
                                 f"{layout.count} LEDs")
    elif isinstance(anim, Sequence):
        for step, _ in anim.steps:
            validate(step, group)
    elif isinstance(anim, Loop):
        validate(anim.animation, group)
    elif not isinstance(anim, (Solid, Blink, Fade)):
        raise AnimationError(f"not an animation: {anim!r}")


def _colors_at(anim, t: float, n: int) -> np.ndarray:
    """(n, 3) colors of an n-LED group at local time t >= 0."""
    if isinstance(anim, Solid):
        return np.tile(anim.color, (n, 1))
    if isinstance(anim, Blink):
        on = math.fmod(t, anim.period) / anim.period < anim.duty
        return np.tile(anim.color if on else BLACK, (n, 1))
    if isinstance(anim, Fade):
        f = min(max(t / anim.duration, 0.0), 1.0)
        a, b = np.array(anim.start), np.array(anim.end)
        return np.tile(a + f * (b - a), (n, 1))
    if isinstance(anim, Rotate):
        # the epsilon keeps exact boundaries such as 0.3 s of 0.8 s on 8 LEDs at 3
        shift = min(int(math.floor(math.fmod(t, anim.period) / anim.period * n + 1e-9)), n - 1)
        palette = [anim.colors[i % len(anim.colors)] for i in range(n)]
        return np.array([palette[(i - shift) % n] for i in range(n)])
    if isinstance(anim, Sequence):
        start = 0.0
        for step, duration in anim.steps:
            if t < start + duration:
                return _colors_at(step, t - start, n)
            start += duration
        step, duration = anim.steps[-1]
        return _colors_at(step, duration, n)
    if isinstance(anim, Loop):
        period = total_duration(anim.animation)
        local = math.fmod(t, period) if period > 0 else t
        return _colors_at(anim.animation, local, n)
    raise AnimationError(f"not an animation: {anim!r}")


class Sampler:
    """A validated (animation, group) pair; call with t >= 0 seconds."""

    def __init__(self, anim, group: LedGroup):
        self.animation = anim
        self.group = LedGroup(group)
        self.layout = load_model().leds[self.group]
        validate(anim, self.group)

    def __call__(self, t: float) -> np.ndarray:
        colors = _colors_at(self.animation, max(float(t), 0.0), self.layout.count)
        if self.layout.rgb:
            values = colors.reshape(-1)
        else:
            values = colors.max(axis=1)
        return np.clip(values, 0.0, 1.0)


def compile(anim, group: LedGroup) -> Sampler:  # noqa: A001 - domain verb
    return Sampler(anim, group)


def sample(sampler: Sampler, t: float) -> np.ndarray:
    return sampler(t)
