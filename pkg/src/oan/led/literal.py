"""Text form of LED animations, as used in config files and on the CLI.

    rotate(eyes, [blue, black×7], 0.8s)
    loop(chest, blink(white, 1s, 0.5))
    seq(leftfoot, (fade(black, red, 500ms), 0.5s), (solid(red), 1s))
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from oan.led.animation import (Blink, Fade, Loop, Rotate, Sequence, Solid,
                               AnimationError, validate)
from oan.robot_model import LedGroup

NAMED_COLORS = {
    "black": (0.0, 0.0, 0.0),
    "off": (0.0, 0.0, 0.0),
    "white": (1.0, 1.0, 1.0),
    "red": (1.0, 0.0, 0.0),
    "green": (0.0, 1.0, 0.0),
    "blue": (0.0, 0.0, 1.0),
    "yellow": (1.0, 1.0, 0.0),
    "cyan": (0.0, 1.0, 1.0),
    "magenta": (1.0, 0.0, 1.0),
    "orange": (1.0, 0.5, 0.0),
    "purple": (0.5, 0.0, 0.5),
}

GROUP_ALIASES = {
    "chest": (LedGroup.Chest,),
    "eyes": (LedGroup.LeftEye, LedGroup.RightEye),
    "ears": (LedGroup.LeftEar, LedGroup.RightEar),
    "feet": (LedGroup.LeftFoot, LedGroup.RightFoot),
    "skull": (LedGroup.Skull,),
    "all": tuple(LedGroup),
}
for _g in LedGroup:
    GROUP_ALIASES[_g.value.lower()] = (_g,)

_TOKEN = re.compile(r"""
    \s*(?:
      (?P<hex>\#[0-9a-fA-F]{6})
    | (?P<num>\d+(?:\.\d*)?|\.\d+)(?P<unit>ms|s)?
    | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
    | (?P<op>[()\[\],+*×])
    )""", re.VERBOSE)


class LedLiteralError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at column {position + 1})")
        self.position = position


@dataclass(frozen=True)
class LedBinding:
    groups: tuple
    animation: object


def _tokenize(text: str) -> list:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise LedLiteralError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastgroup) if m.lastgroup != "unit" else m.start("num")
        if m.group("hex"):
            tokens.append(("hex", m.group("hex"), start))
        elif m.group("num"):
            tokens.append(("num", (float(m.group("num")), m.group("unit")), start))
        elif m.group("name"):
            tokens.append(("name", m.group("name"), start))
        else:
            tokens.append(("op", "*" if m.group("op") == "×" else m.group("op"), start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None, value=None):
        tok = self.tokens[self.i]
        if (kind and tok[0] != kind) or (value is not None and tok[1] != value):
            want = value if value is not None else kind
            shown = tok[1] if tok[0] != "end" else "end of input"
            raise LedLiteralError(f"expected {want!r}, found {shown!r}", tok[2])
        self.i += 1
        return tok

    def at(self, value) -> bool:
        tok = self.peek()
        return tok[0] == "op" and tok[1] == value

    def duration(self) -> float:
        _, (value, unit), pos = self.take("num")
        if unit is None:
            raise LedLiteralError("durations need a unit (s or ms)", pos)
        return value / 1000.0 if unit == "ms" else value

    def number(self) -> float:
        _, (value, unit), pos = self.take("num")
        if unit is not None:
            raise LedLiteralError("expected a plain number", pos)
        return value

    def color(self) -> tuple:
        tok = self.peek()
        if tok[0] == "hex":
            self.take()
            h = tok[1][1:]
            return tuple(int(h[k:k + 2], 16) / 255.0 for k in (0, 2, 4))
        _, name, pos = self.take("name")
        if name == "rgb":
            self.take("op", "(")
            r = self.number()
            self.take("op", ",")
            g = self.number()
            self.take("op", ",")
            b = self.number()
            self.take("op", ")")
            return (r, g, b)
        try:
            return NAMED_COLORS[name.lower()]
        except KeyError:
            raise LedLiteralError(f"unknown color {name!r}", pos) from None

    def color_list(self) -> tuple:
        self.take("op", "[")
        colors = []
        while True:
            c = self.color()
            count = 1
            if self.at("*"):
                self.take()
                _, (value, unit), pos = self.take("num")
                if unit is not None or value != int(value) or value < 1:
                    raise LedLiteralError("repeat count must be a positive integer", pos)
                count = int(value)
            colors.extend([c] * count)
            if self.at("]"):
                self.take()
                return tuple(colors)
            self.take("op", ",")

    def groups(self) -> tuple:
        out = []
        while True:
            _, name, pos = self.take("name")
            try:
                out.extend(GROUP_ALIASES[name.lower()])
            except KeyError:
                raise LedLiteralError(f"unknown LED group {name!r}", pos) from None
            if not self.at("+"):
                return tuple(dict.fromkeys(out))
            self.take()

    def args(self, kind: str, pos: int):
        # invalid parameters are reported at the call that received them
        try:
            return self._args(kind, pos)
        except AnimationError as exc:
            raise LedLiteralError(str(exc), pos) from None

    def _args(self, kind: str, pos: int):
        if kind == "solid":
            return Solid(self.color())
        if kind == "blink":
            color = self.color()
            self.take("op", ",")
            period = self.duration()
            duty = 0.5
            if self.at(","):
                self.take()
                duty = self.number()
            return Blink(color, period, duty)
        if kind == "fade":
            a = self.color()
            self.take("op", ",")
            b = self.color()
            self.take("op", ",")
            return Fade(a, b, self.duration())
        if kind == "rotate":
            colors = self.color_list()
            self.take("op", ",")
            return Rotate(colors, self.duration())
        if kind in ("seq", "sequence"):
            steps = [self.step()]
            while self.at(","):
                self.take()
                steps.append(self.step())
            return Sequence(tuple(steps))
        if kind == "loop":
            return Loop(self.animation())
        raise LedLiteralError(f"unknown animation {kind!r}", pos)

    def step(self):
        self.take("op", "(")
        anim = self.animation()
        self.take("op", ",")
        duration = self.duration()
        self.take("op", ")")
        return (anim, duration)

    def animation(self):
        _, kind, pos = self.take("name")
        self.take("op", "(")
        anim = self.args(kind.lower(), pos)
        self.take("op", ")")
        return anim

    def binding(self) -> LedBinding:
        _, kind, pos = self.take("name")
        self.take("op", "(")
        groups = self.groups()
        self.take("op", ",")
        anim = self.args(kind.lower(), pos)
        self.take("op", ")")
        self.take("end")
        return LedBinding(groups, anim)


def parse_led(text: str) -> LedBinding:
    """Parse ``kind(groups, args...)`` into groups plus a validated animation."""
    parser = _Parser(text)
    binding = parser.binding()
    try:
        for group in binding.groups:
            validate(binding.animation, group)
    except AnimationError as exc:
        raise LedLiteralError(str(exc), parser.tokens[0][2]) from None
    return binding


def parse_animation(text: str):
    """Parse a bare animation such as ``blink(white, 1s, 0.5)``."""
    parser = _Parser(text)
    anim = parser.animation()
    parser.take("end")
    return anim


def _fmt_num(x: float) -> str:
    return repr(float(x)).rstrip("0").rstrip(".") if "e" not in repr(float(x)) else repr(x)


def _fmt_color(c) -> str:
    for name, value in NAMED_COLORS.items():
        if tuple(c) == value:
            return name
    return f"rgb({_fmt_num(c[0])}, {_fmt_num(c[1])}, {_fmt_num(c[2])})"


def _fmt_colors(colors) -> str:
    parts = []
    for c in colors:
        if parts and parts[-1][0] == c:
            parts[-1][1] += 1
        else:
            parts.append([c, 1])
    return "[" + ", ".join(_fmt_color(c) + (f"*{n}" if n > 1 else "") for c, n in parts) + "]"


def _fmt_args(anim) -> str:
    if isinstance(anim, Solid):
        return _fmt_color(anim.color)
    if isinstance(anim, Blink):
        return f"{_fmt_color(anim.color)}, {_fmt_num(anim.period)}s, {_fmt_num(anim.duty)}"
    if isinstance(anim, Fade):
        return f"{_fmt_color(anim.start)}, {_fmt_color(anim.end)}, {_fmt_num(anim.duration)}s"
    if isinstance(anim, Rotate):
        return f"{_fmt_colors(anim.colors)}, {_fmt_num(anim.period)}s"
    if isinstance(anim, Sequence):
        return ", ".join(f"({format_animation(a)}, {_fmt_num(d)}s)" for a, d in anim.steps)
    if isinstance(anim, Loop):
        return format_animation(anim.animation)
    raise AnimationError(f"not an animation: {anim!r}")


_KIND = {Solid: "solid", Blink: "blink", Fade: "fade", Rotate: "rotate",
         Sequence: "seq", Loop: "loop"}


def format_animation(anim) -> str:
    return f"{_KIND[type(anim)]}({_fmt_args(anim)})"


def format_led(binding: LedBinding) -> str:
    groups = "+".join(g.value for g in binding.groups)
    return f"{_KIND[type(binding.animation)]}({groups}, {_fmt_args(binding.animation)})"
