"""Per-group animation stacks sampled once per cycle.

The registry owns every LED group that has at least one attached animation.
The highest-priority entry of a group is shown (latest attach wins ties), and
detaching it resumes the one underneath. When a stack empties the grant is
released and the group holds its last value.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field

from oan.led.animation import Sampler
from oan.led.literal import LedBinding, format_animation, parse_led
from oan.lola.arbitration import CommandRequest
from oan.robot_model import LedGroup

_order = itertools.count()


@dataclass
class _Entry:
    sampler: Sampler
    priority: int
    tag: str
    order: int = field(default_factory=lambda: next(_order))
    origin: float | None = None  # sensor time of the first sampled cycle


class LedRegistry:
    def __init__(self, robot, source_id: str = "leds", request_priority: int = 0):
        self.robot = robot
        self.source_id = source_id
        self.request_priority = request_priority
        self._stacks: dict[LedGroup, list[_Entry]] = {}
        self._lock = threading.Lock()
        self._to_release: set = set()
        robot.hooks.append(self._hook)

    def attach(self, group, animation, priority: int = 0, tag: str = "") -> None:
        group = LedGroup(group)
        entry = _Entry(Sampler(animation, group), priority, tag)
        with self._lock:
            if not self._stacks.get(group):
                self.robot.arbiter.grant_ownership(self.source_id, leds=[group])
            self._to_release.discard(group)
            self._stacks.setdefault(group, []).append(entry)

    def attach_binding(self, binding: LedBinding | str, priority: int = 0, tag: str = "") -> None:
        if isinstance(binding, str):
            binding = parse_led(binding)
        for group in binding.groups:
            self.attach(group, binding.animation, priority, tag)

    def detach(self, group, tag: str | None = None) -> bool:
        """Remove the shown entry of ``group`` (or every entry with ``tag``)."""
        group = LedGroup(group)
        with self._lock:
            stack = self._stacks.get(group)
            if not stack:
                return False
            if tag is None:
                stack.remove(self._top(stack))
            else:
                kept = [e for e in stack if e.tag != tag]
                if len(kept) == len(stack):
                    return False
                stack[:] = kept
            if not stack:
                # the last request may still be in flight; release next cycle
                self._to_release.add(group)
            return True

    def detach_all(self, tag: str | None = None) -> None:
        for group in list(self._stacks):
            while self.detach(group, tag) and tag is None:
                pass

    def shown(self) -> dict:
        """Group name -> literal of the animation currently shown."""
        with self._lock:
            return {g.value: format_animation(self._top(s).sampler.animation)
                    for g, s in self._stacks.items() if s}

    @staticmethod
    def _top(stack: list) -> _Entry:
        return max(stack, key=lambda e: (e.priority, e.order))

    def _hook(self, robot, sensor) -> None:
        targets = {}
        with self._lock:
            for group in self._to_release:
                if not self._stacks.get(group):
                    robot.arbiter.release_ownership(self.source_id, leds=[group])
            self._to_release.clear()
            for group, stack in self._stacks.items():
                if not stack:
                    continue
                entry = self._top(stack)
                if entry.origin is None:
                    entry.origin = sensor.timestamp
                targets[group] = entry.sampler(sensor.timestamp - entry.origin)
        if targets:
            robot.submit(CommandRequest(self.source_id, led_targets=targets,
                                        priority=self.request_priority))
