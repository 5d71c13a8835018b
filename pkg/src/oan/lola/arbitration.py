"""Multi-source actuator command multiplexer.

Sources must hold a grant for every joint or LED group they command.
Per channel the highest-priority request wins, ties go to the latest
submission, and channels nobody addresses keep their previous value.
"""

from __future__ import annotations

import itertools
import logging
import threading
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from oan.lola.frames import ActuatorFrame
from oan.robot_model import JointId, LedGroup, RobotModel, load_model

log = logging.getLogger(__name__)

_seq = itertools.count(1)


@dataclass
class CommandRequest:
    source_id: str
    joint_targets: dict = field(default_factory=dict)  # JointId -> (position, stiffness | None)
    led_targets: dict = field(default_factory=dict)  # LedGroup -> values
    priority: int = 0
    seq: int = field(default_factory=lambda: next(_seq))

    def channels(self) -> set:
        return set(self.joint_targets) | set(self.led_targets)


class OwnershipError(PermissionError):
    def __init__(self, source_id: str, channels):
        names = sorted(_channel_name(c) for c in channels)
        super().__init__(f"{source_id!r} does not own {', '.join(names)}")
        self.source_id = source_id
        self.channels = frozenset(channels)


class GrantConflict(RuntimeError):
    def __init__(self, source_id: str, contested: dict):
        detail = "; ".join(
            f"{_channel_name(c)} held by {owner!r}"
            for c, owner in sorted(contested.items(), key=lambda kv: _channel_name(kv[0])))
        super().__init__(f"grant for {source_id!r} conflicts: {detail}")
        self.source_id = source_id
        self.contested = contested


def _channel_name(channel) -> str:
    if isinstance(channel, JointId):
        return channel.name
    return f"led:{channel.value}"


@dataclass(frozen=True)
class AuditEntry:
    kind: str  # "rejected" | "conflict" | "clamped"
    source_id: str
    detail: str


@dataclass
class _Grant:
    channels: set
    exclusive: bool


class Arbiter:
    """Ownership table plus the per-cycle arbitration step."""

    def __init__(self, model: RobotModel | None = None, audit_size: int = 1000):
        self.model = model or load_model()
        self._grants: dict[str, _Grant] = {}
        self._lock = threading.RLock()
        self.audit: deque = deque(maxlen=audit_size)
        self.clamp_count = 0
        self.rejected_count = 0
        self.conflict_count = 0

    # -- ownership ---------------------------------------------------------

    def grant_ownership(self, source_id: str, joints=(), leds=(), exclusive: bool = True) -> None:
        wanted = {JointId(j) for j in joints} | {LedGroup(g) for g in leds}
        with self._lock:
            contested = {}
            for other, grant in self._grants.items():
                if other == source_id:
                    continue
                if exclusive or grant.exclusive:
                    for channel in wanted & grant.channels:
                        contested[channel] = other
            if contested:
                self.conflict_count += 1
                exc = GrantConflict(source_id, contested)
                self.audit.append(AuditEntry("conflict", source_id, str(exc)))
                raise exc
            if source_id in self._grants:
                current = self._grants[source_id]
                current.channels |= wanted
                current.exclusive = current.exclusive or exclusive
            else:
                self._grants[source_id] = _Grant(wanted, exclusive)

    def release_ownership(self, source_id: str, joints=None, leds=None) -> None:
        with self._lock:
            grant = self._grants.get(source_id)
            if grant is None:
                return
            if joints is None and leds is None:
                del self._grants[source_id]
                return
            grant.channels -= {JointId(j) for j in joints or ()}
            grant.channels -= {LedGroup(g) for g in leds or ()}
            if not grant.channels:
                del self._grants[source_id]

    def owned_by(self, source_id: str) -> frozenset:
        with self._lock:
            grant = self._grants.get(source_id)
            return frozenset(grant.channels) if grant else frozenset()

    def holders(self) -> dict:
        with self._lock:
            return {s: frozenset(g.channels) for s, g in self._grants.items()}

    # -- arbitration -------------------------------------------------------

    def arbitrate(self, requests, previous: ActuatorFrame) -> ActuatorFrame:
        out = previous.copy()
        winners: dict = {}
        with self._lock:
            for req in sorted(requests, key=lambda r: r.seq):
                grant = self._grants.get(req.source_id)
                owned = grant.channels if grant else set()
                missing = req.channels() - owned
                if missing:
                    self.rejected_count += 1
                    exc = OwnershipError(req.source_id, missing)
                    self.audit.append(AuditEntry("rejected", req.source_id, str(exc)))
                    log.warning("%s", exc)
                    continue
                for channel in req.channels():
                    best = winners.get(channel)
                    if best is None or (req.priority, req.seq) >= (best.priority, best.seq):
                        winners[channel] = req
        for channel, req in winners.items():
            if isinstance(channel, JointId):
                position, stiffness = req.joint_targets[channel]
                lo, hi = self.model.lower[channel], self.model.upper[channel]
                clamped = min(max(float(position), lo), hi)
                if clamped != position:
                    self.clamp_count += 1
                    self.audit.append(AuditEntry(
                        "clamped", req.source_id, f"{channel.name} {position!r} -> {clamped!r}"))
                    log.info("clamped %s from %r to %r", channel.name, position, clamped)
                out.joint_positions[channel] = clamped
                if stiffness is not None:
                    out.joint_stiffness[channel] = min(max(float(stiffness), 0.0), 1.0)
            else:
                values = np.clip(np.asarray(req.led_targets[channel], dtype=float), 0.0, 1.0)
                out.leds[channel] = values
        return out

    def conflicts(self) -> list:
        return [e for e in self.audit if e.kind in ("conflict", "rejected")]
