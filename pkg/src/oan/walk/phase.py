"""Support-phase detection from the foot pressure sensors."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class Support(enum.Enum):
    DoubleSupport = "DoubleSupport"
    LeftSupport = "LeftSupport"
    RightSupport = "RightSupport"
    Airborne = "Airborne"

    @property
    def left_contact(self) -> bool:
        return self in (Support.DoubleSupport, Support.LeftSupport)

    @property
    def right_contact(self) -> bool:
        return self in (Support.DoubleSupport, Support.RightSupport)

    @classmethod
    def from_contacts(cls, left: bool, right: bool) -> "Support":
        if left and right:
            return cls.DoubleSupport
        if left:
            return cls.LeftSupport
        if right:
            return cls.RightSupport
        return cls.Airborne


@dataclass(frozen=True)
class SupportState:
    phase: Support = Support.DoubleSupport
    entered_at: float = 0.0


def _contact(total: float, was_in_contact: bool, threshold: float) -> bool:
    if was_in_contact:
        return total >= 0.5 * threshold
    return total > threshold


def detect_phase(fsr, prev: SupportState, threshold: float, t: float | None = None) -> SupportState:
    """Contact per foot is "sum of its 4 sensors above ``threshold``"; leaving
    contact requires the sum to fall below half the threshold."""
    fsr = np.asarray(fsr, dtype=float)
    left = _contact(float(fsr[:4].sum()), prev.phase.left_contact, threshold)
    right = _contact(float(fsr[4:].sum()), prev.phase.right_contact, threshold)
    phase = Support.from_contacts(left, right)
    if phase == prev.phase:
        return prev
    entered = prev.entered_at if t is None else max(t, prev.entered_at)
    return SupportState(phase, entered)
