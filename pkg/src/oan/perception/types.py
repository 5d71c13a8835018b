"""Frames, detections and the camera/controller parameters."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass
class Frame:
    width: int
    height: int
    pixels: np.ndarray | None = None  # (height, width) or (height, width, channels)
    timestamp: float = 0.0
    source_id: str = ""

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("frame dimensions must be positive")
        if self.pixels is not None and self.pixels.shape[:2] != (self.height, self.width):
            raise ValueError(f"pixel shape {self.pixels.shape} does not match "
                             f"{self.width}x{self.height}")


@dataclass(frozen=True)
class Detection:
    label: str
    cx: float
    cy: float
    w: float
    h: float
    confidence: float

    def __post_init__(self):
        for name in ("cx", "cy", "w", "h", "confidence"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name}={value} outside [0, 1]")
        if (self.cx - self.w / 2 < -1e-9 or self.cx + self.w / 2 > 1 + 1e-9
                or self.cy - self.h / 2 < -1e-9 or self.cy + self.h / 2 > 1 + 1e-9):
            raise ValueError("bounding box leaves the unit square")

    @property
    def area(self) -> float:
        return self.w * self.h

    @property
    def bbox(self) -> tuple:
        return (self.cx, self.cy, self.w, self.h)

    def to_json(self) -> dict:
        return {"label": self.label, "cx": self.cx, "cy": self.cy, "w": self.w,
                "h": self.h, "confidence": self.confidence}

    @classmethod
    def from_json(cls, obj: dict) -> "Detection":
        return cls(str(obj["label"]), float(obj["cx"]), float(obj["cy"]),
                   float(obj["w"]), float(obj["h"]), float(obj["confidence"]))


@dataclass(frozen=True)
class CameraModel:
    horizontal_fov: float = 1.064
    vertical_fov: float = 0.831
    pitch_offset: float = 0.0

    def __post_init__(self):
        for fov in (self.horizontal_fov, self.vertical_fov):
            if not 0.0 < fov < math.pi:
                raise ValueError("field of view must be in (0, pi)")

    def project(self, rel_yaw: float, rel_pitch: float) -> tuple | None:
        """Normalized image point of a direction relative to the optical axis.

        Positive yaw is to the left, positive pitch is downward. Returns None
        when the direction is behind the camera.
        """
        if abs(rel_yaw) >= math.pi / 2 or abs(rel_pitch) >= math.pi / 2:
            return None
        u = 0.5 - math.tan(rel_yaw) / (2 * math.tan(self.horizontal_fov / 2))
        v = 0.5 + math.tan(rel_pitch) / (2 * math.tan(self.vertical_fov / 2))
        return u, v


@dataclass(frozen=True)
class TrackGains:
    k_yaw: float = 0.3
    k_pitch: float = 0.3
    deadband: float = 0.03
    max_step: float = 0.03

    def __post_init__(self):
        if self.k_yaw <= 0 or self.k_pitch <= 0:
            raise ValueError("gains must be positive")
        if self.deadband < 0:
            raise ValueError("deadband must be non-negative")
        if self.max_step <= 0:
            raise ValueError("max_step must be positive")


@dataclass(frozen=True)
class TargetPolicy:
    label: str | None = None
    strategy: str = "highest_confidence"

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}; "
                             f"choose from {', '.join(STRATEGIES)}")


STRATEGIES = ("highest_confidence", "largest_area", "nearest_center")
