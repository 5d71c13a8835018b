"""Kinesthetic recordings and their reduction to keyframe scripts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from oan.kernels import rdp_keep, refine_keep
from oan.motion.pos import MIN_DURATION_MS, KeyFrame, PosScript
from oan.robot_model import JointId


@dataclass(frozen=True, eq=False)
class Recording:
    mask: tuple
    sample_period: float
    timestamps: np.ndarray
    samples: np.ndarray  # (n_samples, len(mask))

    def __post_init__(self):
        object.__setattr__(self, "mask", tuple(JointId(j) for j in self.mask))
        ts = np.asarray(self.timestamps, dtype=float)
        samples = np.asarray(self.samples, dtype=float).reshape(len(ts), len(self.mask))
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "samples", samples)
        if len(ts) < 2:
            raise ValueError("a recording needs at least two samples")
        if np.any(np.diff(ts) <= 0):
            raise ValueError("timestamps must be strictly increasing")

    @property
    def lead_in(self) -> float:
        """Duration (s) of the first keyframe of a reduced script."""
        return max(self.sample_period, MIN_DURATION_MS / 1000.0)

    def script_time(self, t: float) -> float:
        """Map a recording timestamp onto the reduced script's clock."""
        return t - self.timestamps[0] + self.lead_in


def keyframe_indices(recording: Recording, tolerance: float) -> np.ndarray:
    """Sample indices kept as keyframes: per-joint RDP, union, then refinement
    so that every joint stays within ``tolerance`` between the kept samples."""
    if not tolerance > 0:
        raise ValueError("tolerance must be > 0")
    t = recording.timestamps
    keep = np.zeros(len(t), dtype=np.bool_)
    for j in range(recording.samples.shape[1]):
        rdp_keep(t, np.ascontiguousarray(recording.samples[:, j]), tolerance, keep)
    refine_keep(t, recording.samples, tolerance, keep)
    return np.flatnonzero(keep)


def reduce_to_script(recording: Recording, tolerance: float, name: str = "recorded") -> PosScript:
    idx = keyframe_indices(recording, tolerance)
    t = recording.timestamps
    frames = [KeyFrame(tuple(float(v) for v in recording.samples[idx[0]]),
                       recording.lead_in * 1000.0)]
    for prev, i in zip(idx[:-1], idx[1:]):
        duration = (t[i] - t[prev]) * 1000.0
        frames.append(KeyFrame(tuple(float(v) for v in recording.samples[i]), duration))
    return PosScript(recording.mask, tuple(frames), name)
