"""Detector implementations: scripted and world-target stubs, a brightness
blob finder, and an HTTP client for a remote detection service."""

from __future__ import annotations

import bisect
import io
import json
import logging

import numpy as np
import requests

from oan.perception.types import CameraModel, Detection, Frame

log = logging.getLogger(__name__)


class ScriptedDetector:
    """Returns the detections scripted for the latest time <= frame.timestamp."""

    def __init__(self, script):
        items = sorted(dict(script).items())
        self._times = [t for t, _ in items]
        self._detections = [list(d) for _, d in items]

    def detect(self, frame: Frame) -> list:
        i = bisect.bisect_right(self._times, frame.timestamp) - 1
        return list(self._detections[i]) if i >= 0 else []


class WorldTargetDetector:
    """A fixed target in head-yaw/pitch coordinates seen through a pinhole camera.

    ``head`` supplies the current (yaw, pitch) for :meth:`detect`; use
    :meth:`at_head` to query a pose directly.
    """

    def __init__(self, yaw: float, pitch: float, cam: CameraModel | None = None,
                 label: str = "face", size: float = 0.1, confidence: float = 0.9,
                 head=None):
        self.yaw = yaw
        self.pitch = pitch
        self.cam = cam or CameraModel()
        self.label = label
        self.size = size
        self.confidence = confidence
        self.head = head

    @classmethod
    def from_offset(cls, du: float, dv: float, head=(0.0, 0.0),
                    cam: CameraModel | None = None, **kw) -> "WorldTargetDetector":
        """Target that appears at (0.5 + du, 0.5 + dv) when the head is at ``head``."""
        cam = cam or CameraModel()
        rel_yaw = np.arctan(-du * 2 * np.tan(cam.horizontal_fov / 2))
        rel_pitch = np.arctan(dv * 2 * np.tan(cam.vertical_fov / 2))
        return cls(head[0] + float(rel_yaw), head[1] + cam.pitch_offset + float(rel_pitch),
                   cam, **kw)

    def at_head(self, head) -> list:
        point = self.cam.project(self.yaw - head[0], self.pitch - head[1] - self.cam.pitch_offset)
        if point is None:
            return []
        u, v = point
        if not (0.0 < u < 1.0 and 0.0 < v < 1.0):
            return []
        w = min(self.size, 2 * u, 2 * (1 - u))
        h = min(self.size, 2 * v, 2 * (1 - v))
        return [Detection(self.label, u, v, w, h, self.confidence)]

    __call__ = at_head

    def detect(self, frame: Frame) -> list:
        return self.at_head(self.head() if self.head else (0.0, 0.0))


class BlobDetector:
    """Centroid and extent of pixels brighter than ``threshold`` (0-255 scale)."""

    def __init__(self, threshold: float = 200.0, label: str = "blob", min_pixels: int = 4):
        self.threshold = threshold
        self.label = label
        self.min_pixels = min_pixels

    def detect(self, frame: Frame) -> list:
        if frame.pixels is None:
            return []
        img = np.asarray(frame.pixels, dtype=float)
        if img.ndim == 3:
            img = img.mean(axis=2)
        mask = img >= self.threshold
        count = int(mask.sum())
        if count < self.min_pixels:
            return []
        rows, cols = np.nonzero(mask)
        cx = (cols.mean() + 0.5) / frame.width
        cy = (rows.mean() + 0.5) / frame.height
        x0, x1 = cols.min() / frame.width, (cols.max() + 1) / frame.width
        y0, y1 = rows.min() / frame.height, (rows.max() + 1) / frame.height
        w = min(x1 - x0, 2 * cx, 2 * (1 - cx))
        h = min(y1 - y0, 2 * cy, 2 * (1 - cy))
        confidence = min(1.0, count / max(1.0, (x1 - x0) * frame.width * (y1 - y0) * frame.height))
        return [Detection(self.label, float(cx), float(cy), float(w), float(h),
                          float(confidence))]


def encode_frame(frame: Frame) -> bytes:
    buf = io.BytesIO()
    np.save(buf, np.asarray(frame.pixels), allow_pickle=False)
    return buf.getvalue()


def decode_frame(body: bytes, timestamp: float = 0.0, source_id: str = "") -> Frame:
    pixels = np.load(io.BytesIO(body), allow_pickle=False)
    return Frame(pixels.shape[1], pixels.shape[0], pixels, timestamp, source_id)


def parse_detections(payload) -> list:
    if not isinstance(payload, list):
        raise ValueError("detection response must be a JSON array")
    return [Detection.from_json(obj) for obj in payload]


class RemoteDetector:
    """POSTs frames as .npy payloads; any failure yields no detections."""

    def __init__(self, url: str, timeout: float = 0.5, session: requests.Session | None = None):
        self.url = url
        self.timeout = timeout
        self.session = session or requests.Session()
        self.errors = 0

    def detect(self, frame: Frame) -> list:
        if frame.pixels is None:
            return []
        try:
            resp = self.session.post(
                self.url, data=encode_frame(frame), timeout=self.timeout,
                headers={"Content-Type": "application/x-npy",
                         "X-Frame-Timestamp": repr(frame.timestamp),
                         "X-Frame-Source": frame.source_id})
            resp.raise_for_status()
            return parse_detections(resp.json())
        except (requests.RequestException, ValueError, KeyError, TypeError,
                json.JSONDecodeError) as exc:
            self.errors += 1
            log.error("detection request to %s failed: %s", self.url, exc)
            return []
