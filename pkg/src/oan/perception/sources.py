"""Frame sources: a directory of .npy images and a synthetic renderer."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from oan.perception.types import CameraModel, Frame


class FileFrameSource:
    """Frames from ``*.npy`` files in name order, stamped at ``fps``."""

    def __init__(self, directory, fps: float = 15.0, loop: bool = False):
        self.paths = sorted(Path(directory).glob("*.npy"))
        if not self.paths:
            raise FileNotFoundError(f"no .npy frames in {directory}")
        self.fps = fps
        self.loop = loop
        self._i = 0

    def next_frame(self) -> Frame | None:
        if self._i >= len(self.paths):
            if not self.loop:
                return None
        path = self.paths[self._i % len(self.paths)]
        pixels = np.load(path, allow_pickle=False)
        frame = Frame(pixels.shape[1], pixels.shape[0], pixels, self._i / self.fps, str(path))
        self._i += 1
        return frame

    def __iter__(self):
        while (frame := self.next_frame()) is not None:
            yield frame


class SyntheticFrameSource:
    """Renders a bright disc for a target fixed in head-angle space.

    ``head`` is a callable returning the current (yaw, pitch), so the picture
    follows the head the way a real camera image would.
    """

    def __init__(self, target_yaw: float, target_pitch: float, head=None,
                 cam: CameraModel | None = None, width: int = 160, height: int = 120,
                 radius: int = 8, fps: float = 15.0, clock=None):
        self.target = (target_yaw, target_pitch)
        self.head = head or (lambda: (0.0, 0.0))
        self.cam = cam or CameraModel()
        self.width = width
        self.height = height
        self.radius = radius
        self.fps = fps
        self.clock = clock
        self._i = 0
        self._yy, self._xx = np.mgrid[0:height, 0:width]

    def render(self, head) -> np.ndarray:
        img = np.zeros((self.height, self.width), dtype=np.uint8)
        point = self.cam.project(self.target[0] - head[0],
                                 self.target[1] - head[1] - self.cam.pitch_offset)
        if point is not None:
            px, py = point[0] * self.width - 0.5, point[1] * self.height - 0.5
            img[(self._xx - px) ** 2 + (self._yy - py) ** 2 <= self.radius ** 2] = 255
        return img

    def next_frame(self) -> Frame:
        stamp = self.clock() if self.clock else self._i / self.fps
        self._i += 1
        return Frame(self.width, self.height, self.render(self.head()), stamp, "synthetic")

    def __iter__(self):
        while True:
            yield self.next_frame()


class TickSource:
    """Pixel-less frames at ``fps``, for detectors that ignore the image."""

    def __init__(self, fps: float = 15.0, clock=None, width: int = 1, height: int = 1):
        self.fps = fps
        self.clock = clock
        self.size = (width, height)
        self._i = 0

    def next_frame(self) -> Frame:
        stamp = self.clock() if self.clock else self._i / self.fps
        self._i += 1
        return Frame(self.size[0], self.size[1], None, stamp, "tick")

    def __iter__(self):
        while True:
            yield self.next_frame()
