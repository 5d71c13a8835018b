"""Target selection and the proportional head controller."""

from __future__ import annotations

import math
import threading

from oan.lola.arbitration import CommandRequest
from oan.lola.loop import LatestValue
from oan.perception.types import CameraModel, Detection, TargetPolicy, TrackGains
from oan.robot_model import JointId, load_model
from oan.runtime import Action


def _clamp(x: float, lo: float, hi: float) -> float:
    return min(max(x, lo), hi)


def select_target(detections, policy: TargetPolicy | None = None) -> Detection | None:
    policy = policy or TargetPolicy()
    pool = [d for d in detections if policy.label is None or d.label == policy.label]
    if not pool:
        return None
    if policy.strategy == "highest_confidence":
        primary = lambda d: d.confidence  # noqa: E731
    elif policy.strategy == "largest_area":
        primary = lambda d: d.area  # noqa: E731
    else:
        primary = lambda d: -math.hypot(d.cx - 0.5, d.cy - 0.5)  # noqa: E731
    return max(pool, key=lambda d: (primary(d), d.confidence, d.area, d.cx))


def head_track_step(target: Detection, head: tuple, cam: CameraModel | None = None,
                    gains: TrackGains | None = None) -> tuple:
    """(Δyaw, Δpitch) moving the head toward ``target``.

    Each axis is zero inside the deadband, otherwise proportional to the
    image error and clamped to ``max_step``. The resulting absolute angles
    stay within the head joint limits.
    """
    cam = cam or CameraModel()
    gains = gains or TrackGains()
    model = load_model()
    yaw, pitch = head
    e_u = 0.5 - target.cx
    e_v = 0.5 - target.cy
    d_yaw = 0.0
    d_pitch = 0.0
    if abs(e_u) >= gains.deadband:
        d_yaw = _clamp(gains.k_yaw * e_u * cam.horizontal_fov, -gains.max_step, gains.max_step)
    if abs(e_v) >= gains.deadband:
        d_pitch = _clamp(-gains.k_pitch * e_v * cam.vertical_fov, -gains.max_step, gains.max_step)
    y, p = JointId.HeadYaw, JointId.HeadPitch
    return (_limited_step(yaw, d_yaw, model.lower[y], model.upper[y]),
            _limited_step(pitch, d_pitch, model.lower[p], model.upper[p]))


def _limited_step(angle: float, step: float, lo: float, hi: float) -> float:
    """``step`` shortened so that ``angle + step`` stays in [lo, hi]."""
    if lo <= angle + step <= hi:
        return step
    inward = -math.inf if angle + step > hi else math.inf
    step = (hi if inward < 0 else lo) - angle
    # the subtraction can round outward by an ulp
    while not lo <= angle + step <= hi:
        step = math.nextafter(step, inward)
    return step


class LocationBoard:
    """Latest published detection plus push notification to subscribers."""

    def __init__(self):
        self._latest = LatestValue()
        self._subscribers: list = []
        self._lock = threading.Lock()

    def publish(self, detection: Detection | None, stamp: float) -> None:
        self._latest.set(detection, stamp)
        with self._lock:
            subscribers = list(self._subscribers)
        for callback in subscribers:
            callback(detection, stamp)

    def subscribe(self, callback) -> None:
        with self._lock:
            self._subscribers.append(callback)

    def unsubscribe(self, callback) -> None:
        with self._lock:
            self._subscribers.remove(callback)

    def latest(self) -> tuple:
        """(detection, stamp); stamp is None before the first publish."""
        return self._latest.get_with_stamp()


publish_location = LocationBoard.publish


class HeadTrackAction(Action):
    """Steps the head once per newly published detection.

    Tracking is suspended while the newest detection is older than
    ``max_age`` seconds of sensor time or when no target is visible.
    """

    source_id = "track"
    priority = 5

    def __init__(self, board: LocationBoard, cam: CameraModel | None = None,
                 gains: TrackGains | None = None, max_age: float = 0.5,
                 stiffness: float = 1.0, duration: float | None = None):
        self.board = board
        self.cam = cam or CameraModel()
        self.gains = gains or TrackGains()
        self.max_age = max_age
        self.stiffness = stiffness
        self.duration = duration
        self.head = None
        self.suspended = True
        self.steps = 0
        self._last_stamp = None
        self._t0 = None

    def channels(self):
        return (JointId.HeadYaw, JointId.HeadPitch), ()

    def begin(self, robot, sensor):
        self._t0 = sensor.timestamp
        self.head = (float(sensor.joint_positions[JointId.HeadYaw]),
                     float(sensor.joint_positions[JointId.HeadPitch]))

    def step(self, robot, sensor):
        detection, stamp = self.board.latest()
        fresh = stamp is not None and sensor.timestamp - stamp <= self.max_age
        self.suspended = not fresh or detection is None
        if not self.suspended and stamp != self._last_stamp:
            self._last_stamp = stamp
            d_yaw, d_pitch = head_track_step(detection, self.head, self.cam, self.gains)
            self.head = (self.head[0] + d_yaw, self.head[1] + d_pitch)
            self.steps += 1
        robot.submit(CommandRequest(self.source_id, joint_targets={
            JointId.HeadYaw: (self.head[0], self.stiffness),
            JointId.HeadPitch: (self.head[1], self.stiffness)}, priority=self.priority))
        return self.duration is not None and sensor.timestamp - self._t0 >= self.duration


def closed_loop(detector, head=(0.0, 0.0), cam: CameraModel | None = None,
                gains: TrackGains | None = None, cycles: int = 60) -> list:
    """Run the controller against a detector that sees the commanded head pose.

    ``detector(head)`` returns a list of detections; the head is assumed to
    reach each commanded pose within the cycle. Returns the per-cycle
    ``(e_u, e_v, Δyaw, Δpitch, yaw, pitch)`` trace, starting before the first step.
    """
    cam = cam or CameraModel()
    gains = gains or TrackGains()
    trace = []
    for _ in range(cycles + 1):
        found = select_target(detector(head))
        if found is None:
            trace.append((math.nan, math.nan, 0.0, 0.0) + tuple(head))
            continue
        d = head_track_step(found, head, cam, gains)
        trace.append((0.5 - found.cx, 0.5 - found.cy) + d + tuple(head))
        head = (head[0] + d[0], head[1] + d[1])
    return trace
