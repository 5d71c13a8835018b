"""Detection, target selection and head tracking."""

from oan.perception.detectors import (BlobDetector, RemoteDetector, ScriptedDetector,
                                      WorldTargetDetector, decode_frame, encode_frame,
                                      parse_detections)
from oan.perception.runner import DetectionRunner
from oan.perception.sources import FileFrameSource, SyntheticFrameSource, TickSource
from oan.perception.tracking import (HeadTrackAction, LocationBoard, closed_loop,
                                     head_track_step, publish_location, select_target)
from oan.perception.types import (STRATEGIES, CameraModel, Detection, Frame,
                                  TargetPolicy, TrackGains)

__all__ = [
    "BlobDetector", "RemoteDetector", "ScriptedDetector", "WorldTargetDetector",
    "decode_frame", "encode_frame", "parse_detections", "FileFrameSource",
    "SyntheticFrameSource", "TickSource", "DetectionRunner", "HeadTrackAction", "LocationBoard", "closed_loop",
    "head_track_step", "publish_location", "select_target", "STRATEGIES",
    "CameraModel", "Detection", "Frame", "TargetPolicy", "TrackGains",
]
