"""Second, independent leg forward-kinematics chain built from the raw link table.

Each joint is a rotation about a unit axis (Rodrigues' formula) followed by a
link translation; nothing is shared with the package kernels.
"""

import math

import numpy as np

from oan.robot_model import load_model

SQ = 1.0 / math.sqrt(2.0)


def rodrigues(axis, angle):
    k = np.asarray(axis, dtype=float)
    k = k / np.linalg.norm(k)
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + math.sin(angle) * K + (1 - math.cos(angle)) * K @ K


def fk_oracle(joints, side):
    g = load_model().geometry
    s = 1.0 if side == "left" else -1.0
    # the shared joint turns about an axis tilted 45 degrees in the y-z plane
    hyp_axis = (0.0, -SQ, SQ) if side == "left" else (0.0, -SQ, -SQ)
    axes = [hyp_axis, (1, 0, 0), (0, 1, 0), (0, 1, 0), (0, 1, 0), (1, 0, 0)]
    links = [None, None, (0, 0, -g.thigh_length), (0, 0, -g.tibia_length), None,
             (0, 0, -g.foot_height)]
    p = np.array([0.0, s * g.hip_offset_y, -g.hip_offset_z])
    R = np.eye(3)
    for axis, q, link in zip(axes, joints, links):
        R = R @ rodrigues(axis, q)
        if link is not None:
            p = p + R @ np.array(link, dtype=float)
    return p, R
