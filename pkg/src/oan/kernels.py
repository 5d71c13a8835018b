"""Hot numeric kernels.

Each function is jitted with numba when available (see ``oan._accel``) and
otherwise runs as ordinary numpy/Python code. Keep the bodies inside the
numba nopython subset: no Python objects, no keyword-only tricks.
"""

import math

import numpy as np

from oan._accel import jit

# -- loop statistics ---------------------------------------------------------


@jit
def interval_stats(intervals, period):
    """Return (mean interval, p99 |interval - period|, max |interval - period|)."""
    n = intervals.shape[0]
    if n == 0:
        return 0.0, 0.0, 0.0
    total = 0.0
    dev = np.empty(n)
    for i in range(n):
        total += intervals[i]
        dev[i] = abs(intervals[i] - period)
    dev = np.sort(dev)
    k = int(math.ceil(0.99 * n)) - 1
    if k < 0:
        k = 0
    return total / n, dev[k], dev[n - 1]


# -- plant -------------------------------------------------------------------


@jit
def servo_step(position, command, stiffness, max_velocity, dt, out):
    """First-order velocity-clamped servo; zero stiffness leaves a joint free."""
    for i in range(position.shape[0]):
        if stiffness[i] > 0.0:
            limit = max_velocity[i] * dt
            delta = command[i] - position[i]
            if delta > limit:
                delta = limit
            elif delta < -limit:
                delta = -limit
            out[i] = position[i] + delta
        else:
            out[i] = position[i]
    return out


@jit
def velocity_clamp(previous, target, max_velocity, dt, out):
    for i in range(previous.shape[0]):
        limit = max_velocity[i] * dt
        delta = target[i] - previous[i]
        if delta > limit:
            delta = limit
        elif delta < -limit:
            delta = -limit
        out[i] = previous[i] + delta
    return out


# -- keyframe interpolation --------------------------------------------------


@jit
def interp_at(knot_times, knot_values, t, out):
    """Piecewise-linear sample of ``knot_values`` (K x J) at time ``t``."""
    n = knot_times.shape[0]
    if t <= knot_times[0]:
        out[:] = knot_values[0]
        return out
    if t >= knot_times[n - 1]:
        out[:] = knot_values[n - 1]
        return out
    lo = 0
    hi = n - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if knot_times[mid] <= t:
            lo = mid
        else:
            hi = mid
    frac = (t - knot_times[lo]) / (knot_times[hi] - knot_times[lo])
    for j in range(knot_values.shape[1]):
        a = knot_values[lo, j]
        out[j] = a + frac * (knot_values[hi, j] - a)
    return out


@jit
def interp_many(knot_times, knot_values, ts):
    out = np.empty((ts.shape[0], knot_values.shape[1]))
    row = np.empty(knot_values.shape[1])
    for i in range(ts.shape[0]):
        interp_at(knot_times, knot_values, ts[i], row)
        out[i, :] = row
    return out


# -- keyframe reduction ------------------------------------------------------


@jit
def _max_vertical_error(t, y, lo, hi):
    worst = -1.0
    worst_i = -1
    span = t[hi] - t[lo]
    for i in range(lo + 1, hi):
        line = y[lo] + (y[hi] - y[lo]) * ((t[i] - t[lo]) / span)
        err = abs(y[i] - line)
        if err > worst:
            worst = err
            worst_i = i
    return worst, worst_i


@jit
def rdp_keep(t, y, tol, keep):
    """Ramer-Douglas-Peucker on (t, y) with vertical distance; marks ``keep``."""
    n = t.shape[0]
    keep[0] = True
    keep[n - 1] = True
    stack = np.empty((n, 2), dtype=np.int64)
    top = 0
    stack[0, 0] = 0
    stack[0, 1] = n - 1
    top = 1
    while top > 0:
        top -= 1
        lo = stack[top, 0]
        hi = stack[top, 1]
        if hi - lo < 2:
            continue
        err, idx = _max_vertical_error(t, y, lo, hi)
        if err > tol:
            keep[idx] = True
            stack[top, 0] = lo
            stack[top, 1] = idx
            stack[top + 1, 0] = idx
            stack[top + 1, 1] = hi
            top += 2
    return keep


@jit
def refine_keep(t, values, tol, keep):
    """Add samples until every joint's polyline is within ``tol`` everywhere."""
    changed = True
    while changed:
        changed = False
        prev = 0
        for i in range(1, t.shape[0]):
            if not keep[i]:
                continue
            worst = tol
            worst_i = -1
            for j in range(values.shape[1]):
                err, idx = _max_vertical_error(t, values[:, j], prev, i)
                if err > worst:
                    worst = err
                    worst_i = idx
            if worst_i >= 0:
                keep[worst_i] = True
                changed = True
            prev = i
    return keep


# -- leg kinematics ----------------------------------------------------------
# geometry vector: hip_offset_y, hip_offset_z, thigh, tibia, foot_height
# joints vector: hipYawPitch, hipRoll, hipPitch, kneePitch, anklePitch, ankleRoll
# side: +1 left, -1 right

@jit
def rot_x(a):
    c = math.cos(a)
    s = math.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


@jit
def rot_y(a):
    c = math.cos(a)
    s = math.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


@jit
def rot_z(a):
    c = math.cos(a)
    s = math.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


@jit
def hip_yaw_pitch_rotation(hyp, side):
    q = 0.25 * math.pi * side
    return rot_x(q) @ rot_z(side * hyp) @ rot_x(-q)


@jit
def leg_fk_kernel(joints, side, geometry):
    """Return (sole position (3,), foot rotation (3, 3)) in the torso frame."""
    hip = np.array([0.0, side * geometry[0], -geometry[1]])
    r_up = hip_yaw_pitch_rotation(joints[0], side) @ rot_x(joints[1]) @ rot_y(joints[2])
    knee = hip + r_up @ np.array([0.0, 0.0, -geometry[2]])
    r_shank = r_up @ rot_y(joints[3])
    ankle = knee + r_shank @ np.array([0.0, 0.0, -geometry[3]])
    r_foot = r_shank @ rot_y(joints[4]) @ rot_x(joints[5])
    sole = ankle + r_foot @ np.array([0.0, 0.0, -geometry[4]])
    return sole, r_foot


@jit
def _wrap(a):
    while a > math.pi:
        a -= 2.0 * math.pi
    while a <= -math.pi:
        a += 2.0 * math.pi
    return a


@jit
def _knee_angle(d, thigh, tibia):
    c = (thigh * thigh + tibia * tibia - d * d) / (2.0 * thigh * tibia)
    if c > 1.0:
        c = 1.0
    elif c < -1.0:
        c = -1.0
    return math.pi - math.acos(c)


IK_OK = 0
IK_UNREACHABLE = 1
IK_SINGULAR = 2


@jit
def leg_ik_kernel(sole, yaw, side, geometry, tol):
    """Closed-form 6-DOF leg IK for a flat foot at ``sole`` with heading ``yaw``.

    Returns (joints (6,), status).
    """
    out = np.zeros(6)
    thigh = geometry[2]
    tibia = geometry[3]
    hip = np.array([0.0, side * geometry[0], -geometry[1]])
    r_foot = rot_z(yaw)
    ankle = sole + np.array([0.0, 0.0, geometry[4]])
    w = r_foot.T @ (hip - ankle)
    d = math.sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2])
    if d > thigh + tibia + tol or d < abs(thigh - tibia) - tol:
        return out, IK_UNREACHABLE
    knee = _knee_angle(d, thigh, tibia)
    ankle_roll = math.atan2(w[1], w[2])
    alpha_w = math.atan2(w[0], math.sqrt(w[1] * w[1] + w[2] * w[2]))
    alpha_u = math.atan2(-thigh * math.sin(knee), thigh * math.cos(knee) + tibia)
    ankle_pitch = alpha_u - alpha_w
    r_up = r_foot @ rot_x(-ankle_roll) @ rot_y(-ankle_pitch - knee)
    m = rot_x(-0.25 * math.pi * side) @ r_up
    sb = m[2, 1]
    if abs(sb) >= 1.0 - 1e-12:
        return out, IK_SINGULAR
    out[0] = side * math.atan2(-m[0, 1], m[1, 1])
    out[1] = math.asin(sb) + 0.25 * math.pi * side
    out[2] = math.atan2(-m[2, 0], m[2, 2])
    out[3] = knee
    out[4] = _wrap(ankle_pitch)
    out[5] = _wrap(ankle_roll)
    return out, IK_OK


@jit
def leg_ik_fixed_hyp_kernel(sole, hyp, side, geometry, tol):
    """Leg IK with the shared HipYawPitch fixed: reaches ``sole`` with a flat
    foot; the foot heading follows from ``hyp``. Returns (joints, status)."""
    out = np.zeros(6)
    thigh = geometry[2]
    tibia = geometry[3]
    hip = np.array([0.0, side * geometry[0], -geometry[1]])
    ankle = sole + np.array([0.0, 0.0, geometry[4]])
    r0 = hip_yaw_pitch_rotation(hyp, side)
    q = r0.T @ (ankle - hip)
    d = math.sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2])
    if d > thigh + tibia + tol or d < abs(thigh - tibia) - tol:
        return out, IK_UNREACHABLE
    knee = _knee_angle(d, thigh, tibia)
    gx = -tibia * math.sin(knee)
    gz = -thigh - tibia * math.cos(knee)
    ryz = math.sqrt(q[1] * q[1] + q[2] * q[2])
    hip_roll = math.atan2(q[1], -q[2])
    hip_pitch = _wrap(math.atan2(q[0], -ryz) - math.atan2(gx, gz))
    v = (r0 @ rot_x(hip_roll)).T @ np.array([0.0, 0.0, 1.0])
    vy = v[1]
    if vy > 1.0:
        vy = 1.0
    elif vy < -1.0:
        vy = -1.0
    ankle_roll = math.asin(-vy)
    beta = math.atan2(v[0], v[2])
    out[0] = hyp
    out[1] = hip_roll
    out[2] = hip_pitch
    out[3] = knee
    out[4] = _wrap(beta - hip_pitch - knee)
    out[5] = ankle_roll
    return out, IK_OK


@jit
def leg_ik_many(soles, yaws, side, geometry, tol):
    n = soles.shape[0]
    joints = np.zeros((n, 6))
    status = np.zeros(n, dtype=np.int64)
    for i in range(n):
        sol, st = leg_ik_kernel(soles[i], yaws[i], side, geometry, tol)
        joints[i, :] = sol
        status[i] = st
    return joints, status


@jit
def leg_fk_many(joints, side, geometry):
    n = joints.shape[0]
    soles = np.zeros((n, 3))
    rots = np.zeros((n, 3, 3))
    for i in range(n):
        p, r = leg_fk_kernel(joints[i], side, geometry)
        soles[i, :] = p
        rots[i, :, :] = r
    return soles, rots


_warm = False


def warmup() -> None:
    """Compile every kernel once so no JIT work lands inside a control cycle."""
    global _warm
    if _warm:
        return
    v = np.zeros(3)
    servo_step(v, v, np.ones(3), np.ones(3), 0.01, np.zeros(3))
    velocity_clamp(v, v, np.ones(3), 0.01, np.zeros(3))
    interval_stats(np.ones(4), 1.0)
    times = np.array([0.0, 1.0])
    vals = np.zeros((2, 2))
    interp_at(times, vals, 0.5, np.zeros(2))
    interp_many(times, vals, np.array([0.25]))
    t = np.arange(4.0)
    keep = np.zeros(4, dtype=np.bool_)
    rdp_keep(t, np.zeros(4), 0.1, keep)
    refine_keep(t, np.zeros((4, 2)), 0.1, keep)
    geometry = np.array([0.05, 0.085, 0.1, 0.1029, 0.04519])
    sole, _ = leg_fk_kernel(np.zeros(6), 1.0, geometry)
    leg_ik_kernel(sole, 0.0, 1.0, geometry, 1e-9)
    leg_ik_fixed_hyp_kernel(sole, 0.0, 1.0, geometry, 1e-9)
    leg_ik_many(sole.reshape(1, 3), np.zeros(1), 1.0, geometry, 1e-9)
    leg_fk_many(np.zeros((1, 6)), 1.0, geometry)
    _warm = True
