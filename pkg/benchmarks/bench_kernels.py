"""Compare the numba kernels against the pure-numpy fallback.

Runs every workload twice in fresh interpreters, once jitted and once with
OAN_NO_NUMBA=1, then prints the timings side by side and checks that both
paths produce the same numbers.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def workloads():
    from oan import kernels
    from oan.walk.kinematics import geometry_vector

    rng = np.random.default_rng(0)
    gv = geometry_vector()

    knot_t = np.cumsum(rng.uniform(0.1, 0.5, 40))
    knot_v = rng.uniform(-1, 1, (40, 6))
    ts = np.linspace(0, knot_t[-1], 20_000)

    t = np.arange(2000) / 83.0
    y = np.sin(2 * t) + 0.3 * np.sin(7 * t)
    ys = np.stack([y, np.cos(3 * t), 0.5 * np.sin(t)], axis=1)

    joints = np.column_stack([rng.uniform(-0.3, 0.1, 2000), rng.uniform(-0.2, 0.2, 2000),
                              rng.uniform(-0.8, 0.2, 2000), rng.uniform(0.2, 1.6, 2000),
                              rng.uniform(-0.6, 0.3, 2000), rng.uniform(-0.2, 0.2, 2000)])
    soles, _ = kernels.leg_fk_many(joints, 1.0, gv)
    yaws = np.zeros(len(soles))

    pos = rng.uniform(-1, 1, 25)
    cmd = rng.uniform(-1, 1, 25)
    ones = np.ones(25)
    out = np.empty(25)
    intervals = rng.normal(1 / 83, 3e-4, 4096)

    def servo():
        p = pos.copy()
        for _ in range(2000):
            p = kernels.servo_step(p, cmd, ones, ones * 6.4, 1 / 83, out).copy()
        return p

    return {
        "interp_many (20k samples x 6 joints)": lambda: kernels.interp_many(knot_t, knot_v, ts),
        "rdp_keep (2000 samples)": lambda: kernels.rdp_keep(t, y, 1e-3, np.zeros(len(t), bool)),
        "refine_keep (2000 x 3)": lambda: kernels.refine_keep(
            t, ys, 1e-3, kernels.rdp_keep(t, y, 1e-3, np.zeros(len(t), bool))),
        "leg_fk_many (2000 legs)": lambda: kernels.leg_fk_many(joints, 1.0, gv)[0],
        "leg_ik_many (2000 targets)": lambda: kernels.leg_ik_many(soles, yaws, 1.0, gv, 1e-12)[0],
        "servo_step (2000 cycles)": servo,
        "interval_stats (4096)": lambda: np.array(kernels.interval_stats(intervals, 1 / 83)),
    }


def worker(repeat: int) -> None:
    from oan import _accel, kernels

    t0 = time.perf_counter()
    kernels.warmup()
    results = {"numba": _accel.USE_NUMBA, "warmup_s": time.perf_counter() - t0, "kernels": {}}
    for name, fn in workloads().items():
        value = np.asarray(fn(), dtype=float)  # first call also compiles leftovers
        best = float("inf")
        for _ in range(repeat):
            t0 = time.perf_counter()
            fn()
            best = min(best, time.perf_counter() - t0)
        results["kernels"][name] = {"best_s": best, "checksum": float(np.nansum(value)),
                                    "first": value.reshape(-1)[:8].tolist()}
    print(json.dumps(results))


def run(no_numba: bool, repeat: int) -> dict:
    env = dict(os.environ)
    env.pop("OAN_NO_NUMBA", None)
    if no_numba:
        env["OAN_NO_NUMBA"] = "1"
    out = subprocess.run([sys.executable, __file__, "--worker", "--repeat", str(repeat)],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()
    if args.worker:
        worker(args.repeat)
        return 0

    jit = run(False, args.repeat)
    plain = run(True, args.repeat)
    if not jit["numba"]:
        print("numba is not importable; both columns use the fallback")
    print(f"{'kernel':40s} {'numba':>10s} {'numpy':>10s} {'speedup':>8s}  agree")
    ok = True
    for name, a in jit["kernels"].items():
        b = plain["kernels"][name]
        agree = np.allclose(a["first"], b["first"], rtol=1e-12, atol=1e-12) and \
            np.isclose(a["checksum"], b["checksum"], rtol=1e-9, atol=1e-9)
        ok &= bool(agree)
        print(f"{name:40s} {a['best_s'] * 1e3:8.2f}ms {b['best_s'] * 1e3:8.2f}ms "
              f"{b['best_s'] / a['best_s']:7.1f}x  {'yes' if agree else 'NO'}")
    print(f"warmup (compile or cache load): {jit['warmup_s']:.2f} s with numba, "
          f"{plain['warmup_s']:.3f} s without")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
