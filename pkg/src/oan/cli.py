"""Command-line entry point: ``oan <command> ...``."""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import os
import signal
import sys
import tempfile
import threading
import time

log = logging.getLogger("oan")


def _add_endpoint(p: argparse.ArgumentParser) -> None:
    p.add_argument("--endpoint", help="robot endpoint (unix path or host:port); "
                   "default $OAN_LOLA_ENDPOINT or /tmp/oan-lola")
    p.add_argument("--with-sim", action="store_true",
                   help="start a private simulator in this process and connect to it")


@contextlib.contextmanager
def _robot(args):
    """Connected Robot, optionally backed by an in-process simulator."""
    from oan.runtime import Robot
    from oan.sim import SimConfig, SimServer, load_scenario

    sim = None
    endpoint = args.endpoint
    if getattr(args, "with_sim", False):
        scenario = getattr(args, "scenario", None)
        config = SimConfig(scenario=load_scenario(scenario) if scenario else None)
        endpoint = os.path.join(tempfile.mkdtemp(prefix="oan-"), "lola")
        sim = SimServer(endpoint, config).start()
    robot = Robot.connect(endpoint)
    try:
        yield robot
    finally:
        robot.stop()
        if sim is not None:
            sim.stop()


def _wait(handle, duration: float | None) -> None:
    end = None if duration is None else time.monotonic() + duration
    while not handle.done:
        if end is not None and time.monotonic() >= end:
            handle.cancel()
            handle.wait(2.0)
            break
        handle.wait(0.1)
    if handle.error is not None:
        raise handle.error


def _joints(text: str | None):
    from oan.robot_model import ARMS, HEAD, LEFT_ARM, LEFT_LEG, LEGS, RIGHT_ARM, RIGHT_LEG, JointId

    if not text:
        return None
    groups = {"head": HEAD, "arms": ARMS, "legs": LEGS, "larm": LEFT_ARM, "rarm": RIGHT_ARM,
              "lleg": LEFT_LEG, "rleg": RIGHT_LEG}
    out = set()
    for name in text.split(","):
        name = name.strip()
        if name.lower() in groups:
            out |= groups[name.lower()]
        elif name:
            out.add(JointId.parse(name))
    return sorted(out)


# -- commands -----------------------------------------------------------------


def cmd_sim(args) -> int:
    from oan.sim import SimConfig, SimServer, load_scenario

    noise = {}
    if args.noise:
        noise = {"gyro": 0.01, "accel": 0.05, "fsr": 0.02, "angles": 0.002}
    config = SimConfig(seed=args.seed, sensor_noise_std=noise,
                       scenario=load_scenario(args.scenario) if args.scenario else None)
    server = SimServer(args.endpoint, config)
    print(f"simulator listening on {server.endpoint}", flush=True)
    if args.duration is not None:
        server.start()
        time.sleep(args.duration)
        server.stop()
        return 0
    signal.signal(signal.SIGTERM, lambda *_: server.stop())
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        while thread.is_alive():
            thread.join(0.2)
    except KeyboardInterrupt:
        server.stop()
    return 0


def cmd_play(args) -> int:
    from oan.motion import PlayAction, load_pos

    script = load_pos(args.file)
    with _robot(args) as robot:
        action = PlayAction(script, _joints(args.mask), args.stiffness)
        handle = robot.start(action)
        for warning in action.warnings:
            print(f"warning: {warning}", file=sys.stderr)
        _wait(handle, None)
        print(f"played {script.name or args.file} ({script.total_duration:.2f} s)")
    return 0


def cmd_record(args) -> int:
    from oan.motion import reduce_to_script, record, save_pos

    mask = _joints(args.mask)
    if not mask:
        print("error: --mask is required", file=sys.stderr)
        return 2
    with _robot(args) as robot:
        handle, action = record(robot, mask, args.period, args.stiffness, args.duration)
        print("recording; move the robot (Ctrl-C to finish early)", flush=True)
        try:
            _wait(handle, None)
        except KeyboardInterrupt:
            action.stop()
            handle.wait(2.0)
        rec = handle.result
    if rec is None:
        print("error: fewer than two samples recorded", file=sys.stderr)
        return 1
    script = reduce_to_script(rec, args.tolerance, name=os.path.splitext(
        os.path.basename(args.out))[0])
    save_pos(script, args.out)
    print(f"{len(rec.timestamps)} samples -> {len(script.keyframes)} keyframes in {args.out}")
    return 0


def cmd_walk(args) -> int:
    from oan.orchestrator import load_config
    from oan.walk import GaitParams, WalkAction, WalkCommand

    params = load_config(args.config).walk if args.config else GaitParams()
    cmd = WalkCommand(args.vx, args.vy, args.omega)
    with _robot(args) as robot:
        action = WalkAction(cmd.clamped(params), params, duration=args.duration)
        handle = robot.start(action)
        _wait(handle, args.duration + 5.0)
        s = action.state
        print(f"walked {args.duration:.1f} s; support {s.support.phase.name}, "
              f"{robot.loop.stats().mean_rate_hz:.1f} Hz")
    return 0


def cmd_led(args) -> int:
    from oan.led import GROUP_ALIASES, LedRegistry, parse_animation

    groups = []
    for name in args.group.split("+"):
        try:
            groups.extend(GROUP_ALIASES[name.lower()])
        except KeyError:
            print(f"error: unknown LED group {name!r}", file=sys.stderr)
            return 2
    anim = parse_animation(args.animation)
    with _robot(args) as robot:
        registry = LedRegistry(robot)
        for g in groups:
            registry.attach(g, anim)
        try:
            time.sleep(args.duration)
        except KeyboardInterrupt:
            pass
        print(json.dumps(registry.shown()))
        registry.detach_all()
        time.sleep(0.05)
    return 0


def cmd_track(args) -> int:
    from oan.perception import (BlobDetector, CameraModel, DetectionRunner, FileFrameSource,
                                HeadTrackAction, LocationBoard, RemoteDetector,
                                SyntheticFrameSource, TargetPolicy, TickSource,
                                WorldTargetDetector)
    from oan.robot_model import JointId

    with _robot(args) as robot:
        def head():
            p = robot.sensor.joint_positions
            return float(p[JointId.HeadYaw]), float(p[JointId.HeadPitch])

        clock = lambda: robot.time  # noqa: E731
        cam = CameraModel()
        yaw, pitch = args.target
        src = args.source
        if src == "stub":
            source = TickSource(args.fps, clock)
            detector = WorldTargetDetector(yaw, pitch, cam, label=args.label or "face", head=head)
        elif src == "synthetic":
            source = SyntheticFrameSource(yaw, pitch, head, cam, clock=clock, fps=args.fps)
            detector = BlobDetector(label=args.label or "blob")
        elif src.startswith("file:"):
            source = FileFrameSource(src[5:], args.fps)
            detector = BlobDetector(label=args.label or "blob")
        elif src.startswith("http:") or src.startswith("https:"):
            url = src[5:] if src.startswith("http:http") else src
            source = SyntheticFrameSource(yaw, pitch, head, cam, clock=clock, fps=args.fps)
            detector = RemoteDetector(url)
        else:
            print(f"error: unknown source {src!r}", file=sys.stderr)
            return 2
        board = LocationBoard()
        runner = DetectionRunner(source, detector, board, TargetPolicy(args.label), args.fps, clock)
        action = HeadTrackAction(board, cam, duration=args.duration)
        handle = robot.start(action)
        runner.start()
        end = time.monotonic() + args.duration
        while time.monotonic() < end and not handle.done:
            time.sleep(min(1.0, max(0.0, end - time.monotonic())))
            det, _ = board.latest()
            where = f"cx={det.cx:.3f} cy={det.cy:.3f}" if det else "no target"
            print(f"t={robot.time:6.2f} head=({action.head[0]:+.3f}, {action.head[1]:+.3f}) "
                  f"{where}", flush=True)
        runner.stop()
        handle.cancel()
        handle.wait(2.0)
    return 0


def cmd_mock_services(args) -> int:
    from oan.dialogue import MockServices

    server = MockServices(args.host, args.port)
    print(f"mock services on {server.base_url}", flush=True)
    signal.signal(signal.SIGTERM, lambda *_: threading.Thread(target=server.stop).start())
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    return 0


def _audio_source(spec: str | None, realtime: bool):
    from oan.dialogue import ToneSource, WavFileSource

    if spec is None or spec == "synthetic":
        return ToneSource(realtime=realtime)
    if spec.startswith("file:"):
        return WavFileSource(spec[5:], realtime=realtime)
    if spec.startswith("tone:"):
        tones = [(float(f), 1.0) for f in spec[5:].split(",") if f]
        return ToneSource(tones, realtime=realtime)
    raise ValueError(f"unknown audio source {spec!r}; use file:PATH, tone:HZ[,HZ] or synthetic")


def cmd_chat(args) -> int:
    from oan.dialogue import Services, ServiceConfig, WavFileSink
    from oan.orchestrator import ChatSession, load_config

    config = load_config(args.config)
    if args.services:
        config.services = ServiceConfig.from_mapping({
            "base_url": args.services, "timeout": config.services.timeout,
            "headers": config.services.headers})
    if args.seed is not None:
        config.gestures.reseed(args.seed)
    source = _audio_source(args.audio, realtime=not args.fast)
    sink = WavFileSink(args.audio_out)
    with _robot(args) as robot:
        session = ChatSession(robot, config, Services.from_config(config.services), source,
                              sink, args.log, realtime_playback=not args.fast)
        session.start()
        try:
            while not session.wait(0.2):
                pass
        except KeyboardInterrupt:
            session.stop()
        conflicts = robot.arbiter.conflicts()
    sink.close()
    for event in session.log.of("state"):
        print(f"{event['t']:8.3f}  {event['state']}")
    print(f"session ended: {session.end_reason}; ownership conflicts: {len(conflicts)}")
    return 0 if not conflicts else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oan", description="Humanoid control stack tools.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sim", help="run the simulated robot")
    p.add_argument("--endpoint")
    p.add_argument("--scenario", help="scenario script for scripted sensor events")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", action="store_true", help="enable default sensor noise")
    p.add_argument("--duration", type=float, help="exit after this many seconds")
    p.set_defaults(func=cmd_sim)

    p = sub.add_parser("play", help="play a .pos keyframe script")
    p.add_argument("file")
    p.add_argument("--mask", help="joints or groups (head, arms, legs, larm, ...), comma separated")
    p.add_argument("--stiffness", type=float, default=1.0)
    _add_endpoint(p)
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("record", help="record a kinesthetic demonstration to a .pos file")
    p.add_argument("--mask", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--duration", type=float, default=10.0)
    p.add_argument("--period", type=float, default=1 / 83.0, help="sample period in seconds")
    p.add_argument("--tolerance", type=float, default=0.01, help="reduction tolerance in rad")
    p.add_argument("--stiffness", type=float, default=0.0, help="stiffness while recording")
    p.add_argument("--scenario", help="scenario for --with-sim")
    _add_endpoint(p)
    p.set_defaults(func=cmd_record)

    p = sub.add_parser("walk", help="walk with a constant velocity command")
    p.add_argument("--vx", type=float, default=0.0)
    p.add_argument("--vy", type=float, default=0.0)
    p.add_argument("--omega", type=float, default=0.0)
    p.add_argument("--duration", type=float, default=5.0)
    p.add_argument("--config", help="behavior config whose [walk] section sets gait parameters")
    _add_endpoint(p)
    p.set_defaults(func=cmd_walk)

    p = sub.add_parser("led", help="show an LED animation, e.g. oan led eyes 'blink(red, 1s)'")
    p.add_argument("group", help="LED group or alias (eyes, ears, feet, chest, skull, all)")
    p.add_argument("animation")
    p.add_argument("--duration", type=float, default=3.0)
    _add_endpoint(p)
    p.set_defaults(func=cmd_led)

    p = sub.add_parser("track", help="track a target with the head")
    p.add_argument("--label")
    p.add_argument("--source", default="stub",
                   help="stub | synthetic | file:DIR | http:URL (remote detector)")
    p.add_argument("--target", type=float, nargs=2, default=(0.3, 0.15),
                   metavar=("YAW", "PITCH"), help="world target for stub/synthetic sources")
    p.add_argument("--fps", type=float, default=15.0)
    p.add_argument("--duration", type=float, default=5.0)
    _add_endpoint(p)
    p.set_defaults(func=cmd_track)

    p = sub.add_parser("mock-services", help="serve deterministic STT/TTS/chat/detect mocks")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.set_defaults(func=cmd_mock_services)

    p = sub.add_parser("chat", help="run the conversation behavior")
    p.add_argument("--config", help="behavior config (TOML); default is the bundled example")
    p.add_argument("--audio", help="file:IN.wav | tone:HZ[,HZ...] | synthetic")
    p.add_argument("--audio-out", help="write everything spoken to this WAV file")
    p.add_argument("--log", help="JSON-lines event log path")
    p.add_argument("--services", help="base URL of the speech/chat services")
    p.add_argument("--seed", type=int, help="override the gesture seed")
    p.add_argument("--fast", action="store_true",
                   help="consume audio as fast as possible instead of in real time")
    _add_endpoint(p)
    p.set_defaults(func=cmd_chat)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError, TimeoutError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
