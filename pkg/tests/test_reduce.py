import numpy as np
import pytest
from hypothesis import given, strategies as st

from oan.motion import Recording, reduce_to_script, sample_many
from oan.robot_model import JointId

MASK = (JointId.HeadYaw, JointId.HeadPitch)


def _recording(samples, period=1 / 83):
    samples = np.asarray(samples, dtype=float)
    ts = np.arange(len(samples)) * period + 0.5
    return Recording(MASK[: samples.shape[1]], period, ts, samples)


def _reconstruction_error(rec, script):
    ts = np.array([rec.script_time(t) for t in rec.timestamps])
    recon = sample_many(script, rec.samples[0], ts)
    return float(np.max(np.abs(recon - rec.samples)))


@pytest.mark.parametrize("n", [2, 3, 17, 400])
def test_linear_ramp_gives_two_keyframes(n):
    ramp = np.linspace(0, 1, n)
    rec = _recording(np.column_stack([ramp, -0.5 * ramp]))
    assert len(reduce_to_script(rec, 1e-6).keyframes) == 2


def test_huge_tolerance_keeps_endpoints():
    rng = np.random.default_rng(0)
    rec = _recording(rng.uniform(-0.5, 0.5, size=(50, 2)))
    script = reduce_to_script(rec, 1e9)
    assert len(script.keyframes) == 2
    assert script.keyframes[-1].targets == tuple(rec.samples[-1])


@given(st.integers(0, 2**32 - 1), st.floats(1e-3, 0.2))
def test_tolerance_guarantee(seed, tol):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 300))
    t = np.arange(n) / 83
    freq = rng.uniform(0.1, 2.0, 2)
    smooth = np.column_stack([0.5 * np.sin(2 * np.pi * freq[0] * t),
                              0.3 * np.cos(2 * np.pi * freq[1] * t) - 0.2])
    rec = _recording(smooth)
    script = reduce_to_script(rec, tol)
    assert len(script.keyframes) <= n
    assert _reconstruction_error(rec, script) <= tol + 1e-12


@given(st.integers(0, 2**32 - 1))
def test_noisy_trajectories_respect_tolerance(seed):
    rng = np.random.default_rng(seed)
    walk = np.cumsum(rng.normal(0, 0.01, size=(120, 2)), axis=0)
    rec = _recording(np.clip(walk, -0.6, 0.5))
    script = reduce_to_script(rec, 0.005)
    assert _reconstruction_error(rec, script) <= 0.005 + 1e-12


def test_recording_invariants():
    with pytest.raises(ValueError):
        Recording(MASK, 0.01, [0.0], [[0.0, 0.0]])
    with pytest.raises(ValueError):
        Recording(MASK, 0.01, [0.0, 0.0], [[0.0, 0.0], [1.0, 1.0]])
    with pytest.raises(ValueError):
        reduce_to_script(_recording([[0.0], [1.0]]), 0.0)
