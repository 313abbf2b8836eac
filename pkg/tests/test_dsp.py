import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morphmix import dsp, errors
from morphmix.audio_io import Waveform
from morphmix.dsp import (
    AugmentParams,
    AugmentationMode,
    apply_eq,
    apply_rms_envelope,
    augment_pair,
    eq_curve,
    equal_power_mix,
    full_rms,
    loop_or_truncate,
    rms_envelope,
    spectral_interpolate,
    spectral_target,
)

from conftest import make_wave, random_wave


# --- loop_or_truncate ---

def test_loop_identity():
    w = make_wave([1.0, 2.0, 3.0])
    assert loop_or_truncate(w, 3) is w


def test_loop_tiling():
    w = make_wave([1.0, 2.0, 3.0])
    assert list(loop_or_truncate(w, 7).data[0]) == [1, 2, 3, 1, 2, 3, 1]


def test_truncate_prefix_slice_oracle(rng):
    w = random_wave(rng, 48000)
    got = loop_or_truncate(w, 24000)
    assert np.array_equal(got.data, w.data[:, :24000])


def test_loop_empty_raises():
    with pytest.raises(errors.MorphmixError):
        loop_or_truncate(Waveform(np.zeros((1, 0), dtype=np.float32), 48000), 5)


@given(n=st.integers(1, 50), target=st.integers(1, 200))
@settings(max_examples=60, deadline=None)
def test_loop_length_property(n, target):
    w = make_wave(np.linspace(-0.5, 0.5, n))
    assert loop_or_truncate(w, target).n_samples == target


# --- equal_power_mix ---

def test_mix_identical_doubles():
    w = make_wave([0.1, -0.2, 0.3])
    assert np.allclose(equal_power_mix(w, w).data, 2 * w.data, atol=1e-7)


def test_mix_scale_ratio():
    p = make_wave(np.full(100, 0.5))
    s = make_wave(np.full(100, 0.1))
    mixed = equal_power_mix(p, s)
    # secondary scaled by 5.0 before summing
    assert np.allclose(mixed.data, 0.5 + 0.5, atol=1e-6)


def test_mix_rms_recomputation_oracle(rng):
    for _ in range(20):
        p = random_wave(rng, 2048, amp=rng.uniform(0.05, 0.8))
        s = random_wave(rng, 2048, amp=rng.uniform(0.05, 0.8))
        scaled = mixed = equal_power_mix(p, s)
        residual = mixed.data.astype(np.float64) - p.data
        rp = full_rms(p)
        assert np.sqrt(np.mean(residual ** 2)) == pytest.approx(rp, rel=1e-6)


def test_mix_silent_inputs():
    loud = make_wave(np.full(64, 0.5))
    quiet = make_wave(np.zeros(64))
    with pytest.raises(errors.SilentSecondary):
        equal_power_mix(loud, quiet)
    with pytest.raises(errors.SilentPrimary):
        equal_power_mix(quiet, loud)


# --- rms_envelope ---

def test_envelope_constant_signal():
    w = make_wave(np.full(4096, 0.4))
    env = rms_envelope(w, 1024, 256)
    inner = env.frame_rms[: (4096 - 1024) // 256]
    assert np.allclose(inner, 0.4, atol=1e-6)


def test_envelope_zero_signal():
    env = rms_envelope(make_wave(np.zeros(1000)), 256, 64)
    assert np.all(env.frame_rms == 0)


def test_envelope_frame_count():
    env = rms_envelope(make_wave(np.zeros(1000)), 256, 64)
    assert len(env.frame_rms) == int(np.ceil(1000 / 64))


def test_envelope_direct_window_oracle(rng):
    w = random_wave(rng, 1500)
    env = rms_envelope(w, 200, 70)
    padded = np.concatenate([w.data[0].astype(np.float64), np.zeros(200)])
    for k, val in enumerate(env.frame_rms):
        expect = np.sqrt(np.mean(padded[k * 70:k * 70 + 200] ** 2))
        assert val == pytest.approx(expect, rel=1e-9)


# --- apply_rms_envelope ---

def test_apply_own_envelope_is_identity(rng):
    w = random_wave(rng, 8000, amp=0.4)
    env = rms_envelope(w, 1024, 256)
    out = apply_rms_envelope(env, w)
    assert np.allclose(out.data, w.data, atol=1e-4)


def test_apply_zero_envelope(rng):
    w = random_wave(rng, 4000)
    env = rms_envelope(w, 1024, 256)
    zero = dsp.RmsEnvelope(np.zeros_like(env.frame_rms), 1024, 256, 4000)
    out = apply_rms_envelope(zero, w)
    assert np.max(np.abs(out.data)) < 1e-6


def test_apply_envelope_remeasurement_oracle(rng):
    # transferring another signal's envelope: re-measured RMS within 5%
    eps = 1e-8
    w = random_wave(rng, 48000, amp=0.3)
    other = Waveform(
        (random_wave(rng, 48000, amp=0.3).data
         * (0.5 + 0.4 * np.sin(np.linspace(0, 6, 48000)))).astype(np.float32),
        48000,
    )
    target = rms_envelope(other, 2048, 512)
    out = apply_rms_envelope(target, w, epsilon=eps)
    remeasured = rms_envelope(out, 2048, 512)
    mask = (target.frame_rms > 10 * eps) & (rms_envelope(w, 2048, 512).frame_rms > 10 * eps)
    rel = np.abs(remeasured.frame_rms[mask] - target.frame_rms[mask]) / target.frame_rms[mask]
    assert np.max(rel) < 0.05


@pytest.mark.parametrize("tail", [1, 2, 7, 100, 511, 512])
def test_apply_envelope_tracks_for_any_tail_size(rng, tail):
    # lengths that leave very few real samples in the last frame are the
    # hard case: that frame's gain is a noisy small-sample estimate
    eps = 1e-8
    n = 20 * 512 + tail
    w = random_wave(rng, n, amp=0.3)
    other = random_wave(rng, n, amp=0.2)
    target = rms_envelope(other, 2048, 512)
    out = apply_rms_envelope(target, w, epsilon=eps)
    remeasured = rms_envelope(out, 2048, 512)
    mask = (target.frame_rms > 10 * eps) & (rms_envelope(w, 2048, 512).frame_rms > 10 * eps)
    rel = np.abs(remeasured.frame_rms[mask] - target.frame_rms[mask]) / target.frame_rms[mask]
    assert np.max(rel) < 0.05


def test_apply_envelope_length_mismatch(rng):
    w = random_wave(rng, 100)
    env = rms_envelope(random_wave(rng, 200), 64, 16)
    with pytest.raises(errors.LengthMismatch):
        apply_rms_envelope(env, w)


# --- spectral ops ---

def test_spectral_target_basics():
    assert np.allclose(spectral_target([2, 0], [0, 4]), [1, 2])
    m = np.array([1.0, 2.0, 3.0])
    assert np.allclose(spectral_target(m, m), m)


def test_spectral_target_mean_oracle(rng):
    a = rng.uniform(0, 5, 100)
    b = rng.uniform(0, 5, 100)
    assert np.allclose(spectral_target(a, b), (a + b) / 2)


def test_eq_curve_identity_limit():
    m = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
    curve = eq_curve(m, m, smooth_window=1, epsilon=1e-15)
    assert np.allclose(curve.gains, 1.0, atol=1e-9)


def test_eq_curve_window_one_is_raw_ratio(rng):
    t = rng.uniform(0.1, 2, 33)
    s = rng.uniform(0.1, 2, 33)
    eps = 1e-8
    curve = eq_curve(t, s, smooth_window=1, epsilon=eps)
    assert np.allclose(curve.gains, t / (s + eps))


def test_eq_curve_smoothing_oracle():
    t = np.array([1.0, 4.0, 1.0, 1.0])
    s = np.ones(4)
    curve = eq_curve(t, s, smooth_window=3, epsilon=1e-15)
    assert np.allclose(curve.gains, [2.5, 2.0, 2.0, 1.0], atol=1e-9)


def test_eq_curve_gains_finite_nonnegative(rng):
    for _ in range(10):
        t = rng.uniform(0, 10, 64)
        s = rng.uniform(0, 10, 64)
        curve = eq_curve(t, s, smooth_window=5)
        assert np.all(np.isfinite(curve.gains))
        assert np.all(curve.gains >= 0)


def test_apply_eq_unit_curve_identity(rng):
    w = random_wave(rng, 4096, amp=0.9)
    curve = dsp.EqCurve(np.ones(4096 // 2 + 1), 4096)
    out = apply_eq(w, curve)
    assert np.max(np.abs(out.data - w.data)) < 1e-6


def test_apply_eq_zero_curve(rng):
    w = random_wave(rng, 1024)
    out = apply_eq(w, dsp.EqCurve(np.zeros(513), 1024))
    assert np.max(np.abs(out.data)) < 1e-6


def test_apply_eq_magnitude_remeasurement(rng):
    # with no smoothing the filtered magnitude must hit the target
    w1 = random_wave(rng, 8192, amp=0.4)
    w2 = random_wave(rng, 8192, amp=0.4)
    mag1 = np.abs(np.fft.rfft(w1.data[0].astype(np.float64)))
    mag2 = np.abs(np.fft.rfft(w2.data[0].astype(np.float64)))
    target = spectral_target(mag1, mag2)
    curve = eq_curve(target, mag1, smooth_window=1, epsilon=1e-10, fft_size=8192)
    out_mag = np.abs(np.fft.rfft(apply_eq(w1, curve).data[0].astype(np.float64)))
    mask = mag1 > 1e-6
    assert np.allclose(out_mag[mask], target[mask], rtol=1e-4)


def test_apply_eq_size_mismatch(rng):
    w = random_wave(rng, 100)
    with pytest.raises(errors.SizeMismatch):
        apply_eq(w, dsp.EqCurve(np.ones(65), 128))


def test_spectral_interpolate_identical_inputs(rng):
    w = random_wave(rng, 4096, amp=0.3)
    out = spectral_interpolate(w, w, AugmentParams(eq_smooth_window=1))
    assert np.max(np.abs(out.data - 2 * w.data)) < 1e-5


def test_spectral_interpolate_zero_second_input(rng):
    w = random_wave(rng, 2048, amp=0.3)
    z = make_wave(np.zeros(2048))
    out = spectral_interpolate(w, z, AugmentParams(eq_smooth_window=1))
    assert np.all(np.isfinite(out.data))
    # zero input contributes nothing; output is w filtered toward half magnitude
    assert full_rms(out) == pytest.approx(0.5 * full_rms(w), rel=0.01)


def test_spectral_interpolate_compositional_oracle(rng):
    params = AugmentParams(eq_smooth_window=7, epsilon=1e-8)
    w1 = random_wave(rng, 4096, amp=0.4)
    w2 = random_wave(rng, 4096, amp=0.4)
    got = spectral_interpolate(w1, w2, params)
    mag1 = np.abs(np.fft.rfft(w1.data[0].astype(np.float64)))
    mag2 = np.abs(np.fft.rfft(w2.data[0].astype(np.float64)))
    target = spectral_target(mag1, mag2)
    c1 = eq_curve(target, mag1, 7, 1e-8, fft_size=4096)
    c2 = eq_curve(target, mag2, 7, 1e-8, fft_size=4096)
    expect = apply_eq(w1, c1).data.astype(np.float64) + apply_eq(w2, c2).data.astype(np.float64)
    assert np.allclose(got.data, expect, atol=1e-6)


# --- augment_pair ---

def test_augment_none_doubles_and_normalizes(rng):
    w = random_wave(rng, 4096, amp=0.8)
    out = augment_pair(w, w, AugmentationMode.NONE)
    peak = np.max(np.abs(w.data))
    expect = 2 * w.data.astype(np.float64)
    if 2 * peak > 0.95:
        expect *= 0.95 / (2 * peak)
    assert np.allclose(out.data, expect, atol=1e-6)


def test_augment_rms_only_tracks_primary_envelope(rng):
    eps = 1e-8
    params = AugmentParams()
    primary = Waveform(
        (random_wave(rng, 48000, amp=0.25).data
         * (0.6 + 0.35 * np.sin(np.linspace(0, 9, 48000)))).astype(np.float32),
        48000,
    )
    secondary = random_wave(rng, 30000, amp=0.25)
    out = augment_pair(primary, secondary, AugmentationMode.RMS_ONLY, params)
    target = rms_envelope(primary, params.rms_frame_size, params.rms_hop)
    got = rms_envelope(out, params.rms_frame_size, params.rms_hop)
    mask = (target.frame_rms > 10 * eps) & (got.frame_rms > 10 * eps)
    rel = np.abs(got.frame_rms[mask] - target.frame_rms[mask]) / target.frame_rms[mask]
    assert np.max(rel) < 0.05


def test_augment_both_compositional_oracle(rng):
    params = AugmentParams(eq_smooth_window=11)
    primary = random_wave(rng, 16384, amp=0.25)
    secondary = random_wave(rng, 10000, amp=0.25)
    got = augment_pair(primary, secondary, AugmentationMode.BOTH, params)
    sec = loop_or_truncate(secondary, 16384)
    sec = dsp._match_power(primary, sec, params)
    comp = spectral_interpolate(primary, sec, params)
    env = rms_envelope(primary, params.rms_frame_size, params.rms_hop)
    expect = dsp.peak_normalize(apply_rms_envelope(env, comp, params.epsilon), params.output_peak)
    assert np.allclose(got.data, expect.data, atol=1e-7)


def test_augment_rejects_sample_rate_mismatch(rng):
    a = random_wave(rng, 1000, sr=48000)
    b = random_wave(rng, 1000, sr=44100)
    with pytest.raises(errors.SampleRateMismatch):
        augment_pair(a, b, AugmentationMode.NONE)


def test_augment_deterministic(rng):
    a = random_wave(rng, 8192, amp=0.3)
    b = random_wave(rng, 5000, amp=0.3)
    for mode in AugmentationMode:
        x = augment_pair(a, b, mode)
        y = augment_pair(a, b, mode)
        assert np.array_equal(x.data, y.data)


def test_augment_output_peak_bounded(rng):
    for _ in range(5):
        a = random_wave(rng, 4096, amp=0.9)
        b = random_wave(rng, 4096, amp=0.9)
        for mode in AugmentationMode:
            out = augment_pair(a, b, mode)
            assert np.max(np.abs(out.data)) <= 0.95 + 1e-6
