"""Surrogate-morph DSP: temporal (RMS anchoring) and spectral augmentation.

All operations are pure functions over immutable Waveforms. Multichannel
waveforms are processed jointly: scalar RMS values pool all channels, the
RMS envelope is measured across channels per frame, and spectral operations
run per channel with a shared target spectrum.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .audio_io import Waveform
from .errors import (
    EmptyInput,
    LengthMismatch,
    SampleRateMismatch,
    SilentPrimary,
    SilentSecondary,
    SizeMismatch,
)


class AugmentationMode(enum.Enum):
    RMS_ONLY = "rms"
    SPECTRAL_ONLY = "spectral"
    BOTH = "both"
    NONE = "none"


@dataclass(frozen=True)
class AugmentParams:
    """Tunables for the augmentation pipeline."""

    rms_frame_size: int = 2048
    rms_hop: int = 512
    eq_smooth_window: int = 101
    epsilon: float = 1e-8
    output_peak: float = 0.95

    def __post_init__(self):
        if not (1 <= self.rms_hop <= self.rms_frame_size):
            raise ValueError("need rms_frame_size >= rms_hop >= 1")
        if self.eq_smooth_window < 1 or self.eq_smooth_window % 2 == 0:
            raise ValueError("eq_smooth_window must be odd and >= 1")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if not (0 < self.output_peak <= 1):
            raise ValueError("output_peak must be in (0, 1]")


@dataclass(frozen=True)
class RmsEnvelope:
    """Framed RMS contour; frame k covers samples [k*hop, k*hop+frame_size)."""

    frame_rms: np.ndarray
    frame_size: int
    hop: int
    source_length: int

    def __post_init__(self):
        object.__setattr__(self, "frame_rms", np.asarray(self.frame_rms, dtype=np.float64))


@dataclass(frozen=True)
class EqCurve:
    """Per-bin gain mask for a length-fft_size real FFT (fft_size//2+1 bins)."""

    gains: np.ndarray
    fft_size: int

    def __post_init__(self):
        gains = np.asarray(self.gains, dtype=np.float64)
        object.__setattr__(self, "gains", gains)
        if len(gains) != self.fft_size // 2 + 1:
            raise ValueError(
                f"expected {self.fft_size // 2 + 1} gains for fft_size {self.fft_size}, "
                f"got {len(gains)}"
            )


def full_rms(w):
    """RMS over every sample of every channel."""
    return float(np.sqrt(np.mean(np.square(w.data, dtype=np.float64))))


def loop_or_truncate(w, target_len):
    """Force a waveform to target_len samples: slice if longer, tile if shorter."""
    if w.n_samples < 1:
        raise EmptyInput("cannot loop an empty waveform")
    if target_len < 1:
        raise ValueError("target_len must be >= 1")
    n = w.n_samples
    if n == target_len:
        return w
    if n > target_len:
        return Waveform(w.data[:, :target_len].copy(), w.sample_rate)
    reps = math.ceil(target_len / n)
    return Waveform(np.tile(w.data, (1, reps))[:, :target_len].copy(), w.sample_rate)


def equal_power_mix(primary, secondary, epsilon=1e-8):
    """Sum primary with secondary rescaled to the primary's full-clip RMS (0 dB SNR)."""
    _check_compatible(primary, secondary)
    rp = full_rms(primary)
    rs = full_rms(secondary)
    if rp < epsilon:
        raise SilentPrimary(f"primary RMS {rp:g} below epsilon {epsilon:g}")
    if rs < epsilon:
        raise SilentSecondary(f"secondary RMS {rs:g} below epsilon {epsilon:g}")
    mixed = primary.data.astype(np.float64) + (rp / rs) * secondary.data.astype(np.float64)
    return Waveform(mixed.astype(np.float32), primary.sample_rate)


def rms_envelope(w, frame_size=2048, hop=512):
    """Framed RMS of a waveform; windows past the end are zero-padded."""
    if w.n_samples < 1:
        raise EmptyInput("cannot measure the envelope of an empty waveform")
    n_frames = math.ceil(w.n_samples / hop)
    # pool channels: per-frame mean square averages over channels too
    if w.n_channels == 1:
        vals = kernels.frame_rms(w.data[0], frame_size, hop, n_frames)
    else:
        sq = np.sqrt(np.mean(np.square(w.data, dtype=np.float64), axis=0))
        # frame_rms squares its input, so feed the per-sample cross-channel RMS
        vals = kernels.frame_rms(sq, frame_size, hop, n_frames)
    return RmsEnvelope(vals, frame_size, hop, w.n_samples)


def apply_rms_envelope(target, w, epsilon=1e-8):
    """Rescale w frame-by-frame so its RMS envelope follows the target.

    Per-frame gains target/(self+epsilon) are linearly interpolated between
    frame centers to avoid stepwise gain jumps.
    """
    if target.source_length != w.n_samples:
        raise LengthMismatch(
            f"envelope measured over {target.source_length} samples, waveform has {w.n_samples}"
        )
    own = rms_envelope(w, target.frame_size, target.hop)
    gains = target.frame_rms / (own.frame_rms + epsilon)
    per_sample = kernels.interp_frame_gains(gains, target.frame_size, target.hop, w.n_samples)
    return Waveform((w.data.astype(np.float64) * per_sample).astype(np.float32), w.sample_rate)


def spectral_target(mag1, mag2):
    """Averaged magnitude spectrum: 0.5*mag1 + 0.5*mag2."""
    mag1 = np.asarray(mag1, dtype=np.float64)
    mag2 = np.asarray(mag2, dtype=np.float64)
    if mag1.shape != mag2.shape:
        raise LengthMismatch(f"magnitude shapes differ: {mag1.shape} vs {mag2.shape}")
    return 0.5 * mag1 + 0.5 * mag2


def eq_curve(target_mag, source_mag, smooth_window=101, epsilon=1e-8, fft_size=None):
    """Per-bin gain target/(source+epsilon), smoothed by a centered moving average.

    fft_size defaults to the even transform length 2*(n_bins-1); pass it
    explicitly for odd-length signals.
    """
    target_mag = np.asarray(target_mag, dtype=np.float64)
    source_mag = np.asarray(source_mag, dtype=np.float64)
    if target_mag.shape != source_mag.shape:
        raise LengthMismatch(f"magnitude shapes differ: {target_mag.shape} vs {source_mag.shape}")
    if smooth_window < 1 or smooth_window % 2 == 0:
        raise ValueError("smooth_window must be odd and >= 1")
    raw = target_mag / (source_mag + epsilon)
    smoothed = kernels.moving_average(raw, smooth_window)
    if fft_size is None:
        fft_size = 2 * (len(target_mag) - 1)
    return EqCurve(smoothed, fft_size=fft_size)


def apply_eq(w, curve):
    """Filter by multiplying each FFT bin's magnitude by its gain, phase untouched."""
    if curve.fft_size != w.n_samples:
        raise SizeMismatch(f"curve fft_size {curve.fft_size} != signal length {w.n_samples}")
    spec = np.fft.rfft(w.data.astype(np.float64), axis=1)
    out = np.fft.irfft(spec * curve.gains, n=w.n_samples, axis=1)
    return Waveform(out.astype(np.float32), w.sample_rate)


def _magnitudes(w):
    """Per-bin FFT magnitudes pooled over channels (mean of per-channel magnitudes)."""
    spec = np.abs(np.fft.rfft(w.data.astype(np.float64), axis=1))
    return spec.mean(axis=0)


def spectral_interpolate(w1, w2, params=AugmentParams()):
    """Filter both signals toward their averaged magnitude spectrum and sum."""
    _check_compatible(w1, w2)
    n = w1.n_samples
    mag1 = _magnitudes(w1)
    mag2 = _magnitudes(w2)
    target = spectral_target(mag1, mag2)
    c1 = eq_curve(target, mag1, params.eq_smooth_window, params.epsilon, fft_size=n)
    c2 = eq_curve(target, mag2, params.eq_smooth_window, params.epsilon, fft_size=n)
    out = apply_eq(w1, c1).data.astype(np.float64) + apply_eq(w2, c2).data.astype(np.float64)
    return Waveform(out.astype(np.float32), w1.sample_rate)


def peak_normalize(w, peak):
    """Scale down so the absolute peak does not exceed `peak`; never scales up."""
    m = float(np.max(np.abs(w.data))) if w.n_samples else 0.0
    if m <= peak or m == 0.0:
        return w
    return Waveform((w.data.astype(np.float64) * (peak / m)).astype(np.float32), w.sample_rate)


def augment_pair(primary, secondary, mode, params=AugmentParams()):
    """Render one surrogate morph from a (primary, secondary) pair.

    The secondary is first looped or truncated to the primary's length. The
    mode then selects the composition: a plain equal-power mix, RMS anchoring
    to the primary's envelope, spectral interpolation, or both (spectral
    first, then RMS anchoring so the output envelope tracks the primary).
    """
    if primary.sample_rate != secondary.sample_rate:
        raise SampleRateMismatch(
            f"{primary.sample_rate} Hz vs {secondary.sample_rate} Hz; resampling is not performed"
        )
    secondary = loop_or_truncate(secondary, primary.n_samples)

    if mode is AugmentationMode.NONE:
        out = equal_power_mix(primary, secondary, params.epsilon)
    elif mode is AugmentationMode.RMS_ONLY:
        mix = equal_power_mix(primary, secondary, params.epsilon)
        env = rms_envelope(primary, params.rms_frame_size, params.rms_hop)
        out = apply_rms_envelope(env, mix, params.epsilon)
    elif mode is AugmentationMode.SPECTRAL_ONLY:
        out = spectral_interpolate(primary, _match_power(primary, secondary, params), params)
    elif mode is AugmentationMode.BOTH:
        comp = spectral_interpolate(primary, _match_power(primary, secondary, params), params)
        env = rms_envelope(primary, params.rms_frame_size, params.rms_hop)
        out = apply_rms_envelope(env, comp, params.epsilon)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    return peak_normalize(out, params.output_peak)


def _match_power(primary, secondary, params):
    """Scale the secondary to the primary's full-clip RMS."""
    rp = full_rms(primary)
    rs = full_rms(secondary)
    if rp < params.epsilon:
        raise SilentPrimary(f"primary RMS {rp:g} below epsilon {params.epsilon:g}")
    if rs < params.epsilon:
        raise SilentSecondary(f"secondary RMS {rs:g} below epsilon {params.epsilon:g}")
    return Waveform(
        (secondary.data.astype(np.float64) * (rp / rs)).astype(np.float32),
        secondary.sample_rate,
    )


def _check_compatible(a, b):
    if a.n_samples != b.n_samples:
        raise LengthMismatch(f"lengths differ: {a.n_samples} vs {b.n_samples}")
    if a.sample_rate != b.sample_rate:
        raise SampleRateMismatch(f"{a.sample_rate} Hz vs {b.sample_rate} Hz")
