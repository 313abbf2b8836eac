"""RIFF/WAVE reading and writing with uniform float32 samples.

Supports PCM 16-bit, PCM 24-bit and IEEE-float 32-bit, mono or stereo.
Integer PCM is scaled by 2^(bits-1) so integer files round-trip exactly.
"""

import struct
from dataclasses import dataclass

import numpy as np

from .errors import (
    InvalidWaveform,
    IoFailure,
    MalformedHeader,
    TruncatedData,
    UnsupportedEncoding,
)

_FMT_PCM = 1
_FMT_IEEE_FLOAT = 3


@dataclass(frozen=True)
class Waveform:
    """Decoded audio: (channels, samples) float32 array plus sample rate."""

    data: np.ndarray  # shape (n_channels, n_samples), float32
    sample_rate: int

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float32)
        if data.ndim == 1:
            data = data[np.newaxis, :]
        if data.ndim != 2:
            raise InvalidWaveform(f"expected 1-D or 2-D sample array, got ndim={data.ndim}")
        data = np.ascontiguousarray(data)
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        if self.sample_rate <= 0:
            raise InvalidWaveform(f"sample_rate must be positive, got {self.sample_rate}")

    @property
    def n_channels(self):
        return self.data.shape[0]

    @property
    def n_samples(self):
        return self.data.shape[1]


def _read_chunks(blob):
    """Yield (chunk_id, payload) from the body of a RIFF file."""
    pos = 0
    while pos + 8 <= len(blob):
        cid = blob[pos:pos + 4]
        (size,) = struct.unpack_from("<I", blob, pos + 4)
        payload = blob[pos + 8:pos + 8 + size]
        yield cid, size, payload
        pos += 8 + size + (size & 1)  # chunks are word-aligned


def load_wav(path):
    """Decode a WAV file into a Waveform.

    Raises MalformedHeader, UnsupportedEncoding or TruncatedData on bad input.
    """
    with open(path, "rb") as f:
        raw = f.read()

    if len(raw) < 12 or raw[:4] != b"RIFF" or raw[8:12] != b"WAVE":
        raise MalformedHeader(f"{path}: not a RIFF/WAVE file")

    fmt = None
    data = None
    for cid, size, payload in _read_chunks(raw[12:]):
        if cid == b"fmt " and fmt is None:
            if len(payload) < 16:
                raise MalformedHeader(f"{path}: fmt chunk too short")
            fmt = struct.unpack_from("<HHIIHH", payload, 0)
        elif cid == b"data" and data is None:
            if len(payload) < size:
                raise TruncatedData(
                    f"{path}: data chunk declares {size} bytes, {len(payload)} present"
                )
            data = payload

    if fmt is None or data is None:
        raise MalformedHeader(f"{path}: missing fmt or data chunk")

    audio_format, n_channels, sample_rate, _, block_align, bits = fmt
    if audio_format not in (_FMT_PCM, _FMT_IEEE_FLOAT):
        raise UnsupportedEncoding(f"{path}: format tag {audio_format} not supported")
    if n_channels not in (1, 2):
        raise UnsupportedEncoding(f"{path}: {n_channels} channels not supported")

    if audio_format == _FMT_IEEE_FLOAT:
        if bits != 32:
            raise UnsupportedEncoding(f"{path}: {bits}-bit float not supported")
        samples = np.frombuffer(data[:len(data) - len(data) % 4], dtype="<f4").astype(np.float32)
    elif bits == 16:
        samples = np.frombuffer(data[:len(data) - len(data) % 2], dtype="<i2")
        samples = samples.astype(np.float32) / 32768.0
    elif bits == 24:
        b = np.frombuffer(data[:len(data) - len(data) % 3], dtype=np.uint8).reshape(-1, 3)
        ints = (
            b[:, 0].astype(np.int32)
            | (b[:, 1].astype(np.int32) << 8)
            | (b[:, 2].astype(np.int32) << 16)
        )
        ints = np.where(ints >= 1 << 23, ints - (1 << 24), ints)
        samples = ints.astype(np.float32) / float(1 << 23)
    else:
        raise UnsupportedEncoding(f"{path}: {bits}-bit PCM not supported")

    n_frames = len(samples) // n_channels
    frames = samples[:n_frames * n_channels].reshape(n_frames, n_channels)
    return Waveform(frames.T.copy(), sample_rate)


def _quantize(x, bits):
    """Clamp to [-1, 1] and round half away from zero to a signed int."""
    scale = float(1 << (bits - 1))
    x = np.clip(x.astype(np.float64), -1.0, 1.0) * scale
    q = np.where(x >= 0, np.floor(x + 0.5), np.ceil(x - 0.5))
    return np.clip(q, -scale, scale - 1).astype(np.int64)


def save_wav(w, path, bit_depth=32):
    """Write a Waveform as WAV. bit_depth 16 or 24 is integer PCM, 32 is IEEE float."""
    if bit_depth not in (16, 24, 32):
        raise ValueError(f"bit_depth must be 16, 24 or 32, got {bit_depth}")
    if w.n_samples < 1:
        raise InvalidWaveform("cannot save an empty waveform")

    frames = w.data.T  # (n_samples, n_channels)
    if bit_depth == 32:
        payload = frames.astype("<f4").tobytes()
        fmt_tag, bits = _FMT_IEEE_FLOAT, 32
    elif bit_depth == 16:
        payload = _quantize(frames, 16).astype("<i2").tobytes()
        fmt_tag, bits = _FMT_PCM, 16
    else:
        q = _quantize(frames, 24).ravel()
        b = np.empty((len(q), 3), dtype=np.uint8)
        u = q.astype(np.int64) & 0xFFFFFF
        b[:, 0] = u & 0xFF
        b[:, 1] = (u >> 8) & 0xFF
        b[:, 2] = (u >> 16) & 0xFF
        payload = b.tobytes()
        fmt_tag, bits = _FMT_PCM, 24

    n_channels = w.n_channels
    block_align = n_channels * bits // 8
    byte_rate = w.sample_rate * block_align
    fmt_chunk = struct.pack(
        "<HHIIHH", fmt_tag, n_channels, w.sample_rate, byte_rate, block_align, bits
    )
    body = (
        b"WAVE"
        + b"fmt " + struct.pack("<I", len(fmt_chunk)) + fmt_chunk
        + b"data" + struct.pack("<I", len(payload)) + payload
        + (b"\x00" if len(payload) & 1 else b"")
    )
    try:
        with open(path, "wb") as f:
            f.write(b"RIFF" + struct.pack("<I", len(body)) + body)
    except OSError as e:
        raise IoFailure(f"{path}: {e}") from e


def to_mono(w):
    """Average stereo channels to one; mono is returned unchanged."""
    if w.n_channels == 1:
        return w
    return Waveform(w.data.mean(axis=0, dtype=np.float64).astype(np.float32), w.sample_rate)
