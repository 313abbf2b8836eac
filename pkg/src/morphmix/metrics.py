"""Morphing evaluation metrics over embeddings and latent frame matrices.

Covers the five clip metrics (latent compressibility, correspondence,
intermediateness, directionality, Fréchet distance) plus the rank statistics
used to validate the compressibility score, and a deterministic mock
embedder that stands in for neural encoders in tests and offline runs.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BothNonpositive,
    ConstantInput,
    DegenerateMatrix,
    DimMismatch,
    EmptyInput,
    LengthMismatch,
    NonSymmetric,
    SingleClass,
    TooFewFrames,
    TooFewSamples,
    TooShort,
    ZeroVector,
)

SIM_FLOOR = 1e-6  # clamp floor applied to similarities before ratio formulas


@dataclass(frozen=True)
class Embedding:
    values: np.ndarray
    clip_id: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64).ravel()
        if v.size < 1 or not np.all(np.isfinite(v)):
            raise ValueError("embedding must be a non-empty finite vector")
        object.__setattr__(self, "values", v)

    @property
    def dim(self):
        return len(self.values)


@dataclass(frozen=True)
class LatentMatrix:
    """T frames by D latent dimensions."""

    data: np.ndarray
    clip_id: str = ""

    def __post_init__(self):
        m = np.asarray(self.data, dtype=np.float64)
        if m.ndim != 2 or not np.all(np.isfinite(m)):
            raise ValueError("latent matrix must be a finite 2-D array")
        object.__setattr__(self, "data", m)


@dataclass(frozen=True)
class GaussianStats:
    """Mean and covariance summarizing a set of embeddings."""

    mean: np.ndarray
    covariance: np.ndarray
    count: int = 2

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64).ravel()
        cov = np.asarray(self.covariance, dtype=np.float64)
        if cov.shape != (len(mean), len(mean)):
            raise DimMismatch(f"covariance shape {cov.shape} does not match dim {len(mean)}")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)

    @property
    def dim(self):
        return len(self.mean)


@dataclass(frozen=True)
class DirectionalityParams:
    temperature: float = 0.05

    def __post_init__(self):
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")


def cosine_sim(a, b):
    """Cosine similarity between two embeddings."""
    if a.dim != b.dim:
        raise DimMismatch(f"dims differ: {a.dim} vs {b.dim}")
    na = np.linalg.norm(a.values)
    nb = np.linalg.norm(b.values)
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("cosine similarity undefined for a zero vector")
    return float(np.dot(a.values, b.values) / (na * nb))


def _clamp_sim(s):
    return min(max(float(s), SIM_FLOOR), 1.0)


def correspondence(sim_x, sim_y):
    """Harmonic mean of the two concept similarities (clamped positive)."""
    a = _clamp_sim(sim_x)
    b = _clamp_sim(sim_y)
    return 2.0 * a * b / (a + b)


def intermediateness(sim_x, sim_y):
    """Balance between concepts: 1 - |simX - simY| / max(simX, simY)."""
    a = _clamp_sim(sim_x)
    b = _clamp_sim(sim_y)
    m = max(a, b)
    if m <= SIM_FLOOR:
        raise BothNonpositive("both similarities at the clamp floor")
    return 1.0 - abs(a - b) / m


def directionality(s_int, s_rev, params=DirectionalityParams()):
    """Softmax preference for the intended prompt, mapped to [-1, 1].

    2*sigmoid(d/T) - 1 == tanh(d/(2T)), which is the numerically stable form.
    """
    return float(math.tanh((s_int - s_rev) / (2.0 * params.temperature)))


def lcs(latents, standardize=False):
    """Latent compressibility: variance fraction of the first two PCs.

    With standardize=True each dimension is scaled to unit variance before
    the eigendecomposition (correlation- instead of covariance-based PCA);
    the default centers only.
    """
    m = latents.data
    t, d = m.shape
    if t < 3:
        raise TooFewFrames(f"need at least 3 frames, got {t}")
    if d < 3:
        raise TooFewFrames(f"need at least 3 latent dimensions, got {d}")
    centered = m - m.mean(axis=0)
    if standardize:
        std = centered.std(axis=0, ddof=1)
        centered = centered / np.where(std > 0, std, 1.0)
    cov = centered.T @ centered / (t - 1)
    eig = np.linalg.eigvalsh(cov)
    total = float(eig.sum())
    if total <= 0.0:
        raise DegenerateMatrix("all latent dimensions are constant")
    return float((eig[-1] + eig[-2]) / total)


def gaussian_stats(embeddings):
    """Sample mean and covariance (divisor count-1) of a set of embeddings."""
    if len(embeddings) < 2:
        raise TooFewSamples(f"need at least 2 embeddings, got {len(embeddings)}")
    dims = {e.dim for e in embeddings}
    if len(dims) > 1:
        raise DimMismatch(f"mixed embedding dims: {sorted(dims)}")
    x = np.stack([e.values for e in embeddings])
    mean = x.mean(axis=0)
    centered = x - mean
    cov = centered.T @ centered / (len(embeddings) - 1)
    cov = 0.5 * (cov + cov.T)
    return GaussianStats(mean, cov, count=len(embeddings))


def _psd_sqrt(mat):
    """Square root of a symmetric PSD matrix via eigendecomposition.

    Eigenvalues slightly negative from roundoff are clipped; materially
    negative ones mean the input was not PSD.
    """
    vals, vecs = np.linalg.eigh(mat)
    vmax = float(vals.max()) if len(vals) else 0.0
    tol = 1e-10 * max(vmax, 1e-300)
    if vals.min() < -tol:
        raise NonSymmetric(f"matrix not PSD: eigenvalue {vals.min():g}")
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.T


def frechet_distance(a, b):
    """Fréchet distance between two Gaussians (the FAD formula)."""
    if a.dim != b.dim:
        raise DimMismatch(f"dims differ: {a.dim} vs {b.dim}")
    for s in (a, b):
        if not np.allclose(s.covariance, s.covariance.T, atol=1e-9):
            raise NonSymmetric("covariance not symmetric within 1e-9")
    sa = 0.5 * (a.covariance + a.covariance.T)
    sb = 0.5 * (b.covariance + b.covariance.T)
    root_a = _psd_sqrt(sa)
    cross = _psd_sqrt(root_a @ sb @ root_a)
    diff = a.mean - b.mean
    d2 = float(diff @ diff + np.trace(sa) + np.trace(sb) - 2.0 * np.trace(cross))
    return max(d2, 0.0)


def _ranks(x):
    """Average-tie ranks, 1-based."""
    x = np.asarray(x, dtype=np.float64)
    order = np.argsort(x, kind="stable")
    ranks = np.empty(len(x))
    i = 0
    while i < len(x):
        j = i
        while j + 1 < len(x) and x[order[j + 1]] == x[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman_rho(x, y):
    """Spearman rank correlation: Pearson correlation of average-tie ranks."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise LengthMismatch(f"lengths differ: {len(x)} vs {len(y)}")
    if len(x) < 3:
        raise LengthMismatch("need at least 3 points")
    rx = _ranks(x)
    ry = _ranks(y)
    sx = rx.std()
    sy = ry.std()
    if sx == 0.0 or sy == 0.0:
        raise ConstantInput("rank correlation undefined for constant input")
    return float(np.mean((rx - rx.mean()) * (ry - ry.mean())) / (sx * sy))


def roc_auc(scores, labels):
    """Mann-Whitney AUC: P(score_pos > score_neg) + 0.5*P(equal)."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=bool)
    if scores.shape != labels.shape:
        raise LengthMismatch(f"lengths differ: {len(scores)} vs {len(labels)}")
    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClass("both classes must be present")
    ranks = _ranks(scores)
    u = ranks[labels].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


# --- deterministic mock embedder ---

def _mel_filterbank(n_bands, n_bins, sample_rate):
    """Triangular mel filters over rfft bins, rows normalized to unit sum."""
    def hz_to_mel(f):
        return 2595.0 * np.log10(1.0 + f / 700.0)

    def mel_to_hz(m):
        return 700.0 * (10.0 ** (m / 2595.0) - 1.0)

    nyquist = sample_rate / 2.0
    mel_pts = np.linspace(hz_to_mel(0.0), hz_to_mel(nyquist), n_bands + 2)
    hz_pts = mel_to_hz(mel_pts)
    bin_freqs = np.linspace(0.0, nyquist, n_bins)
    fb = np.zeros((n_bands, n_bins))
    for i in range(n_bands):
        lo, mid, hi = hz_pts[i], hz_pts[i + 1], hz_pts[i + 2]
        rise = (bin_freqs - lo) / max(mid - lo, 1e-12)
        fall = (hi - bin_freqs) / max(hi - mid, 1e-12)
        fb[i] = np.clip(np.minimum(rise, fall), 0.0, None)
        s = fb[i].sum()
        if s > 0:
            fb[i] /= s
    return fb


_LOG_FLOOR = 1e-10


def _logmel_frames(w, n_bands, frame, hop):
    from .audio_io import to_mono

    x = to_mono(w).data[0].astype(np.float64)
    n_frames = max((len(x) - frame) // hop + 1, 0)
    if n_frames < 1:
        return np.empty((0, n_bands))
    fb = _mel_filterbank(n_bands, frame // 2 + 1, w.sample_rate)
    win = np.hanning(frame)
    out = np.empty((n_frames, n_bands))
    for k in range(n_frames):
        seg = x[k * hop:k * hop + frame] * win
        power = np.abs(np.fft.rfft(seg)) ** 2
        out[k] = np.log(fb @ power + _LOG_FLOOR)
    return out


def mock_embed(w, dim=64, frame=2048, hop=512):
    """Deterministic embedding from log-mel band statistics.

    Not a perceptual model; a reproducible stand-in for neural encoders so
    the metric pipeline can run end to end without external weights.
    """
    if w.n_samples < 1:
        raise EmptyInput("cannot embed an empty waveform")
    frame = min(frame, max(w.n_samples, 16))
    hop = min(hop, frame)
    n_bands = max(dim // 2, 4)
    frames = _logmel_frames(w, n_bands, frame, hop)
    if frames.shape[0] == 0:
        frames = _logmel_frames(w, n_bands, max(w.n_samples // 2, 8), max(w.n_samples // 4, 4))
    if frames.shape[0] == 0:
        frames = np.zeros((1, n_bands))
    feats = np.concatenate([frames.mean(axis=0), frames.std(axis=0)])
    feats = feats - feats.mean()
    norm = np.linalg.norm(feats)
    if norm > 0:
        feats = feats / norm
    else:
        feats = np.full_like(feats, 1.0 / math.sqrt(len(feats)))
    reps = math.ceil(dim / len(feats))
    return Embedding(np.tile(feats, reps)[:dim], clip_id=getattr(w, "clip_id", ""))


def mock_latents(w, dim=32, frame=2048, hop=512):
    """Deterministic per-frame log-mel latent matrix (stand-in for codec latents)."""
    if w.n_samples < frame + 2 * hop:
        raise TooShort(
            f"need at least {frame + 2 * hop} samples for 3 frames, got {w.n_samples}"
        )
    frames = _logmel_frames(w, dim, frame, hop)
    if frames.shape[0] < 3:
        raise TooShort(f"only {frames.shape[0]} frames available, need 3")
    return LatentMatrix(frames)
