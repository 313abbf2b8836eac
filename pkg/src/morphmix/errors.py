"""Exception hierarchy shared across the package."""


class MorphmixError(Exception):
    """Base class for all morphmix errors."""


# --- audio I/O ---

class MalformedHeader(MorphmixError):
    """File is not a RIFF/WAVE container."""


class UnsupportedEncoding(MorphmixError):
    """WAV encoding outside PCM 16/24-bit or IEEE-float 32-bit, or >2 channels."""


class TruncatedData(MorphmixError):
    """Data chunk shorter than its declared size."""


class IoFailure(MorphmixError):
    """Underlying file write failed."""


class InvalidWaveform(MorphmixError):
    """Waveform invariant violated (e.g. unequal channel lengths)."""


# --- DSP ---

class EmptyInput(MorphmixError):
    """Operation requires a non-empty input."""


class SilentPrimary(MorphmixError):
    """Primary RMS below the epsilon floor; equal-power scaling undefined."""


class SilentSecondary(MorphmixError):
    """Secondary RMS below the epsilon floor; equal-power scaling undefined."""


class LengthMismatch(MorphmixError):
    """Sequences expected to have equal length differ."""


class SizeMismatch(MorphmixError):
    """EQ curve FFT size does not match the signal length."""


class SampleRateMismatch(MorphmixError):
    """Waveforms with different sample rates cannot be combined."""


# --- dataset builder ---

class InvalidDistribution(MorphmixError):
    """Mode probabilities invalid (negative or not summing to 1)."""


class EmptyLabel(MorphmixError):
    """Caption labels must be non-empty."""


# --- metrics ---

class ZeroVector(MorphmixError):
    """Cosine similarity undefined for a zero vector."""


class DimMismatch(MorphmixError):
    """Embedding dimensions differ."""


class BothNonpositive(MorphmixError):
    """Both similarities at or below the clamp floor; comparison meaningless."""


class DegenerateMatrix(MorphmixError):
    """Latent matrix has zero total variance."""


class TooFewFrames(MorphmixError):
    """Latent matrix too small for PCA (needs T >= 3, D >= 3)."""


class TooFewSamples(MorphmixError):
    """Gaussian statistics need at least two embeddings."""


class NonSymmetric(MorphmixError):
    """Covariance not symmetric PSD within tolerance."""


class ConstantInput(MorphmixError):
    """Rank correlation undefined for a constant sequence."""


class SingleClass(MorphmixError):
    """ROC-AUC needs both positive and negative labels."""


class TooShort(MorphmixError):
    """Signal too short to produce the minimum number of frames."""


# --- store / evaluator ---

class BadFormat(MorphmixError):
    """MXEB file malformed."""


class BadTemplate(MorphmixError):
    """Prompt template missing a required slot."""


class MissingEmbedding(MorphmixError):
    """Embedding store has no entry for a requested id."""
