"""morphmix: surrogate-morph audio augmentation and morphing evaluation metrics."""

from .audio_io import Waveform, load_wav, save_wav, to_mono
from .dsp import (
    AugmentParams,
    AugmentationMode,
    EqCurve,
    RmsEnvelope,
    apply_eq,
    apply_rms_envelope,
    augment_pair,
    eq_curve,
    equal_power_mix,
    loop_or_truncate,
    rms_envelope,
    spectral_interpolate,
    spectral_target,
)
from .dataset import (
    ManifestEntry,
    ModeDistribution,
    PairSpec,
    TimestepWindow,
    build_dataset,
    caption_for,
    sample_mode,
    sample_training_timestep,
)
from .metrics import (
    DirectionalityParams,
    Embedding,
    GaussianStats,
    LatentMatrix,
    correspondence,
    cosine_sim,
    directionality,
    frechet_distance,
    gaussian_stats,
    intermediateness,
    lcs,
    mock_embed,
    mock_latents,
    roc_auc,
    spearman_rho,
)
from .evaluate import ConceptPair, EvalRow, InfusionPrompt, evaluate_corpus, expand_prompts, render_report

__version__ = "0.1.0"
