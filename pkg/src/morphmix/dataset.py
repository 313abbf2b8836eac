"""Dataset builder: mode sampling, captions, timestep windows, manifests.

Reproducibility contract: the build output is a pure function of
(inputs, seed). Every pair gets its own PCG64 generator seeded from
SHA-256(seed, pair id), so the amount of parallelism cannot perturb the
draw sequence of any pair.
"""

import dataclasses
import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .audio_io import load_wav, save_wav, to_mono
from .dsp import AugmentationMode, AugmentParams, augment_pair
from .errors import EmptyLabel, InvalidDistribution, MorphmixError

MODE_ORDER = (
    AugmentationMode.RMS_ONLY,
    AugmentationMode.SPECTRAL_ONLY,
    AugmentationMode.BOTH,
    AugmentationMode.NONE,
)

CAPTION_TEMPLATES = {
    AugmentationMode.RMS_ONLY: "The behavior of {x} with textures from {x} and {y}",
    AugmentationMode.SPECTRAL_ONLY: "A spectral blend of {x} and {y}",
    AugmentationMode.BOTH: "The behavior of {x} with a spectral blend of {x} and {y}",
    AugmentationMode.NONE: "A mix of {x} and {y}",
}


@dataclass(frozen=True)
class PairSpec:
    id: str
    primary_path: str
    primary_label: str
    secondary_path: str
    secondary_label: str


@dataclass(frozen=True)
class ModeDistribution:
    """Probability per augmentation mode, in MODE_ORDER."""

    rms: float = 1 / 3
    spectral: float = 1 / 3
    both: float = 1 / 3
    none: float = 0.0

    def __post_init__(self):
        probs = self.as_tuple()
        if any(p < 0 for p in probs):
            raise InvalidDistribution(f"negative probability in {probs}")
        if abs(sum(probs) - 1.0) > 1e-9:
            raise InvalidDistribution(f"probabilities sum to {sum(probs)!r}, expected 1")

    def as_tuple(self):
        return (self.rms, self.spectral, self.both, self.none)


@dataclass(frozen=True)
class TimestepWindow:
    """Diffusion timestep range the surrogate examples are allocated to."""

    t_start: float = 0.5
    t_end: float = 1.0

    def __post_init__(self):
        if not (0.0 <= self.t_start < self.t_end <= 1.0):
            raise ValueError(f"need 0 <= t_start < t_end <= 1, got [{self.t_start}, {self.t_end}]")


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    audio_path: str
    mode: AugmentationMode
    caption: str
    window: TimestepWindow
    primary_label: str
    secondary_label: str
    params: AugmentParams
    seed: int
    error: str = ""

    @property
    def failed(self):
        return bool(self.error)

    def to_dict(self):
        return {
            "id": self.id,
            "audio_path": self.audio_path,
            "mode": self.mode.value,
            "caption": self.caption,
            "window": {"t_start": self.window.t_start, "t_end": self.window.t_end},
            "primary_label": self.primary_label,
            "secondary_label": self.secondary_label,
            "params": dataclasses.asdict(self.params),
            "seed": self.seed,
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            id=d["id"],
            audio_path=d["audio_path"],
            mode=AugmentationMode(d["mode"]),
            caption=d["caption"],
            window=TimestepWindow(**d["window"]),
            primary_label=d["primary_label"],
            secondary_label=d["secondary_label"],
            params=AugmentParams(**d["params"]),
            seed=d["seed"],
            error=d.get("error", ""),
        )


def pair_seed(seed, pair_id):
    """Derive a per-pair sub-seed by hashing (seed, pair id)."""
    digest = hashlib.sha256(f"{seed}:{pair_id}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def pair_rng(seed, pair_id):
    return np.random.Generator(np.random.PCG64(pair_seed(seed, pair_id)))


def sample_mode(rng, dist):
    """Draw a mode by inverse CDF over the fixed MODE_ORDER."""
    u = rng.random()
    acc = 0.0
    for mode, p in zip(MODE_ORDER, dist.as_tuple()):
        acc += p
        if u < acc:
            return mode
    return MODE_ORDER[-1]  # u landed in the final rounding gap


def caption_for(mode, x, y):
    """Render the caption template for a mode with concept labels X and Y."""
    if not x or not y:
        raise EmptyLabel("caption labels must be non-empty")
    return CAPTION_TEMPLATES[mode].format(x=x, y=y)


def sample_training_timestep(rng, entry):
    """Draw the diffusion timestep this example would train at: uniform in its window."""
    w = entry.window
    return float(w.t_start + (w.t_end - w.t_start) * rng.random())


def load_pairs(path):
    """Read a JSON-lines file of PairSpec objects."""
    pairs = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                pairs.append(PairSpec(**json.loads(line)))
    return pairs


def _build_one(pair, dist, window, params, seed, audio_dir):
    sub_seed = pair_seed(seed, pair.id)
    rng = np.random.Generator(np.random.PCG64(sub_seed))
    mode = sample_mode(rng, dist)
    caption = caption_for(mode, pair.primary_label, pair.secondary_label)
    # manifest paths are relative to out_dir so reruns into different
    # directories stay byte-identical and the dataset is relocatable
    out_path = audio_dir / f"{pair.id}.wav"
    rel_path = f"audio/{pair.id}.wav"
    try:
        primary = to_mono(load_wav(pair.primary_path))
        secondary = to_mono(load_wav(pair.secondary_path))
        rendered = augment_pair(primary, secondary, mode, params)
        save_wav(rendered, out_path, bit_depth=32)
        error = ""
    except (MorphmixError, OSError) as e:
        error = f"{type(e).__name__}: {e}"
    return ManifestEntry(
        id=pair.id,
        audio_path=rel_path if not error else "",
        mode=mode,
        caption=caption,
        window=window,
        primary_label=pair.primary_label,
        secondary_label=pair.secondary_label,
        params=params,
        seed=sub_seed,
        error=error,
    )


def build_dataset(pairs, dist, window, params, seed, out_dir, jobs=1):
    """Render every pair and write manifest.jsonl plus audio/<id>.wav.

    Failed pairs become manifest entries with an error field; the build
    continues. Manifest order always matches input order.
    """
    out_dir = Path(out_dir)
    audio_dir = out_dir / "audio"
    audio_dir.mkdir(parents=True, exist_ok=True)

    if jobs > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            entries = list(
                pool.map(
                    lambda p: _build_one(p, dist, window, params, seed, audio_dir), pairs
                )
            )
    else:
        entries = [_build_one(p, dist, window, params, seed, audio_dir) for p in pairs]

    with open(out_dir / "manifest.jsonl", "w", encoding="utf-8") as f:
        for entry in entries:
            json.dump(entry.to_dict(), f, sort_keys=True)
            f.write("\n")
    return entries


def load_manifest(path):
    entries = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                entries.append(ManifestEntry.from_dict(json.loads(line)))
    return entries
