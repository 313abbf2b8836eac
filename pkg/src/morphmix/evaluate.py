"""Corpus evaluation: prompt expansion, per-clip scoring, report rendering."""

import io
import json
from dataclasses import dataclass

import numpy as np

from .errors import BadTemplate, EmptyInput, MissingEmbedding, MorphmixError
from .metrics import (
    DirectionalityParams,
    correspondence,
    cosine_sim,
    directionality,
    frechet_distance,
    gaussian_stats,
    intermediateness,
    lcs,
)

DEFAULT_PROMPT_TEMPLATE = "behavior of {X} with timbre like {Y}"

METRIC_COLUMNS = ("lcs", "correspondence", "intermediateness", "directionality", "fad")
COLUMN_TITLES = ("model", "LCS", "Correspond.", "Intermediate.", "Direct.", "FAD")
# FAD is the only lower-is-better column
HIGHER_IS_BETTER = {"lcs": True, "correspondence": True, "intermediateness": True,
                    "directionality": True, "fad": False}


@dataclass(frozen=True)
class ConceptPair:
    x_label: str
    y_label: str

    def __post_init__(self):
        if not self.x_label or not self.y_label:
            raise ValueError("concept labels must be non-empty")
        if self.x_label == self.y_label:
            raise ValueError(f"concept labels must be distinct, got {self.x_label!r} twice")


@dataclass(frozen=True)
class InfusionPrompt:
    primary_label: str
    secondary_label: str
    prompt_text: str
    direction: str  # "forward" or "reverse"


@dataclass(frozen=True)
class EvalClip:
    """One scored clip: store ids for its embeddings and prompt embeddings."""

    clip_id: str
    audio_id: str
    latents_id: str
    text_x_id: str
    text_y_id: str
    prompt_intended_id: str
    prompt_reversed_id: str

    @classmethod
    def from_dict(cls, d):
        return cls(**{k: d[k] for k in (
            "clip_id", "audio_id", "latents_id", "text_x_id", "text_y_id",
            "prompt_intended_id", "prompt_reversed_id",
        )})


@dataclass(frozen=True)
class EvalRow:
    model_name: str
    lcs: float
    correspondence: float
    intermediateness: float
    directionality: float
    fad: float
    count: int
    excluded: int = 0


def expand_prompts(pairs, template=DEFAULT_PROMPT_TEMPLATE):
    """Expand concept pairs into directional prompts, forward then reverse per pair."""
    if "{X}" not in template or "{Y}" not in template:
        raise BadTemplate(f"template must contain {{X}} and {{Y}} slots: {template!r}")
    prompts = []
    for pair in pairs:
        prompts.append(InfusionPrompt(
            primary_label=pair.x_label,
            secondary_label=pair.y_label,
            prompt_text=template.replace("{X}", pair.x_label).replace("{Y}", pair.y_label),
            direction="forward",
        ))
        prompts.append(InfusionPrompt(
            primary_label=pair.y_label,
            secondary_label=pair.x_label,
            prompt_text=template.replace("{X}", pair.y_label).replace("{Y}", pair.x_label),
            direction="reverse",
        ))
    return prompts


def bundled_concept_pairs():
    """The sample concept-pair list shipped with the package.

    Fifty inter-class pairs in the spirit of creative sound-design blends;
    illustrative fixtures, not a canonical benchmark set.
    """
    from importlib import resources

    path = resources.files("morphmix").joinpath("data/concept_pairs.jsonl")
    return [
        ConceptPair(d["x_label"], d["y_label"])
        for d in (json.loads(line) for line in path.read_text(encoding="utf-8").splitlines() if line)
    ]


def load_concept_pairs(path):
    pairs = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                d = json.loads(line)
                pairs.append(ConceptPair(d["x_label"], d["y_label"]))
    return pairs


def load_eval_clips(path):
    clips = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                clips.append(EvalClip.from_dict(json.loads(line)))
    return clips


def score_clip(clip, store, params=DirectionalityParams()):
    """Compute the four per-clip metrics for one clip; raises on missing data."""
    audio = store.embedding(clip.audio_id)
    latents = store.latents(clip.latents_id)
    sim_x = cosine_sim(audio, store.embedding(clip.text_x_id))
    sim_y = cosine_sim(audio, store.embedding(clip.text_y_id))
    s_int = cosine_sim(audio, store.embedding(clip.prompt_intended_id))
    s_rev = cosine_sim(audio, store.embedding(clip.prompt_reversed_id))
    return {
        "lcs": lcs(latents),
        "correspondence": correspondence(sim_x, sim_y),
        "intermediateness": intermediateness(sim_x, sim_y),
        "directionality": directionality(s_int, s_rev, params),
    }


def evaluate_corpus(clips, store, reference, params=DirectionalityParams(),
                    model_name="model", on_error=None):
    """Score a clip corpus: unweighted metric means plus pooled FAD vs reference.

    Clips whose embeddings are missing raise MissingEmbedding naming the
    clip. Other per-clip metric failures exclude the clip from the means;
    the exclusion count is reported on the row.
    """
    if not clips:
        raise EmptyInput("no clips to evaluate")
    per_clip = []
    pooled = []
    excluded = 0
    for clip in clips:
        try:
            scores = score_clip(clip, store, params)
        except MissingEmbedding as e:
            raise MissingEmbedding(f"clip {clip.clip_id!r}: {e}") from e
        except MorphmixError as e:
            excluded += 1
            if on_error is not None:
                on_error(clip.clip_id, e)
            continue
        per_clip.append(scores)
        pooled.append(store.embedding(clip.audio_id))
    if not per_clip:
        raise EmptyInput("every clip failed metric computation")
    means = {
        key: sum(s[key] for s in per_clip) / len(per_clip) for key in
        ("lcs", "correspondence", "intermediateness", "directionality")
    }
    if len(pooled) == 1:
        # a single clip still yields a row; the pooled fit degenerates to a
        # point mass at its embedding
        from .metrics import GaussianStats

        d = pooled[0].dim
        pooled_stats = GaussianStats(pooled[0].values, np.zeros((d, d)))
    else:
        pooled_stats = gaussian_stats(pooled)
    fad = frechet_distance(pooled_stats, reference)
    return EvalRow(
        model_name=model_name,
        lcs=means["lcs"],
        correspondence=means["correspondence"],
        intermediateness=means["intermediateness"],
        directionality=means["directionality"],
        fad=fad,
        count=len(per_clip),
        excluded=excluded,
    )


def _best_indices(rows):
    """Map metric name to the row index holding the best value."""
    best = {}
    for key in METRIC_COLUMNS:
        values = [getattr(r, key) for r in rows]
        pick = max if HIGHER_IS_BETTER[key] else min
        best[key] = values.index(pick(values))
    return best


def render_report(rows, fmt="markdown"):
    """Render evaluation rows as CSV or a Markdown table (best per column bolded)."""
    if not rows:
        raise EmptyInput("no rows to render")
    if fmt == "csv":
        out = io.StringIO()
        out.write(",".join(COLUMN_TITLES) + "\n")
        for r in rows:
            cells = [r.model_name] + [f"{getattr(r, k):.3f}" for k in METRIC_COLUMNS]
            out.write(",".join(cells) + "\n")
        return out.getvalue()
    if fmt == "markdown":
        best = _best_indices(rows)
        lines = [
            "| " + " | ".join(COLUMN_TITLES) + " |",
            "|" + "|".join(["---"] * len(COLUMN_TITLES)) + "|",
        ]
        for i, r in enumerate(rows):
            cells = [r.model_name]
            for key in METRIC_COLUMNS:
                text = f"{getattr(r, key):.3f}"
                if len(rows) > 1 and best[key] == i:
                    text = f"**{text}**"
                cells.append(text)
            lines.append("| " + " | ".join(cells) + " |")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")
