"""Command-line interface: augment, build, embed-mock, eval.

Exit codes: 0 success, 1 processing failure, 2 usage/validation error.
Diagnostics go to stderr; machine-readable output to stdout.
"""

import argparse
import json
import sys
from pathlib import Path

from . import dataset, evaluate, metrics, store
from .audio_io import load_wav, save_wav, to_mono
from .dsp import AugmentationMode, AugmentParams, augment_pair
from .errors import MorphmixError

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

_MODE_NAMES = {
    "rms": AugmentationMode.RMS_ONLY,
    "spectral": AugmentationMode.SPECTRAL_ONLY,
    "both": AugmentationMode.BOTH,
    "none": AugmentationMode.NONE,
}


def _err(msg):
    print(f"error: {msg}", file=sys.stderr)


def load_config(path=None):
    """Read the optional config JSON into typed config values."""
    raw = {}
    if path:
        with open(path, encoding="utf-8") as f:
            raw = json.load(f)
    params = AugmentParams(**raw.get("augment_params", {}))
    dist = dataset.ModeDistribution(**raw.get("mode_distribution", {}))
    window = dataset.TimestepWindow(**raw.get("timestep_window", {}))
    seed = int(raw.get("seed", 0))
    return params, dist, window, seed


def _add_param_flags(parser):
    parser.add_argument("--config", help="config JSON (flags override its values)")
    parser.add_argument("--rms-frame-size", type=int)
    parser.add_argument("--rms-hop", type=int)
    parser.add_argument("--eq-smooth-window", type=int)
    parser.add_argument("--epsilon", type=float)
    parser.add_argument("--output-peak", type=float)


def _params_from_args(args, params):
    overrides = {
        "rms_frame_size": args.rms_frame_size,
        "rms_hop": args.rms_hop,
        "eq_smooth_window": args.eq_smooth_window,
        "epsilon": args.epsilon,
        "output_peak": args.output_peak,
    }
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if overrides:
        params = AugmentParams(**{**params.__dict__, **overrides})
    return params


def cmd_augment(args):
    for path in (args.primary, args.secondary):
        if not Path(path).exists():
            _err(f"input file not found: {path}")
            return EXIT_USAGE
    try:
        params, _, _, _ = load_config(args.config)
        params = _params_from_args(args, params)
        mode = _MODE_NAMES[args.mode]
    except (MorphmixError, ValueError, OSError) as e:
        _err(str(e))
        return EXIT_USAGE
    try:
        primary = load_wav(args.primary)
        secondary = load_wav(args.secondary)
        if not args.per_channel:
            primary = to_mono(primary)
            secondary = to_mono(secondary)
        out = augment_pair(primary, secondary, mode, params)
        save_wav(out, args.out, bit_depth=args.bit_depth)
    except MorphmixError as e:
        _err(str(e))
        return EXIT_FAILURE
    x, y = args.primary_label, args.secondary_label
    print(dataset.caption_for(mode, x, y))
    return EXIT_OK


def cmd_build(args):
    if not Path(args.pairs).exists():
        _err(f"pairs file not found: {args.pairs}")
        return EXIT_USAGE
    try:
        params, dist, window, seed = load_config(args.config)
        params = _params_from_args(args, params)
        if args.seed is not None:
            seed = args.seed
        pairs = dataset.load_pairs(args.pairs)
    except (MorphmixError, ValueError, OSError, TypeError) as e:
        _err(str(e))
        return EXIT_USAGE
    entries = dataset.build_dataset(
        pairs, dist, window, params, seed, args.out_dir, jobs=args.jobs
    )
    failed = sum(1 for e in entries if e.failed)
    print(f"{len(entries) - failed} built, {failed} failed")
    for entry in entries:
        if entry.failed:
            print(f"failed {entry.id}: {entry.error}", file=sys.stderr)
    return EXIT_FAILURE if failed else EXIT_OK


def cmd_embed_mock(args):
    audio_dir = Path(args.audio_dir)
    if not audio_dir.is_dir():
        _err(f"not a directory: {args.audio_dir}")
        return EXIT_USAGE
    out = store.EmbeddingStore(args.out_store)
    failures = 0
    for wav_path in sorted(audio_dir.glob("*.wav")):
        clip_id = wav_path.stem
        try:
            w = load_wav(wav_path)
            emb = metrics.mock_embed(w, dim=args.dim)
            out.put(clip_id, emb.values[None, :])
            if args.latents:
                lat = metrics.mock_latents(w, dim=args.latent_dim)
                out.put(f"{clip_id}.latents", lat.data)
        except MorphmixError as e:
            failures += 1
            print(f"failed {wav_path.name}: {e}", file=sys.stderr)
    out.ensure_index()
    print(f"{len(out.ids())} entries written")
    return EXIT_FAILURE if failures else EXIT_OK


def cmd_eval(args):
    for path in (args.clips, args.reference):
        if not Path(path).exists():
            _err(f"file not found: {path}")
            return EXIT_USAGE
    try:
        clips = evaluate.load_eval_clips(args.clips)
        emb_store = store.EmbeddingStore(args.store)
        reference = store.read_gaussian_stats(args.reference)
        params = metrics.DirectionalityParams(temperature=args.temperature)
    except (MorphmixError, ValueError, OSError, KeyError) as e:
        _err(str(e))
        return EXIT_USAGE
    try:
        row = evaluate.evaluate_corpus(
            clips, emb_store, reference, params, model_name=args.model_name,
            on_error=lambda cid, e: print(f"excluded {cid}: {e}", file=sys.stderr),
        )
    except MorphmixError as e:
        _err(str(e))
        return EXIT_FAILURE
    report = evaluate.render_report([row], fmt=args.format)
    if args.out:
        Path(args.out).write_text(report, encoding="utf-8")
    else:
        sys.stdout.write(report)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="morphmix",
        description="Surrogate-morph augmentation pipeline and morphing metrics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("augment", help="render one surrogate morph from a pair of WAVs")
    p.add_argument("primary")
    p.add_argument("secondary")
    p.add_argument("--mode", choices=sorted(_MODE_NAMES), default="rms")
    p.add_argument("--out", required=True)
    p.add_argument("--bit-depth", type=int, choices=(16, 24, 32), default=32)
    p.add_argument("--primary-label", default="primary")
    p.add_argument("--secondary-label", default="secondary")
    p.add_argument("--per-channel", action="store_true",
                   help="process channels independently instead of downmixing to mono")
    _add_param_flags(p)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("build", help="build a surrogate-morph dataset from a pair list")
    p.add_argument("pairs", help="JSON-lines file of pair specs")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int, default=1)
    _add_param_flags(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("embed-mock", help="compute deterministic mock embeddings for a WAV dir")
    p.add_argument("audio_dir")
    p.add_argument("--out-store", required=True)
    p.add_argument("--dim", type=int, default=64)
    p.add_argument("--latents", action="store_true", help="also write latent matrices")
    p.add_argument("--latent-dim", type=int, default=32)
    p.set_defaults(func=cmd_embed_mock)

    p = sub.add_parser("eval", help="score a clip corpus and render a report")
    p.add_argument("clips", help="JSON-lines clip manifest")
    p.add_argument("--store", required=True, help="embedding store directory")
    p.add_argument("--reference", required=True, help="reference Gaussian stats (MXEB)")
    p.add_argument("--format", choices=("csv", "markdown"), default="markdown")
    p.add_argument("--model-name", default="model")
    p.add_argument("--temperature", type=float, default=0.05)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else 0
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
