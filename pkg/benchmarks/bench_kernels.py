"""Benchmark the numba kernels against their pure-numpy fallbacks.

Runs both implementations in-process (no env flag needed) and reports the
best-of-N wall time per call plus the speedup. Numba compilation happens
during warmup and is excluded from the timings.
"""

import argparse
import time

import numpy as np

from morphmix import kernels


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--samples", type=int, default=48000 * 30,
                        help="signal length in samples (default: 30 s at 48 kHz)")
    parser.add_argument("--frame", type=int, default=2048)
    parser.add_argument("--hop", type=int, default=512)
    parser.add_argument("--window", type=int, default=101,
                        help="moving-average window (default matches the EQ smoother)")
    parser.add_argument("--repeats", type=int, default=20)
    args = parser.parse_args()

    if not kernels.HAVE_NUMBA:
        parser.error("numba path unavailable (missing numba or MORPHMIX_DISABLE_NUMBA set); "
                     "nothing to compare")

    rng = np.random.default_rng(0)
    x = rng.normal(size=args.samples)
    n_frames = -(-args.samples // args.hop)
    gains = rng.uniform(0.5, 2.0, n_frames)
    xp, fp = kernels._gain_anchors(gains, args.frame, args.hop, args.samples)
    spectrum = rng.uniform(size=args.samples // 2 + 1)

    cases = [
        ("frame_rms",
         lambda: kernels._frame_rms_numpy(x, args.frame, args.hop, n_frames),
         lambda: kernels._frame_rms_numba(x, args.frame, args.hop, n_frames)),
        ("interp_frame_gains",
         lambda: kernels._interp_anchors_numpy(xp, fp, args.samples),
         lambda: kernels._interp_anchors_numba(xp, fp, args.samples)),
        ("moving_average",
         lambda: kernels._moving_average_numpy(spectrum, args.window),
         lambda: kernels._moving_average_numba(spectrum, args.window)),
    ]

    print(f"signal: {args.samples} samples, frame {args.frame}, hop {args.hop}, "
          f"window {args.window}, best of {args.repeats}")
    print(f"{'kernel':<20} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    for name, numpy_fn, numba_fn in cases:
        ref = numpy_fn()
        got = numba_fn()  # warmup compile + correctness check
        assert np.allclose(ref, got, rtol=1e-10, atol=1e-12), name
        t_np = best_of(numpy_fn, args.repeats)
        t_nb = best_of(numba_fn, args.repeats)
        print(f"{name:<20} {t_np * 1e3:>10.3f}ms {t_nb * 1e3:>10.3f}ms {t_np / t_nb:>8.2f}x")


if __name__ == "__main__":
    main()
