#!/usr/bin/env python3
"""Measure the fast-decoder vs ML SNR penalty at a target BER for the 4x8 code.

Both decoders see identical words and noise (common random numbers); the
crossing SNRs come from log-linear interpolation on the sweep grid.
"""
import argparse
import math

from udcdma.harness import SimConfig, run_ber_sweep


def crossing(points, decoder, target):
    xs = [p.snr_db for p in points if p.decoder == decoder and p.bit_errors > 0]
    ys = [p.ber for p in points if p.decoder == decoder and p.bit_errors > 0]
    for i in range(len(xs) - 1):
        if ys[i] >= target >= ys[i + 1]:
            t = (math.log(target) - math.log(ys[i])) / (math.log(ys[i + 1]) - math.log(ys[i]))
            return xs[i] + t * (xs[i + 1] - xs[i])
    return None


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=1_000_000)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--target", type=float, default=1e-3)
    ap.add_argument("--snr-lo", type=float, default=10.5)
    ap.add_argument("--snr-hi", type=float, default=13.0)
    ap.add_argument("--step", type=float, default=0.25)
    ap.add_argument("--workers", type=int, default=2)
    args = ap.parse_args()

    count = int(round((args.snr_hi - args.snr_lo) / args.step)) + 1
    grid = tuple(round(args.snr_lo + i * args.step, 6) for i in range(count))
    cfg = SimConfig(level=2, trials_per_point=args.trials, rng_seed=args.seed,
                    snr_db_grid=grid, decoders=("fda", "ml"), workers=args.workers)
    pts = run_ber_sweep(cfg)
    for p in pts:
        print(f"{p.snr_db:6.2f} dB  {p.decoder:3s}  ber={p.ber:.3e}  "
              f"errs={p.bit_errors}")
    s_fda = crossing(pts, "fda", args.target)
    s_ml = crossing(pts, "ml", args.target)
    if s_fda is None or s_ml is None:
        print("target BER not bracketed by the grid; widen --snr-lo/--snr-hi")
        return
    print(f"\nfast decoder reaches BER {args.target:g} at {s_fda:.3f} dB")
    print(f"ML reaches BER {args.target:g} at {s_ml:.3f} dB")
    print(f"SNR penalty: {s_fda - s_ml:.3f} dB")


if __name__ == "__main__":
    main()
