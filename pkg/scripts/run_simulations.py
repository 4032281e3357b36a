"""Sample every experiment variant, noiseless and with per-operation depolarizing noise."""

import argparse

from bellsim import VARIANTS, NoiseConfig, run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--shots", type=int, default=8192, help="per observable; randomized variants get 4x")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--rates", type=float, nargs="+", default=[0.0, 0.005])
    ap.add_argument("--workers", type=int, default=4)
    args = ap.parse_args()

    print(f"{'variant':<15}{'rate':>7}{'QS':>9}{'RS':>9}{'RT':>9}{'QT':>9}{'CHSH':>9}{'sigma':>8}")
    for rate in args.rates:
        for variant in VARIANTS:
            shots = args.shots if variant in ("I", "II") else 4 * args.shots
            res = run_experiment(variant, shots, args.seed, NoiseConfig(depolarizing=rate), args.workers)
            vals = "".join(f"{res.per_observable[o].estimate:>9.4f}" for o in ("QS", "RS", "RT", "QT"))
            print(f"{variant:<15}{rate:>7.3f}{vals}{res.chsh:>9.4f}{res.chsh_stddev:>8.4f}")


if __name__ == "__main__":
    main()
