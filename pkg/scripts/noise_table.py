"""Noisy CHSH correlations for each Kraus channel: exact density matrix vs closed form vs sampling."""

import argparse
from bellsim import NoiseConfig, run_experiment
from bellsim.channels import CHANNEL_NAMES, PAIRS, default_grid, noise_table_rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=5)
    ap.add_argument("--shots", type=int, default=4096, help="0 skips the sampled column")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    for name in CHANNEL_NAMES:
        print(f"channel {name}")
        rows = list(noise_table_rows(name, default_grid(name, args.points)))
        for i in range(0, len(rows), len(PAIRS)):
            params = rows[i][1]
            exact = {r[2]: r[4] for r in rows[i:i + len(PAIRS)]}
            err = max(r[5] for r in rows[i:i + len(PAIRS)])
            label = ",".join(f"{k}={v:.3f}" for k, v in params.items())
            line = f"  {label:<22}" + "".join(f"{p}={exact[p]:+.4f} " for p in PAIRS) + f"err={err:.1e}"
            if args.shots:
                res = run_experiment("I", args.shots, args.seed, NoiseConfig(channel=name, channel_params=params))
                line += f"  sampled CHSH={res.chsh:.3f}"
            print(line)


if __name__ == "__main__":
    main()
