"""Print (or save) the first-absolute-moment table for the Steinhaus sum.

Each row compares the simulated E|S_x| / sqrt(x) against the conjectured
limiting coefficient and the optimizer upper bound.  Larger x and more
trials sharpen the verdict; the defaults finish in a few seconds.
"""

import argparse

from rmfmoments.estimates import DEFAULT_SEED
from rmfmoments.simulate import helson_table, write_helson_csv


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--x-list", default="100,1000,10000")
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", default=None, help="write CSV here instead of printing")
    args = ap.parse_args()

    xs = [int(v) for v in args.x_list.split(",") if v]
    rows = helson_table(xs, args.trials, args.seed, threads=args.threads)
    if args.out:
        write_helson_csv(rows, args.out)
        print(f"wrote {len(rows)} rows to {args.out}")
        return
    header = f"{'x':>8} {'E|S|':>12} {'se':>10} {'E|S|/sqrt(x)':>14} {'conjectured':>12} {'bound':>8}"
    print(header)
    for r in rows:
        print(
            f"{int(r['x']):>8} {r['mean_abs']:>12.4f} {r['stderr']:>10.4f} "
            f"{r['ratio_sqrt_x']:>14.5f} {r['conjectured_coefficient']:>12.5f} "
            f"{r['amplitude_bound']:>8.5f}"
        )


if __name__ == "__main__":
    main()
