"""Ratio tables: exact moments against their asymptotic leading terms.

Three views of the same question (how fast does the ratio approach 1):

  counts   fourth-moment lattice count over a geometric x grid
  unitary  truncated unitary moment over an L grid at fixed |z|
  so       truncated special-orthogonal moment over an L grid
"""

import argparse
import math

from rmfmoments.analytic import steinhaus_asymptotic_rhs
from rmfmoments.exact_counts import steinhaus_energy
from rmfmoments.rmt import (
    so_asymptotic_rhs,
    so_truncated_moment_exact,
    unitary_asymptotic_rhs,
    unitary_truncated_moment_exact,
)


def counts_rows(k: int, xs: list[int]) -> list[tuple[float, float]]:
    out = []
    for x in xs:
        exact = steinhaus_energy(k, x).value
        rhs = steinhaus_asymptotic_rhs(k, 0.0, float(x)).value_at(float(x))
        out.append((float(x), exact / rhs))
    return out


def matrix_rows(group: str, k: int, z: float, ls: list[int]) -> list[tuple[float, float]]:
    exact_fn = unitary_truncated_moment_exact if group == "unitary" else so_truncated_moment_exact
    rhs_fn = unitary_asymptotic_rhs if group == "unitary" else so_asymptotic_rhs
    return [(float(L), exact_fn(k, L, z) / rhs_fn(k, L, z)) for L in ls]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--side", choices=("counts", "unitary", "so"), default="counts")
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--z", type=float, default=math.exp(0.5))
    ap.add_argument("--x-list", default="100,1000,10000")
    ap.add_argument("--L-list", dest="L_list", default="5,10,20,40")
    args = ap.parse_args()

    if args.side == "counts":
        rows = counts_rows(args.k, [int(v) for v in args.x_list.split(",") if v])
        label = "x"
    else:
        ls = [int(v) for v in args.L_list.split(",") if v]
        rows = matrix_rows(args.side, args.k, args.z, ls)
        label = "L"

    print(f"{label:>8} {'exact/rhs':>12}")
    for key, ratio in rows:
        print(f"{int(key):>8} {ratio:>12.5f}")


if __name__ == "__main__":
    main()
