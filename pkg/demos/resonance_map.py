"""Walk through the resonance set of one configuration.

Lists the zeros in a disk, checks them against the argument-principle count
and shows how the count tracks the linear counting law as the radius grows.

    python3 demos/resonance_map.py --bc dirichlet --alpha 0 --y3 1 --rmax 20
"""

import argparse
import math

from halfspace_resonances import BoundaryCondition, ModelParams, count_exact, find_all
from halfspace_resonances.oracle import count_zeros_half_disk
from halfspace_resonances.solver import gamma_residual, total_multiplicity


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--bc", default="dirichlet")
    ap.add_argument("--alpha", type=float, default=0.0)
    ap.add_argument("--y3", type=float, default=1.0)
    ap.add_argument("--rmax", type=float, default=20.0)
    args = ap.parse_args()

    p = ModelParams.from_height(BoundaryCondition.parse(args.bc), args.alpha, args.y3)
    res = find_all(p, args.rmax)
    print(f"{p.bc.value}, alpha={p.alpha:g}, y3={p.y3:g}: {len(res)} zeros with |z| < {args.rmax:g}")
    print(f"{'kind':>14} {'branch':>6} {'Re z':>12} {'Im z':>12} {'|Gamma|/scale':>14}")
    for r in sorted(res, key=lambda r: r.z.real):
        print(f"{r.kind.value:>14} {r.branch:>6} {r.z.real:12.6f} {r.z.imag:12.6f} {gamma_residual(p, r.z):14.2e}")

    oracle = count_zeros_half_disk(p, args.rmax, include_origin=any(r.z == 0 for r in res))
    print(f"\nsolver count {total_multiplicity(res)}, argument principle {oracle.count}")

    print("\n   R  exact   2 floor(y3 R / pi - 1/4)   ratio to 2 y3 R / pi")
    for R in (25, 50, 100, 200, 400):
        rep = count_exact(p, R, use_oracle=False)
        print(f"{R:4d}  {rep.exact_count:5d}   {rep.asymptotic_count:24d}   {rep.exact_count / (2 * p.y3 * R / math.pi):8.4f}")


if __name__ == "__main__":
    main()
