"""Semiclassical resonances from Lambert W branches.

For a coupling that scales like h^-beta, builds the roots branch by branch,
checks the band (beta < 1) or parabola (beta > 1) inequalities inside the
window eps <= |z| <= 1/eps and compares with direct root-finding.

    python3 demos/semiclassical_bands.py --h 1e-3 --eps 0.5
"""

import argparse

from halfspace_resonances.semiclassical import (
    SemiclassicalParams,
    resonance_wk,
    verify_band_beta_lt1,
    verify_parabola_beta_gt1,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--h", type=float, default=1e-3)
    ap.add_argument("--eps", type=float, default=0.5)
    ap.add_argument("--y3", type=float, default=1.0)
    args = ap.parse_args()

    for beta in (0.5, 2.0):
        for bc in ("dirichlet", "neumann"):
            for sign in ("plus", "minus"):
                p = SemiclassicalParams(args.h, beta, sign, bc, args.y3)
                if beta < 1:
                    rep = verify_band_beta_lt1(p, args.eps)
                else:
                    rep = verify_parabola_beta_gt1(p, args.eps)
                failed = sum(not c.ok for c in rep.checks)
                print(
                    f"beta={beta:<4} {bc:9} {sign:5}  roots {rep.n_roots:5d}  failed {failed}  "
                    f"max slack {rep.max_slack:.2e}  vs direct {rep.max_direct_diff:.1e}"
                )

    p = SemiclassicalParams(args.h, 2.0, "plus", "dirichlet", args.y3)
    print("\nfirst branches (beta=2, Dirichlet, plus):")
    for k in range(1, 6):
        z = resonance_wk(p, k)
        print(f"  k={k}: {z.real: .6e} {z.imag:+.6e}i")


if __name__ == "__main__":
    main()
