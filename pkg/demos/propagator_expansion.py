"""Resonance expansion of the Schroedinger propagator.

Splits exp(-itH)(x, x') into the free half-space term, the residue sum over
resonances and the integral along the ray, then compares the total with an
independent contour quadrature.

    python3 demos/propagator_expansion.py --t 2 --n-max 40
"""

import argparse

from halfspace_resonances import BoundaryCondition, ModelParams
from halfspace_resonances.expansion import horizontal_contour_kernel, schrodinger_kernel


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--bc", default="dirichlet")
    ap.add_argument("--alpha", type=float, default=0.0)
    ap.add_argument("--y3", type=float, default=1.0)
    ap.add_argument("--t", type=float, default=2.0)
    ap.add_argument("--n-max", type=int, default=40)
    args = ap.parse_args()

    p = ModelParams.from_height(BoundaryCondition.parse(args.bc), args.alpha, args.y3)
    x, xp = (0.0, 0.0, 1.5), (0.0, 0.0, 2.0)
    k = schrodinger_kernel(p, args.t, x, xp, n_max=args.n_max)
    print(f"free term      {k.free_term:.12e}")
    print(f"residue sum    {k.residue_sum:.12e}  ({len(k.terms)} resonances)")
    print(f"ray integral   {k.background:.12e}  (error {k.background_error:.1e})")
    print(f"total          {k.total:.12e}")

    # partial sums: the terms die off super-exponentially at fixed t
    partial = 0j
    for n, term in enumerate(k.terms[:6]):
        partial += term.value(args.t)
        print(f"  after {n + 1} terms: {partial:.12e}")

    ref = horizontal_contour_kernel(p, args.t, x, xp)
    print(f"\ncontour check  {ref.total:.12e}  relative difference {abs(ref.total - k.total) / abs(ref.total):.1e}")


if __name__ == "__main__":
    main()
