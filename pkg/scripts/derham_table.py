#!/usr/bin/env python3
"""Rank table for the simplicial de Rham comparison on small spaces."""

import argparse

from adelweil.simplicial import (
    boundary_simplex_sset, disjoint_points, standard_simplex_sset,
)
from adelweil.sullivan import verify_de_rham


def spaces(max_dim: int, points: int):
    for n in range(max_dim + 1):
        yield standard_simplex_sset(n)
    yield boundary_simplex_sset(2)
    yield disjoint_points(points)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-dim", type=int, default=3)
    ap.add_argument("--points", type=int, default=2)
    ap.add_argument("--weight-cap", type=int, default=None)
    args = ap.parse_args()
    print(f"{'space':<16} {'cap':>3} {'sullivan':<10} {'cochain':<10} "
          f"{'iso':<5} {'pairs':>5}  ok")
    for space in spaces(args.max_dim, args.points):
        res = verify_de_rham(space, weight_cap=args.weight_cap)
        sul = ",".join(str(r) for r in res["sullivan_ranks"])
        coc = ",".join(str(r) for r in res["cochain_ranks"])
        print(f"{res['space']:<16} {res['weight_cap']:>3} {sul:<10} "
              f"{coc:<10} {str(res['induced_iso']).lower():<5} "
              f"{res['multiplicativity_pairs']:>5}  "
              f"{'yes' if res['ok'] else 'NO'}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
