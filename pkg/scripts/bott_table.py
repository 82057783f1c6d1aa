#!/usr/bin/env python3
"""Tabulate fixed point sums across the projective scenarios.

Rebuilds every scenario from scratch (nothing is read from the shipped
data files) and prints the per-zero contributions next to the total, so
a regression in the residue engine shows up as a changed table rather
than a silent pass.
"""

import argparse
from fractions import Fraction

from adelweil.scenarios import bott_sum, projective_space_scenario


def build_cases(max_degree: int):
    w2 = (Fraction(-1), Fraction(0))
    w3 = (Fraction(-1), Fraction(0), Fraction(1))
    cases = [projective_space_scenario(1, w2, d)
             for d in range(1, max_degree + 1)]
    cases.append(projective_space_scenario(1, w2, "tangent"))
    cases.append(projective_space_scenario(1, w2, 1, degenerate_variant=True))
    cases.extend(projective_space_scenario(2, w3, d)
                 for d in range(1, max_degree + 1))
    cases.append(projective_space_scenario(2, w3, "tangent"))
    return cases


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-degree", type=int, default=3,
                    help="highest line bundle degree per space")
    args = ap.parse_args()
    header = (f"{'scenario':<18} {'poly':<5} {'zeros':<20} "
              f"{'total':>6} {'expected':>9}")
    print(header)
    print("-" * len(header))
    for scn in build_cases(args.max_degree):
        res = bott_sum(scn)
        zeros = " ".join(str(r["value"]) for r in res["rows"])
        mark = "" if res["matches"] else "  MISMATCH"
        print(f"{res['scenario']:<18} {res['poly']:<5} {zeros:<20} "
              f"{str(res['total']):>6} {str(res['expected']):>9}{mark}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
