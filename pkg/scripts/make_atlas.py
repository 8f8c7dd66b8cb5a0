#!/usr/bin/env python3
"""Emit the (kbar, p) region diagram (CSV + SVG) for one damping setting.

The diagram shades certified blow-up below the curve p = p_F(kbar + mu/2)
and known global existence above it, draws both boundary curves, and
annotates the exact intersection (kbar0, p_S(n + mu))."""

import argparse
from pathlib import Path

from blowuplab.diagram import write_atlas_svg
from blowuplab.exponents import atlas


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--mu", type=float, default=2.0)
    ap.add_argument("--nu", type=float, default=0.0)
    ap.add_argument("--k-min", type=float, default=-0.5)
    ap.add_argument("--k-max", type=float, default=4.0)
    ap.add_argument("--p-min", type=float, default=1.05)
    ap.add_argument("--p-max", type=float, default=3.5)
    ap.add_argument("--count", type=int, default=200, help="grid nodes per axis")
    ap.add_argument("--out", type=Path, default=Path("out/atlas"))
    args = ap.parse_args()

    result = atlas(
        args.n, args.mu, args.nu,
        (args.k_min, args.k_max, args.count),
        (args.p_min, args.p_max, args.count),
    )
    args.out.mkdir(parents=True, exist_ok=True)
    stem = f"atlas_n{args.n}_mu{args.mu:g}_nu{args.nu:g}"
    result.to_csv(args.out / f"{stem}.csv")
    write_atlas_svg(result, args.out / f"{stem}.svg")
    print(f"kbar0 = {result.kbar0:.12g}, p_S(n+mu) = {result.p_strauss:.12g}")
    print(f"verdicts: {result.verdict_counts()}")
    print(f"wrote {args.out / (stem + '.csv')} and {args.out / (stem + '.svg')}")


if __name__ == "__main__":
    main()
