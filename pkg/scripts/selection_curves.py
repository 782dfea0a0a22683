"""Empirical frame-bound curves for row selection on the middle-third pair.

Writes one CSV row per (n, method, seed) with the selected matrix's
squared extreme singular values. Exhaustive rows appear only while the
subset count stays under the cap.
"""

import argparse
import math
import sys
import time

from fractal_spectra.tower import Method, SELECTION_CAP, SelectionProblem, exhaustive_select, heuristic_select, records_csv
from fractal_spectra.triple import AffinePair


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--R", type=int, default=3)
    ap.add_argument("--B", type=int, nargs="+", default=[0, 2])
    ap.add_argument("--nmax", type=int, default=3)
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--out", default="-")
    args = ap.parse_args(argv)

    pair = AffinePair(args.R, args.B)
    results = []
    for n in range(1, args.nmax + 1):
        t0 = time.perf_counter()
        p = SelectionProblem(pair, n)
        if math.comb(len(p.universe), p.target) <= SELECTION_CAP:
            results.append(exhaustive_select(p))
        results.append(heuristic_select(p, Method.GREEDY))
        for seed in args.seeds:
            results.append(heuristic_select(p, Method.RANDOM_SWAP, seed))
        print(f"n={n}: universe {len(p.universe)}, target {p.target}, {time.perf_counter() - t0:.2f} s", file=sys.stderr)

    text = records_csv(results)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)


if __name__ == "__main__":
    main()
