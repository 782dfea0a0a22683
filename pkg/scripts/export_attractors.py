"""Point clouds of T(R, B) and T(R^T, L) for the planar examples, as CSV."""

import argparse
from pathlib import Path

import numpy as np

from fractal_spectra import latmath as lm
from fractal_spectra.dynamics import attractor_points
from fractal_spectra.triple import AffinePair

EXAMPLES = {
    "zero_set": ([[4, 0], [1, 2]], [[0, 0], [0, 3], [1, 0], [1, 3]], [[0, 0], [2, 0], [0, 1], [2, 1]]),
    "not_simple": ([[2, 1], [0, 2]], [[0, 0], [3, 0], [0, 1], [3, 1]], [[0, 0], [1, 0], [0, 1], [1, 1]]),
}


def write_csv(path: Path, pts: np.ndarray) -> None:
    header = ",".join(f"x{i + 1}" for i in range(pts.shape[1]))
    np.savetxt(path, pts, delimiter=",", fmt="%.17g", header=header, comments="")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--depth", type=int, default=8)
    ap.add_argument("--outdir", default="out")
    args = ap.parse_args(argv)
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    for name, (R, B, L) in EXAMPLES.items():
        for tag, pair in (("RB", AffinePair(R, B)), ("RtL", AffinePair(lm.transpose(lm.as_matrix(R)), L))):
            pts = attractor_points(pair, args.depth)
            path = out / f"{name}_{tag}.csv"
            write_csv(path, pts)
            lo, hi = pts.min(axis=0), pts.max(axis=0)
            print(f"{path}: {len(pts)} points, box {lo.round(4).tolist()} .. {hi.round(4).tolist()}")


if __name__ == "__main__":
    main()
