"""Running lower bound of |mu_hat|^2 over canonical levels, per depth.

For the binary pair the values collapse toward zero (the canonical set is
orthonormal but incomplete); for the scale-4 Cantor measure they settle.
"""

import argparse

from fractal_spectra.spectrum import canonical_levels, delta_estimate
from fractal_spectra.triple import HadamardTriple

TRIPLES = {
    "binary": (2, [0, 1], [0, 1]),
    "cantor4": (4, [0, 2], [0, 1]),
}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--depth", type=int, default=10)
    args = ap.parse_args(argv)
    print("triple,depth,level_min,running_min")
    for name, data in TRIPLES.items():
        T = HadamardTriple.from_data(*data)
        d = delta_estimate(T.pair, canonical_levels(T, args.depth, cap=1 << 22))
        for k, (m, r) in enumerate(zip(d.level_min, d.per_depth), start=1):
            print(f"{name},{k},{m!r},{r!r}")


if __name__ == "__main__":
    main()
