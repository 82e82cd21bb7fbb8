#!/usr/bin/env python3
"""Associativity and Mobius-match error of the welding product against the mode count."""

import argparse
import random
import time

import numpy as np

from mantlelab import mobius, welding


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--modes", type=int, nargs="+", default=[32, 48, 64, 96])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"{'M':>4} {'assoc':>10} {'mobius':>10} {'split':>10} {'sec':>6}")
    for M in args.modes:
        cfg = welding.WeldConfig(modes=M)
        start = time.perf_counter()
        rng = np.random.default_rng(args.seed)
        x, y, z = (welding.random_element(rng, M) for _ in range(3))
        try:
            assoc = welding.multiply(welding.multiply(x, y, cfg), z, cfg).distance(welding.multiply(x, welding.multiply(y, z, cfg), cfg))
            n = welding.split_count(x.q.compose(y.p), y.t, cfg)
            split = welding.multiply(x, y, cfg, split=n).distance(welding.multiply(x, y, cfg, split=2 * n))
        except welding.NumericError as exc:
            print(f"{M:4d} unresolved: {exc}")
            continue
        f, g = (welding.random_weldable_mantle(random.Random(args.seed + k)) for k in (1, 2))
        mob = welding.multiply(welding.from_mobius(f, M), welding.from_mobius(g, M), cfg).distance(welding.from_mobius(mobius.compose(f, g), M))
        print(f"{M:4d} {assoc:10.2e} {mob:10.2e} {split:10.2e} {time.perf_counter() - start:6.1f}")


if __name__ == "__main__":
    main()
