#!/usr/bin/env python3
"""Tail profiles of evaluated sewing words as the truncation level grows.

Each word is read from JSON on the command line, e.g.

    python3 scripts/tail_profiles.py '["trinion"]' '["antitrinion", "trinion"]'
"""

import argparse
import json

from mantlelab import train


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("words", nargs="*", default=['["trinion"]', '["antitrinion", "trinion"]', '["antitrinion", {"perm": [1, 0]}, "trinion"]'])
    ap.add_argument("--levels", type=int, nargs="+", default=[3, 4, 5, 6])
    ap.add_argument("--defect", action="store_true", help="profile defect(trinion, antitrinion) instead")
    args = ap.parse_args()

    if args.defect:
        for N in args.levels:
            p = train.defect(train.FunctorData(N=N), train.trinion(), train.antitrinion())
            print(f"N={N:2d} " + " ".join(f"{t:9.2e}" for t in p.tails))
        return
    for text in args.words:
        m = train.parse_word(json.loads(text))
        print(f"{text}  genus {m.genus}")
        for N in args.levels:
            F = train.FunctorData(N=N)
            prof = train.polycompact_score(F, train.evaluate(F, m))
            flag = "non-compact" if prof.non_compact_like else ""
            print(f"  N={N:2d} " + " ".join(f"{t:9.2e}" for t in prof.tails) + f" {flag}")


if __name__ == "__main__":
    main()
