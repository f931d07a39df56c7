"""Spectral criterion against the randomized search oracle on the eigenvalue corpus.

    python3 scripts/cw_corpus.py [--max-n 4] [--draws 100000] [--seed 0]
"""
import argparse

import numpy as np

from pwlab import criteria as cr


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-n", type=int, default=4)
    ap.add_argument("--draws", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    corpus = cr.spectrum_corpus(args.max_n, seed=args.seed)
    disagree = 0
    gap_yes, gap_no = 0.0, np.inf
    for B in corpus:
        verdict = cr.cw_left_invariant(B).yes
        res = cr.random_search_witness(B, draws=args.draws, seed=args.seed)
        if verdict:
            gap_yes = max(gap_yes, res.best)
        else:
            gap_no = min(gap_no, res.best)
        if res.found != verdict:
            disagree += 1
            print("disagreement:", np.round(np.linalg.eigvalsh(B), 6), verdict, res.best)
    print(f"instances {len(corpus)}  disagreements {disagree}")
    print(f"worst yes residual {gap_yes:.2e}  best no residual {gap_no:.2e}")
    return 1 if disagree else 0


if __name__ == "__main__":
    raise SystemExit(main())
