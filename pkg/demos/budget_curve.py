"""Error rate against budget for AMBR, AMBR-Replace and N-by-S.

Error means disagreeing with exact MBR. Run time is around ten seconds.
"""

import numpy as np

from ambr import ambr, ambr_replace, exact_mbr, make_rng, nbys
from ambr.harness import budget_for
from ambr.metrics import matrix_oracle
from ambr.synth import planted_corpus

FRACTIONS = [1 / 32, 1 / 16, 1 / 8, 1 / 4, 1 / 2]
METHODS = {"ambr": ambr, "ambr_replace": ambr_replace, "nbys": nbys}


def main(count=100, n=64, seeds=3):
    corpus = planted_corpus(count, n, gap=0.2, noise=0.5, seed=7)
    wrong = {name: np.zeros(len(FRACTIONS)) for name in METHODS}
    for inst, _ in corpus:
        truth = exact_mbr(inst, matrix_oracle(inst)).chosen
        for f, frac in enumerate(FRACTIONS):
            T = budget_for(frac, n)
            for seed in range(seeds):
                for name, fn in METHODS.items():
                    sel = fn(inst, matrix_oracle(inst, budget=T), T, make_rng(seed, name, f, inst.id))
                    wrong[name][f] += sel.chosen != truth

    print("fraction  " + "  ".join(f"{name:>12}" for name in METHODS))
    for f, frac in enumerate(FRACTIONS):
        row = "  ".join(f"{wrong[name][f] / (count * seeds):12.3f}" for name in METHODS)
        print(f"{frac:<9.4g} {row}")


if __name__ == "__main__":
    main()
