"""Confidence-based pruning and the doubling trick on the same instance.

CBP drops candidates whose bootstrap win ratio against the current leader
falls below 1 - alpha. The doubling trick reruns AMBR with a doubled budget
until two runs agree, which avoids choosing T up front.
"""

from ambr import CbpConfig, cbp, exact_mbr, make_rng
from ambr.algorithms import doubling_trick
from ambr.metrics import matrix_oracle
from ambr.synth import PlantedSpec, planted_instance


def main():
    inst, _ = planted_instance(PlantedSpec(n=48, gap=0.25, noise_sigma=0.4, seed=3), id="demo")
    full = inst.n * (inst.n - 1)
    truth = exact_mbr(inst, matrix_oracle(inst)).chosen
    print(f"exact MBR picks {truth} ({full} evaluations)")

    T = full // 4
    # resamples have size N, so a tiny first reference set looks overconfident
    for r0 in (2, 8):
        sel = cbp(inst, matrix_oracle(inst, budget=T), T, CbpConfig(r0=r0, alpha=0.9, B=500),
                  make_rng(1))
        for rec in sel.trace:
            left = len(rec.get("survivors", rec["candidates"]))
            print(f"  CBP r={rec['r']:2d}: leader {rec['incumbent']:2d}, {left} survive")
        print(f"CBP (r0={r0}) picks {sel.chosen} with {sel.evals_used} of {T} evaluations")

    sel = doubling_trick(inst, matrix_oracle(inst), T0=full // 16, cap=full, rng=make_rng(1))
    for rec in sel.trace[:-1]:
        print(f"  doubling run {rec['run']}: T={rec['budget']}, picks {rec['chosen']}")
    print(f"doubling picks {sel.chosen}, converged={sel.converged}, {sel.evals_used} evaluations")


if __name__ == "__main__":
    main()
