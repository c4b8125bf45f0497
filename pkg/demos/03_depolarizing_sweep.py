"""Warm-started sweep over close depolarizing pairs (desk scale).

Runs the two default chains of (alpha, alpha + 0.1) pairs with a modest
circuit and compares each trained success probability with the
diamond-norm bound for two channel uses.
"""

import numpy as np

from chandis.channels import depolarizing
from chandis.diamond import p_diamond
from chandis.vardisc import StrategySpec, sweep_depolarizing


def main():
    spec = StrategySpec("sequential", p=2, r=1, l=6, restarts=1, seed=0)
    print(f"strategy={spec.strategy} p={spec.p} r={spec.r} l={spec.l}\n")
    reports = sweep_depolarizing(spec)
    rng = np.random.default_rng(1)
    for report in reports:
        a0, a1 = report.alpha_pair
        bound = p_diamond(depolarizing(a0), depolarizing(a1), p=2,
                          restarts=8, rng=rng)
        print(f"({a0:.1f}, {a1:.1f}): p_s = {report.best_value:.4f}  "
              f"bound = {bound:.4f}  gap = {bound - report.best_value:+.4f}")


if __name__ == "__main__":
    main()
