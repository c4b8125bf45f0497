"""Diamond-norm baselines for the two channel families.

Computes the discrimination bound p_diamond = 1/2 + ||Phi0 - Phi1||_d / 4
for the entanglement-breaking pair (one and two parallel uses) and for
close depolarizing pairs, and shows the symmetry of the depolarizing map
about alpha0 = alpha1.
"""

import numpy as np

from chandis.channels import depolarizing, eb_channel_A, eb_channel_B
from chandis.diamond import diamond_norm, p_diamond


def main():
    rng = np.random.default_rng(0)
    phi_a, phi_b = eb_channel_A(), eb_channel_B()

    est = diamond_norm(phi_a, phi_b, restarts=20, rng=rng)
    print("EB pair, single use:")
    print(f"  ||Phi_A - Phi_B||_diamond = {est.value:.6f}")
    print(f"  Choi lower bound          = {est.choi_lower_bound:.6f}")
    print(f"  p_diamond                 = {0.5 + est.value / 4:.6f}")

    p2 = p_diamond(phi_a, phi_b, p=2, restarts=20, rng=rng)
    print(f"EB pair, two parallel uses: p_diamond = {p2:.6f}")

    print("\nDepolarizing pairs (two uses):")
    for a0, a1 in ((0.0, 0.1), (0.45, 0.55), (0.9, 1.0)):
        v = p_diamond(depolarizing(a0), depolarizing(a1), p=2,
                      restarts=10, rng=rng)
        print(f"  ({a0:.2f}, {a1:.2f}): p_diamond = {v:.4f}")
    print("note the (0.0,0.1) vs (0.9,1.0) symmetry")


if __name__ == "__main__":
    main()
