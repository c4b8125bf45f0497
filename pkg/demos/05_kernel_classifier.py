"""Kernel SVM classification of depolarization-strength intervals.

Uses the trace-product kernel Tr(rho_i rho_j)^n with an SMO-trained dual.
The alternating-quarters interval set I4 is not separable with one copy
(n=1) but becomes easy with n=3; random mixed probe states degrade the
single-copy kernel similarly.
"""

from chandis.ksvm import intervals_I, run_experiment


def main():
    for k in (1, 2):
        out = run_experiment(intervals_I(k), "plus", 1, n_train=100,
                             n_test=500, seed=5)
        print(f"I{k}, |+> input, n=1: accuracy {out['accuracy']:.3f} "
              f"(converged={out['converged']})")

    for n in (1, 3):
        out = run_experiment(intervals_I(4), "plus", n, n_train=100,
                             n_test=500, seed=5)
        print(f"I4, |+> input, n={n}: accuracy {out['accuracy']:.3f} "
              f"(converged={out['converged']})")

    print("\nI1 with random mixed inputs:")
    for n in (1, 2, 3):
        out = run_experiment(intervals_I(1), "random-mixed", n, n_train=100,
                             n_test=500, seed=9)
        print(f"  n={n}: accuracy {out['accuracy']:.3f}")


if __name__ == "__main__":
    main()
