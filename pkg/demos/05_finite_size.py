"""Why short keys are risky: interval width vs transmission length.

At a fixed interception fraction the error-rate point estimate is unbiased
at any size, but the confidence interval around it shrinks like 1/sqrt(n).
A security policy that compares the interval's upper bound to the threshold
therefore needs a minimum key length before it can ever proceed, even on a
channel that is actually clean.
"""

from bb84sim import CIMethod, run_finite_size_study, threshold_root


def main() -> None:
    n_values = [500, 1_000, 5_000, 10_000, 50_000, 100_000]

    print("attacked channel (f = 0.5): the interval narrows around 0.125")
    print(f"{'qubits':>8}  {'mean qber':>10}  {'mean CI width':>13}")
    for point in run_finite_size_study(0.5, n_values, trials=25):
        print(
            f"{point.n_qubits:>8}  {point.aggregate.mean_qber:>10.6f}"
            f"  {point.ci_width:>13.6f}"
        )

    print()
    threshold = threshold_root()
    print(f"clean channel (f = 0): when does the upper bound clear {threshold:.4f}?")
    print(f"{'qubits':>8}  {'mean CI width':>13}  upper bound below threshold?")
    for point in run_finite_size_study(
        0.0, n_values, trials=25, ci_method=CIMethod.CLOPPER_PEARSON
    ):
        # a clean channel estimates qber 0, so the width is the upper bound
        verdict = "yes" if point.ci_width < threshold else "no"
        print(f"{point.n_qubits:>8}  {point.ci_width:>13.6f}  {verdict}")


if __name__ == "__main__":
    main()
