"""Compare the per-trial error-rate distribution with and without an attacker.

Fifty clean trials all land at exactly zero. Fifty fully-attacked trials
cluster tightly around 0.25; the spread is pure binomial sampling noise from
the finite number of compared bits. Prints ASCII histograms; pass --plot to
also draw them with matplotlib if it is installed.
"""

import sys

from bb84sim import run_histogram


def ascii_histogram(hist, label: str) -> None:
    print(label)
    print(f"  mean = {hist.mean:.4f}, std = {hist.std:.4f}, trials = {sum(hist.counts)}")
    peak = max(hist.counts) or 1
    for lo, hi, count in zip(hist.bin_edges, hist.bin_edges[1:], hist.counts):
        if count == 0:
            continue
        bar = "#" * max(1, round(40 * count / peak))
        print(f"  [{lo:.4f}, {hi:.4f})  {count:3d}  {bar}")
    print()


def main() -> None:
    clean = run_histogram(0.0, trials=50, n_qubits=100_000, master_seed=42)
    attacked = run_histogram(1.0, trials=50, n_qubits=100_000, master_seed=42)

    ascii_histogram(clean, "no eavesdropper (f = 0):")
    ascii_histogram(attacked, "full intercept-resend (f = 1):")

    if "--plot" in sys.argv:
        try:
            import matplotlib.pyplot as plt
        except ImportError:
            print("matplotlib not installed; skipping the figure")
            return
        fig, axes = plt.subplots(1, 2, figsize=(10, 4))
        for ax, hist, title in (
            (axes[0], clean, "f = 0"),
            (axes[1], attacked, "f = 1"),
        ):
            ax.stairs(hist.counts, hist.bin_edges, fill=True)
            ax.set_title(title)
            ax.set_xlabel("per-trial error rate")
            ax.set_ylabel("trials")
        fig.tight_layout()
        fig.savefig("qber_histograms.png", dpi=150)
        print("wrote qber_histograms.png")


if __name__ == "__main__":
    main()
