#!/usr/bin/env python3
"""Plot the certificate bound against the exact stability boundary.

Feed it the output of `pgrid eigscan`:

    pgrid eigscan cases/case3.json --sweep 0.5:2.5:0.1 --csv scan.csv
    python3 docs/examples/plot_sweep.py scan.csv scan.png
"""
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main() -> int:
    if len(sys.argv) != 3:
        print(__doc__)
        return 2
    df = pd.read_csv(sys.argv[1], comment="#")
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.plot(df["s"], df["neg_lambda"], "o-", label=r"certificate bound $-\lambda$")
    ax.plot(df["s"], df["min_sigma_exact"], "s--", label=r"exact minimal $\sigma$")
    ax.set_xlabel("load scale factor $s$")
    ax.set_ylabel(r"$\sigma$")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(sys.argv[2], dpi=150)
    print(f"wrote {sys.argv[2]}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
