"""Figure rendering for the report path.

The CSV/JSON tables stay the canonical record; figures are a convenience
written next to them.  matplotlib is imported lazily with the Agg
backend so headless runs and library users who never plot pay nothing.
"""

from __future__ import annotations

import os


def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    return plt


def default_plot_path(out_csv: str) -> str:
    root, _ = os.path.splitext(out_csv)
    return root + ".png"


def render_sweep_plot(result, out_path: str) -> str:
    """Log-log errorbar plot of the sweep means with the theory overlay."""
    plt = _pyplot()
    ns = [row.n for row in result.rows]
    means = [row.mean for row in result.rows]
    halfwidths = [2.0 * row.stderr for row in result.rows]
    theory = [row.theory_value for row in result.rows]

    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.errorbar(ns, means, yerr=halfwidths, fmt="o-", capsize=3, label=result.estimator)
    ax.plot(ns, theory, "k--", label="theory")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel("mean statistic")
    slope, _, r2 = result.slope_fit
    ax.set_title(f"{result.config.experiment}: slope {slope:.3f} (r2 {r2:.3f})")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def render_concentration_plot(result, out_path: str) -> str:
    """Histogram of the replicate statistic with the tested threshold."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.hist(result.values, bins=40, alpha=0.8)
    mean = result.check.empirical_mean
    ax.axvline(mean, color="k", linestyle="-", label="mean")
    ax.axvline(mean + result.t, color="r", linestyle="--", label=f"mean + t (t={result.t:.4g})")
    ax.set_xlabel(result.statistic)
    ax.set_ylabel("count")
    ax.set_title(
        f"{result.kind}: {result.check.exceed_count}/{result.replicates} exceed, "
        f"bound {result.bound:.3g}"
    )
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path
