"""Figure rendering for the CLI report path.

Each experiment kind gets one matplotlib figure saved next to its CSV.
The CSV/JSON tables remain the data product; figures are a reading aid.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .experiments import ExperimentResult


def render_figure(result: ExperimentResult, path: str) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    kind = result.kind
    if kind == "mc_expected_norm":
        ax.hist(result.column("value"), bins=24, color="steelblue", alpha=0.85)
        ax.axvline(result.summary["mean"], color="crimson", label="mean")
        ax.set_xlabel("estimated norm")
        ax.set_ylabel("trials")
        ax.legend()
    elif kind == "bound_ratio_sweep":
        ds = sorted(set(result.column("d")))
        means = {d: None for d in ds}
        by_bound: dict = {}
        for d, mean, _se, name, bval, _ratio in result.rows:
            means[d] = mean
            by_bound.setdefault(name, {})[d] = bval
        ax.loglog(ds, [means[d] for d in ds], "o-", color="black", label="measured mean")
        for name, vals in sorted(by_bound.items()):
            ax.loglog(ds, [vals[d] for d in ds], "--", label=f"{name} (C=1)")
        ax.set_xlabel("d")
        ax.set_ylabel("norm")
        ax.legend(fontsize=8)
    elif kind == "pca_detection":
        lams = np.array(result.column("lam"))
        vals = np.array(result.column("value"))
        for lam in sorted(set(lams)):
            sel = vals[lams == lam]
            ax.scatter([lam] * len(sel), sel, s=8, alpha=0.5, color="steelblue")
        ax.axhline(result.summary["null_max"], color="crimson", ls="--", label="null max")
        ax.set_xlabel("lambda")
        ax.set_ylabel("norm")
        ax.legend()
    elif kind == "covering_probe":
        eps = result.column("eps")
        ax.semilogy(eps, result.column("packing_count"), "o-", label="packing count")
        ax.semilogy(eps, result.column("slepian_bound"), "--", label="Slepian curve")
        ax.semilogy(eps, result.column("volumetric_bound"), ":", label="volumetric curve")
        ax.set_xlabel("epsilon")
        ax.set_ylabel("count")
        ax.legend(fontsize=8)
    else:  # checks: margins per named property
        names = result.column("name")
        margins = result.column("margin")
        ok = result.column("passed")
        colors = ["seagreen" if flag else "crimson" for flag in ok]
        ax.barh(range(len(names)), margins, color=colors)
        ax.set_yticks(range(len(names)))
        ax.set_yticklabels(names, fontsize=6)
        ax.set_xlabel("margin")
    ax.set_title(kind)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
