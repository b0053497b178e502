from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .runner import ResultRow, aggregate  # noqa: E402

STYLE = {"linear": ("tab:orange", "^"), "bfgs": ("tab:blue", "o"), "mcts": ("tab:red", "s")}


def plot_results(rows: Sequence[ResultRow], outdir) -> list[Path]:
    """Fidelity vs T and N_fev vs T, one line per (method, M); returns the SVG paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    summary = aggregate(rows)
    series: dict[tuple[str, int], list] = {}
    for s in summary:
        series.setdefault((s.method, s.M), []).append(s)

    paths = []
    for fname, ylabel, getter, err in (
        ("fidelity_vs_T.svg", "fidelity", lambda s: s.mean_fidelity, lambda s: s.std_fidelity),
        ("nfev_vs_T.svg", "function evaluations", lambda s: s.mean_nfev, None),
    ):
        fig, ax = plt.subplots(figsize=(5, 4))
        drawn_linear = False
        for (method, M), pts in sorted(series.items()):
            # the linear schedule ignores M, so one curve is enough
            if method == "linear":
                if drawn_linear:
                    continue
                drawn_linear = True
            color, marker = STYLE.get(method, ("k", "x"))
            label = method if method == "linear" else f"{method} M={M}"
            ax.errorbar([p.T for p in pts], [getter(p) for p in pts],
                        yerr=[err(p) for p in pts] if err else None,
                        color=color, marker=marker, capsize=2, label=label)
        ax.set_xscale("log")
        if ylabel != "fidelity":
            ax.set_yscale("log")
        ax.set_xlabel("annealing time T")
        ax.set_ylabel(ylabel)
        ax.legend(fontsize="small")
        fig.tight_layout()
        path = outdir / fname
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
        paths.append(path)
    return paths
