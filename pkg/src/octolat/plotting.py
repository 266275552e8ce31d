"""Figures for convergence reports and kernel estimate scans.

Rendering uses the non-interactive Agg backend and strips the PNG metadata
that would otherwise embed the matplotlib version, so equal inputs give
equal files.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

_PNG_META = {"Software": None}


def _save(fig, path):
    fig.savefig(path, dpi=120, metadata=_PNG_META)
    plt.close(fig)


def convergence_figure(report, path, title=None):
    """Log-log plot of the sup-error, max |D^h f| and the domain metrics against h."""
    hs = [r.h for r in report.rows]
    fig, (left, right) = plt.subplots(1, 2, figsize=(9, 3.8), constrained_layout=True)
    for column, marker in (("sup_error", "o"), ("dhf_max", "s")):
        vals = [getattr(r, column) for r in report.rows]
        if all(v > 0 for v in vals):
            left.loglog(hs, vals, marker=marker, label=column)
    left.set_xlabel("h")
    left.set_title("approximation")
    for k in range(1, 5):
        right.plot(hs, [getattr(r, f"metric{k}") for r in report.rows], marker="o", label=f"metric{k}")
    right.set_xscale("log")
    right.set_xlabel("h")
    right.set_title("domain distances")
    for ax in (left, right):
        ax.set_xticks(hs, [f"{h:g}" for h in hs])
        ax.minorticks_off()
        ax.invert_xaxis()
        ax.grid(True, which="both", alpha=0.3)
        if ax.get_legend_handles_labels()[0]:
            ax.legend(fontsize=8)
    if title:
        fig.suptitle(title, fontsize=10)
    _save(fig, path)


def estimate_figure(scan, path):
    """Per-shell maxima of the weighted kernel deviation for both weights."""
    shells = [s["shell"] for s in scan["shells"]]
    fig, ax = plt.subplots(figsize=(5, 3.8), constrained_layout=True)
    ax.semilogy(shells, [s["max_omega"] for s in scan["shells"]], marker="o", label="omega weight")
    ax.semilogy(shells, [s["max_parity"] for s in scan["shells"]], marker="s", label="parity weight")
    ax.set_xlabel("shell |x|_inf")
    ax.set_ylabel("max |E1 - wE| (|x|^8 + 1)")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    _save(fig, path)
