"""SVG line plots for sweeps, noise curves, TE profiles, and traces."""
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def line_plot(path, x, series, xlabel="", ylabel="", title="", logx=False,
              logy=False):
    """One SVG with a labelled line per entry of ``series`` (label -> y)."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, y in series.items():
        ax.plot(x, y, marker="o", markersize=3, label=label)
    if logx:
        ax.set_xscale("log")
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def trace_plot(path, t, target, estimate, var_name="", title=""):
    """Estimate-vs-target overlay for one variable."""
    fig, ax = plt.subplots(figsize=(7, 3))
    ax.plot(t, target, lw=1.0, label=f"{var_name} target")
    ax.plot(t, estimate, lw=0.8, ls="--", label=f"{var_name} estimate")
    ax.set_xlabel("t")
    ax.set_ylabel(var_name)
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
