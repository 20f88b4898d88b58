"""Render sweep / chain / region results as matplotlib figures on disk."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

LINK_STYLE = {
    "AB": dict(color="#1f77b4", label=r"$R_{AB}$"),
    "BA": dict(color="#d62728", label=r"$R_{BA}$"),
    "AC": dict(color="#2ca02c", label=r"$R_{AC}$"),
    "CA": dict(color="#9467bd", label=r"$R_{CA}$"),
}

_PARAM_LABEL = {"W": r"$W$", "p": r"$p$", "theta": r"$\theta$ (rad)"}


def plot_sweep(rows, path, title=None):
    """Radii versus the swept parameter; one line per link and method."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    methods = sorted({r["method"] for r in rows})
    for method in methods:
        sel = [r for r in rows if r["method"] == method and r["status"] == "ok"]
        if not sel:
            continue
        xs = np.array([r["param_value"] for r in sel])
        for link, style in LINK_STYLE.items():
            ys = np.array([r[f"R_{link}"] for r in sel])
            ls = "-" if method == "analytic" or len(methods) == 1 else "--"
            label = style["label"] + ("" if len(methods) == 1 else f" ({method})")
            ax.plot(xs, ys, ls, color=style["color"], label=label, lw=1.4)
    ax.axhline(1.0, color="k", ls=":", lw=1.0)
    param = rows[0]["param_name"] if rows else "parameter"
    ax.set_xlabel(_PARAM_LABEL.get(param, param))
    ax.set_ylabel("steering radius")
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize=8, ncol=2)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_chain(report, path, title=None):
    """Forward/backward radii along the chain links."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    idx = np.arange(1, len(report.links) + 1)
    fwd = [rec.r_forward for rec in report.links]
    bwd = [rec.r_backward for rec in report.links]
    ax.plot(idx, fwd, "o-", color="#1f77b4", label="forward (from Alice)")
    ax.plot(idx, bwd, "s-", color="#d62728", label="backward (to Alice)")
    ax.axhline(1.0, color="k", ls=":", lw=1.0)
    ax.set_xticks(idx)
    ax.set_xticklabels([rec.party for rec in report.links])
    ax.set_xlabel("party")
    ax.set_ylabel("steering radius")
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_region(region, path, title=None):
    """Admissible (p1, p2) band of the four-party scenario."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if region.samples:
        p1 = np.array([s[0] for s in region.samples])
        lo = np.array([s[1] for s in region.samples])
        hi = np.array([s[2] for s in region.samples])
        ax.fill_between(p1, lo, hi, alpha=0.35, color="#2ca02c", label="two-way sharing region")
        ax.plot(p1, lo, color="#2ca02c", lw=1.0)
        ax.plot(p1, hi, color="#2ca02c", lw=1.0)
    ax.axvline(region.p1_max, color="k", ls=":", lw=1.0,
               label=rf"$p_1$ bound $\approx$ {region.p1_max:.6f}")
    if region.witness:
        ax.plot([region.witness["p1"]], [region.witness["p2"]], "r*", ms=10, label="witness")
    ax.set_xscale("log")
    ax.set_xlabel(r"$p_1$")
    ax.set_ylabel(r"$p_2$")
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
