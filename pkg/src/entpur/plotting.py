"""Figure rendering for Werner sweeps (matplotlib, file output only)."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .werner import SweepRow  # noqa: E402

golden_mean = (np.sqrt(5.0) - 1.0) / 2.0
fig_width = 6.4  # inches
fig_size = [fig_width, fig_width * golden_mean * 1.15]

params = {
    "axes.labelsize": 10,
    "font.size": 9,
    "font.family": "serif",
    "mathtext.fontset": "stix",
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "lines.linewidth": 1.4,
    "figure.figsize": fig_size,
    "savefig.dpi": 150,
}


def _col(rows, name):
    return np.array([np.nan if getattr(r, name) is None else getattr(r, name) for r in rows], dtype=float)


def plot_sweep(rows: Sequence[SweepRow], path, inset_max: float = 0.03) -> Path:
    """E_p estimates and lower bounds versus the Werner weight, with a small-e inset."""
    rows = sorted(rows, key=lambda r: r.e)
    with plt.rc_context(params):
        return _draw(rows, Path(path), inset_max)


def _draw(rows, path: Path, inset_max: float) -> Path:
    e = _col(rows, "e")
    fig, ax = plt.subplots()
    curves = [
        ("ep_2x2", dict(color="C0", lw=1.6, label=r"$E_p$ estimate, $2\times2$ ancillas")),
        ("ep_4x4", dict(color="C3", lw=1.6, label=r"$E_p$ estimate, $4\times4$ ancillas")),
        ("ef", dict(color="k", ls="--", lw=1.2, label=r"$E_f$")),
        ("c_a", dict(color="k", ls=":", lw=1.4, label=r"$C_A$")),
        ("iq_half", dict(color="0.5", ls="-.", lw=1.0, label=r"$I_q/2$")),
    ]
    for name, style in curves:
        ax.plot(e, _col(rows, name), **style)
    ax.set_xlabel("e")
    ax.set_ylabel("bits")
    ax.set_xlim(0.0, 1.0)
    top = np.nanmax([np.nanmax(_col(rows, n)) for n, _ in curves])
    # headroom above the curves holds the legend and the inset
    ax.set_ylim(0.0, 1.6 * max(top, 1e-3))
    ax.set_yticks(np.arange(0.0, top + 0.125, 0.25))
    ax.legend(loc="upper right", fontsize=7, frameon=False)
    small = e <= inset_max
    if np.count_nonzero(small) >= 2:
        ins = ax.inset_axes([0.1, 0.7, 0.4, 0.27])
        ins.plot(e[small], _col(rows, "ep_2x2")[small], color="C0", lw=1.2)
        ins.plot(e[small], _col(rows, "ep_4x4")[small], color="C3", lw=1.2)
        ins.plot(e[small], _col(rows, "ep_best")[small], color="k", lw=0.8, ls="--")
        ins.set_xlim(float(e[small].min()), float(e[small].max()))
        ins.tick_params(labelsize=7)
    fig.savefig(path, bbox_inches="tight", metadata={"Software": None})
    plt.close(fig)
    return path
