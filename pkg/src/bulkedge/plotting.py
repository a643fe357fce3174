"""Figure rendering for experiment reports.

Figures are display-only companions to the delimited output; nothing in the
acceptance path depends on them.  All functions write a PNG and return the
path.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_RC = {
    "figure.figsize": (6.0, 4.0),
    "figure.dpi": 140,
    "savefig.dpi": 140,
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.markersize": 3,
}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": "bulkedge"})
    plt.close(fig)
    return str(path)


def spectrum_figure(eigenvalues, path, window=None, mu=None, title="spectrum"):
    """Sorted eigenvalue staircase with the spectral window shaded."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        w = np.sort(np.asarray(eigenvalues))
        ax.plot(np.arange(len(w)), w, ".", color="tab:blue")
        if window is not None:
            ax.axhspan(window[0], window[1], color="tab:orange", alpha=0.25,
                       label="window")
        if mu is not None:
            ax.axhline(mu, color="tab:red", lw=0.8, label="mu")
        ax.set_xlabel("state index")
        ax.set_ylabel("energy")
        ax.set_title(title)
        ax.legend(loc="best")
        return _save(fig, path)


def edge_bands_figure(ks, energies, bottom_weight, path, mu=None,
                      title="ribbon bands"):
    """k-resolved strip spectrum, colored by localization on the bottom edge."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        K = np.repeat(np.asarray(ks)[:, None], energies.shape[1], axis=1)
        sc = ax.scatter(K.ravel(), energies.ravel(), c=bottom_weight.ravel(),
                        s=2, cmap="coolwarm", vmin=0.0, vmax=1.0)
        fig.colorbar(sc, ax=ax, label="bottom-edge weight")
        if mu is not None:
            ax.axhline(mu, color="k", lw=0.8)
        ax.set_xlabel("k along the edge")
        ax.set_ylabel("energy")
        ax.set_title(title)
        return _save(fig, path)


def sample_values_figure(rows, path, title="bulk vs edge per sample"):
    """Per-sample bulk and edge values from a report."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        idx = [r.sample for r in rows]
        bulk = [np.nan if r.bulk_value is None else float(r.bulk_value) for r in rows]
        edge = [np.nan if r.edge_value is None else float(r.edge_value) for r in rows]
        ax.plot(idx, bulk, "o-", label="bulk")
        ax.plot(idx, edge, "s--", label="edge")
        ax.set_xlabel("sample")
        ax.set_ylabel("invariant")
        ax.set_title(title)
        ax.legend(loc="best")
        return _save(fig, path)
