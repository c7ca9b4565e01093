"""Figure rendering for the CLI report paths.

Every function saves a standalone PNG next to the delimited output and
returns the path written.  The Agg backend keeps this usable on headless
machines; nothing here opens a window.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "sweep_figure",
    "eigen_ratio_figure",
    "order_figure",
    "decay_figure",
]


def _finish(fig, path) -> str:
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)


def sweep_figure(report, path) -> str:
    """Quotient blow-up and norm decay panels for one observability sweep."""
    rows = [r for r in report.rows if not r.degenerate]
    inv_h = np.array([1.0 / r.h for r in rows])
    log_q = np.array([r.log_quotient for r in rows])
    log_num = np.log([r.num for r in rows])
    log_den = np.log([r.den for r in rows])

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 3.6))
    ax1.plot(inv_h, log_q, "o-", color="tab:red")
    if len(rows) >= 2:
        coef = np.polyfit(inv_h, log_q, 1)
        xs = np.linspace(inv_h.min(), inv_h.max(), 50)
        ax1.plot(xs, np.polyval(coef, xs), "--", color="gray",
                 label=f"slope {coef[0]:+.3g}")
        ax1.legend(frameon=False)
    ax1.set_xlabel("1/h")
    ax1.set_ylabel("log quotient")
    ax1.set_title(f"{report.equation}: quotient blow-up")

    ax2.plot(inv_h, log_num, "s-", color="tab:blue", label="log num")
    ax2.plot(inv_h, log_den, "o-", color="tab:green", label="log den")
    if len(rows) >= 2:
        coef = np.polyfit(inv_h, log_den, 1)
        xs = np.linspace(inv_h.min(), inv_h.max(), 50)
        ax2.plot(xs, np.polyval(coef, xs), "--", color="gray",
                 label=f"den slope {coef[0]:+.3g}")
    ax2.set_xlabel("1/h")
    ax2.set_ylabel("log norm")
    ax2.set_title(f"eps={report.eps:g}, T={report.T:g}")
    ax2.legend(frameon=False)
    return _finish(fig, path)


def eigen_ratio_figure(xi_values, ratios, path) -> str:
    """Ratio of solved to asymptotic eigenvalue correction against Re xi."""
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    ax.plot(np.real(xi_values), np.abs(ratios), "o-", color="tab:blue")
    ax.axhline(1.0, color="gray", lw=0.8, ls="--")
    ax.set_xlabel("Re xi")
    ax.set_ylabel("solved / asymptotic")
    ax.set_title("eigenvalue correction vs asymptotic")
    return _finish(fig, path)


def order_figure(h_values, errors, order, path, *, ylabel="relative error") -> str:
    """Log-log error decay with the fitted order annotated."""
    h = np.asarray(h_values, dtype=float)
    e = np.asarray(errors, dtype=float)
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    ax.loglog(h, e, "o-", color="tab:red", label="measured")
    ref = e[0] * (h / h[0]) ** order
    ax.loglog(h, ref, "--", color="gray", label=f"order {order:.3g}")
    ax.set_xlabel("h")
    ax.set_ylabel(ylabel)
    ax.legend(frameon=False)
    return _finish(fig, path)


def decay_figure(h_values, log_values, slope, path, *, ylabel) -> str:
    """Log quantity against 1/h with its fitted slope line."""
    inv_h = 1.0 / np.asarray(h_values, dtype=float)
    y = np.asarray(log_values, dtype=float)
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    ax.plot(inv_h, y, "o-", color="tab:blue", label="measured")
    if len(y) >= 2:
        coef = np.polyfit(inv_h, y, 1)
        xs = np.linspace(inv_h.min(), inv_h.max(), 50)
        ax.plot(xs, np.polyval(coef, xs), "--", color="gray",
                label=f"slope {slope:+.3g}")
    ax.set_xlabel("1/h")
    ax.set_ylabel(ylabel)
    ax.legend(frameon=False)
    return _finish(fig, path)
