"""Render sweep results to image files next to the CSV output."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .montecarlo import BerRecord, TheoryRecord

_MARKERS = ("o", "s", "^", "v", "D", "x", "+", "*")


def _log_safe(values):
    """NaN out zeros so semilogy drops the points instead of dying."""
    arr = np.asarray(values, dtype=np.float64)
    return np.where(arr > 0.0, arr, np.nan)


def save_ber_figure(records: list[BerRecord], path) -> None:
    """One semilogy curve per (n, decoder) pair over the SNR axis."""
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    keys = sorted({(r.n, r.decoder) for r in records})
    for k, (n, decoder) in enumerate(keys):
        pts = sorted(
            (r.snr_db, r.ber) for r in records if (r.n, r.decoder) == (n, decoder)
        )
        snr = [p[0] for p in pts]
        ls = "-" if decoder == "optimum" else "--"
        ax.semilogy(
            snr, _log_safe([p[1] for p in pts]),
            ls, marker=_MARKERS[k % len(_MARKERS)], ms=4,
            label=f"N={n} {decoder}",
        )
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("BER")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_theory_figure(records: list[TheoryRecord], path) -> None:
    """Exact convolution (line), approximation (dashed), Monte Carlo (marks)."""
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for k, n in enumerate(sorted({r.n for r in records})):
        rows = sorted((r for r in records if r.n == n), key=lambda r: r.snr_db)
        snr = [r.snr_db for r in rows]
        color = f"C{k % 10}"
        ax.semilogy(snr, _log_safe([r.perr_exact for r in rows]),
                    "-", color=color, label=f"N={n} exact")
        ax.semilogy(snr, _log_safe([r.perr_approx for r in rows]),
                    "--", color=color, label=f"N={n} approx")
        ax.semilogy(snr, _log_safe([r.mc_ber for r in rows]),
                    linestyle="none", marker=_MARKERS[k % len(_MARKERS)],
                    color=color, ms=5, label=f"N={n} sim")
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("error probability")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
