"""Matplotlib rendering of scenario outputs.

Figures are written next to the delimited data files with matching stems.
matplotlib is imported lazily so the library can be used without a display
stack; the Agg backend is forced for headless operation.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .core import Grid1D, Grid2D


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def save_amplitude_1d(grid: Grid1D, path: Path, reference=None, title: str = "") -> Path:
    """Line plot of a single-photon amplitude, optionally with a reference curve."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(grid.x, grid.values.real, label="Re amplitude", lw=1.2)
    if np.any(np.abs(grid.values.imag) > 1e-12 * np.max(np.abs(grid.values) + 1e-300)):
        ax.plot(grid.x, grid.values.imag, label="Im amplitude", lw=1.2)
    if reference is not None:
        ax.plot(grid.x, np.real(reference), "k--", lw=0.9, label="closed form")
    ax.set_xlabel("x (units of c/gamma)")
    ax.set_ylabel("amplitude (1/sqrt(length))")
    if title:
        ax.set_title(title)
    ax.legend(frameon=False)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_amplitude_2d(
    grid: Grid2D, path: Path, vmin: float | None = None, vmax: float | None = None,
    title: str = "",
) -> Path:
    """Grayscale map of a two-photon amplitude (real part)."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5.6, 5))
    extent = [grid.x_min, grid.x_max, grid.x_min, grid.x_max]
    im = ax.imshow(
        grid.values.real.T,
        origin="lower",
        extent=extent,
        cmap="gray",
        vmin=vmin,
        vmax=vmax,
        interpolation="nearest",
        aspect="equal",
    )
    fig.colorbar(im, ax=ax, label="amplitude (1/length)")
    ax.set_xlabel("x1 (units of c/gamma)")
    ax.set_ylabel("x2 (units of c/gamma)")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_spectra(k: np.ndarray, curves: dict[str, np.ndarray], path: Path, title: str = "") -> Path:
    """Overlayed spectral lines on a common k grid."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4))
    styles = ["-", "--", ":", "-."]
    for style, (label, values) in zip(styles * 4, curves.items()):
        ax.plot(k, values, style, lw=1.4, label=label)
    ax.set_xlabel("k (units of gamma/c)")
    ax.set_ylabel("intensity per unit k")
    if title:
        ax.set_title(title)
    ax.legend(frameon=False)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_pair_coefficients(
    ns: np.ndarray, measured: np.ndarray, analytic: np.ndarray, path: Path, title: str = ""
) -> Path:
    """Measured anti-diagonal pair amplitudes against the analytic Lorentzian."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(ns, measured, "o", ms=3, label="measured")
    ax.plot(ns, analytic, "k--", lw=1.0, label="Lorentzian form")
    ax.set_xlabel("mode index n (k = 2 pi n / L)")
    ax.set_ylabel("pair amplitude")
    if title:
        ax.set_title(title)
    ax.legend(frameon=False)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
