"""Figure builders: energy maps, axis lineouts, and convergence plots."""

import csv

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .reader import FieldReadError, axes_1d, energy_map, extent, read_field


def plot_field(path, out, style="linear", floor=1e-10):
    """Render the energy map of one field file to a raster image."""
    meta, data = read_field(path)
    e = energy_map(meta, data)
    fig, ax = plt.subplots(figsize=(6.0, 5.0))
    if style == "log10":
        img = np.log10(np.maximum(e, floor))
        label = "log10 E"
    elif style == "linear":
        img = e
        label = "E"
    else:
        raise ValueError(f"unknown style {style!r}")
    # imshow wants (row, col) = (y, x) with the y origin at the bottom
    im = ax.imshow(img.T, origin="lower", extent=extent(meta), aspect="equal")
    fig.colorbar(im, ax=ax, label=label)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(f"{meta.get('scheme', '')} {meta.get('resolution', '')} "
                 f"t = {meta['time']:g}")
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def plot_lineout(paths, out, axis="x", oracle=None):
    """Overlay E along the chosen axis through the domain center."""
    if not paths:
        raise ValueError("no input field files")
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ref_meta = None
    for path in paths:
        meta, data = read_field(path)
        e = energy_map(meta, data)
        if ref_meta is None:
            ref_meta = meta
        elif (meta["nx"], meta["ny"], meta["dx"], meta["dy"]) != (
            ref_meta["nx"], ref_meta["ny"], ref_meta["dx"], ref_meta["dy"]
        ):
            raise FieldReadError(f"{path}: grid differs from {paths[0]}")
        x, y = axes_1d(meta)
        if axis == "x":
            ax.plot(x, e[:, meta["ny"] // 2], label=str(path))
        else:
            ax.plot(y, e[meta["nx"] // 2, :], label=str(path))
    if oracle is not None:
        meta, data = read_field(oracle)
        e = energy_map(meta, data)
        x, y = axes_1d(meta)
        if axis == "x":
            ax.plot(x, e[:, meta["ny"] // 2], "k--", label="exact")
        else:
            ax.plot(y, e[meta["nx"] // 2, :], "k--", label="exact")
    ax.set_xlabel(axis)
    ax.set_ylabel("E")
    ax.legend(fontsize=7)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def read_error_table(path):
    """CSV with header and columns N, error; returns two float arrays."""
    ns, errs = [], []
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or len(rows[0]) < 2:
        raise ValueError(f"{path}: expected a two-column CSV with a header")
    for row in rows[1:]:
        if not row:
            continue
        try:
            ns.append(float(row[0]))
            errs.append(float(row[1]))
        except ValueError as exc:
            raise ValueError(f"{path}: malformed row {row!r}") from exc
    if not ns:
        raise ValueError(f"{path}: no data rows")
    return np.array(ns), np.array(errs)


def plot_convergence(table_path, out):
    """Log-log error vs angular resolution with a slope -1/2 guide triangle."""
    n, err = read_error_table(table_path)
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    ax.loglog(n, err, "o-", label="L1 error")
    if len(n) >= 2:
        slope = np.polyfit(np.log(n), np.log(err), 1)[0]
        ax.set_title(f"fitted slope {slope:.3f}")
        # guide triangle with hypotenuse of slope -1/2 anchored at the
        # first data point
        n0, n1 = n[0], n[-1]
        e0 = err[0] * 1.3
        e1 = e0 * (n1 / n0) ** -0.5
        ax.loglog([n0, n1, n1, n0], [e0, e1, e0, e0], "k:", lw=1,
                  label="slope -1/2")
    ax.set_xlabel("N")
    ax.set_ylabel("L1 error")
    ax.legend(fontsize=8)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out
