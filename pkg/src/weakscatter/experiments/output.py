"""Deterministic CSV, SVG and report emission."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import IoError

__all__ = [
    "emit_heatmap_csv",
    "emit_table_csv",
    "emit_heatmap_svg",
    "emit_marginal_svg",
    "read_heatmap_csv",
]


def _fmt(x) -> str:
    """Shortest round-trip decimal form; bit-identical across runs."""
    return repr(float(x))


def emit_heatmap_csv(data, axes, path) -> Path:
    """Write a 2D density as `axis1,axis2,density` rows in row-major order.

    ``axes`` is ((name1, coords1), (name2, coords2)).  The header line
    records the axis names.
    """
    data = np.asarray(data)
    (name_a, coords_a), (name_b, coords_b) = axes
    if data.size == 0:
        raise IoError("no data")
    if data.shape != (len(coords_a), len(coords_b)):
        raise IoError(
            f"data shape {data.shape} does not match axes "
            f"({len(coords_a)}, {len(coords_b)})"
        )
    path = Path(path)
    try:
        with path.open("w", newline="\n") as fh:
            fh.write(f"# axis1={name_a} axis2={name_b}\n")
            for i, a in enumerate(coords_a):
                for j, b in enumerate(coords_b):
                    fh.write(f"{_fmt(a)},{_fmt(b)},{_fmt(data[i, j])}\n")
    except OSError as exc:
        raise IoError(str(exc)) from exc
    return path


def read_heatmap_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Re-parse a heatmap CSV into (axis1 values, axis2 values, flat density)."""
    rows = np.loadtxt(path, delimiter=",", comments="#")
    return rows[:, 0], rows[:, 1], rows[:, 2]


def emit_table_csv(path, header: list[str], rows) -> Path:
    """Write a plain CSV table with a column-name header line."""
    path = Path(path)
    rows = list(rows)
    if not rows:
        raise IoError("no data")
    try:
        with path.open("w", newline="\n") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(x) for x in row) + "\n")
    except OSError as exc:
        raise IoError(str(exc)) from exc
    return path


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    matplotlib.rcParams["svg.hashsalt"] = "weakscatter"
    import matplotlib.pyplot as plt

    return plt


def emit_heatmap_svg(data, axes, path, title: str = "") -> Path:
    plt = _pyplot()
    (name_a, coords_a), (name_b, coords_b) = axes
    fig, ax = plt.subplots(figsize=(5.0, 4.2))
    # pcolormesh expects the first data axis vertical; show axis1 along x.
    mesh = ax.pcolormesh(coords_a, coords_b, np.asarray(data).T, shading="auto")
    ax.set_xlabel(name_a)
    ax.set_ylabel(name_b)
    if title:
        ax.set_title(title)
    fig.colorbar(mesh, ax=ax)
    fig.tight_layout()
    try:
        fig.savefig(path, format="svg", metadata={"Date": None})
    except OSError as exc:
        raise IoError(str(exc)) from exc
    finally:
        plt.close(fig)
    return Path(path)


def emit_marginal_svg(curves, path, xlabel: str, title: str = "") -> Path:
    """curves: iterable of (label, x, y)."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    for label, x, y in curves:
        ax.plot(x, y, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("density")
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    try:
        fig.savefig(path, format="svg", metadata={"Date": None})
    except OSError as exc:
        raise IoError(str(exc)) from exc
    finally:
        plt.close(fig)
    return Path(path)
