"""Output writers for the command line tools.

Every data file starts with a parameter-echo header so a result can be traced
back to the exact invocation that produced it.  CSV carries the header as
``#``-prefixed comment lines; JSON mirrors the same schema in a ``metadata``
object.  Figures are rendered with the Agg backend next to the data file.
"""

from __future__ import annotations

import json
from pathlib import Path

from . import __version__


def format_value(value) -> str:
    """Deterministic cell formatting: %.12g for floats, str otherwise."""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return "%.12g" % value
    return str(value)


def metadata_block(command: str, params: dict) -> dict:
    meta = {"artifact": "photonscope", "version": __version__, "command": command}
    meta.update(params)
    return meta


def write_csv(path, columns: list[str], rows, metadata: dict) -> None:
    path = Path(path)
    lines = [f"# {key} = {format_value(value)}" for key, value in metadata.items()]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(format_value(cell) for cell in row))
    path.write_text("\n".join(lines) + "\n")


def write_json(path, columns: list[str], rows, metadata: dict) -> None:
    path = Path(path)
    payload = {
        "metadata": metadata,
        "columns": columns,
        "rows": [list(row) for row in rows],
    }
    path.write_text(json.dumps(payload, indent=2, default=float) + "\n")


def write_table(path, fmt: str, columns: list[str], rows, metadata: dict) -> None:
    if fmt == "csv":
        write_csv(path, columns, rows, metadata)
    elif fmt == "json":
        write_json(path, columns, rows, metadata)
    else:
        raise ValueError(f"unknown format {fmt!r}")


def figure_path(data_path) -> Path:
    return Path(data_path).with_suffix(".png")


def render_figure(
    data_path,
    x,
    series: dict[str, list[float]],
    xlabel: str,
    ylabel: str,
    title: str,
    logy: bool = False,
) -> Path:
    """Render line series to a PNG next to the data file and return its path."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out = figure_path(data_path)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for label, ys in series.items():
        ax.plot(x, ys, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    if logy:
        ax.set_yscale("log")
    if len(series) > 1:
        ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out
