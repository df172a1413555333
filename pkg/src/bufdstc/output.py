"""CSV and SVG output of experiment results."""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path

from .experiments import COLUMNS, ExperimentResult

__all__ = ["format_value", "results_csv", "emit_results", "write_svg"]


def format_value(v) -> str:
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v)
    v = float(v)
    if math.isnan(v):
        return "nan"
    return f"{v:.10g}"


def results_csv(result: ExperimentResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in result.rows:
        writer.writerow([format_value(v) for v in row.row()])
    return buf.getvalue()


def write_svg(result: ExperimentResult, path) -> Path:
    """Line plot of the result: BER for SNR and size sweeps, latency for delay runs."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    path = Path(path)
    x = result.values or list(result.column("snr_db"))
    fig, ax = plt.subplots(figsize=(6, 4))
    if result.kind == "delay":
        ax.plot(x, result.column("avg_delay_epochs"), "o-")
        ax.set_xlabel("packets")
        ax.set_ylabel("average delay (epochs)")
    else:
        ber = result.column("ber")
        ax.semilogy(x, [b if b > 0 else float("nan") for b in ber], "o-")
        ax.set_xlabel("buffer size J" if result.kind == "bufsize" else "SNR (dB)")
        ax.set_ylabel("BER")
    ax.grid(True, which="both", alpha=0.4)
    fig.tight_layout()
    try:
        fig.savefig(path, format="svg", metadata={"Date": None})
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    finally:
        plt.close(fig)
    return path


def emit_results(result: ExperimentResult, path, svg: bool = False) -> list[Path]:
    """Write ``result`` as CSV to ``path`` (and an SVG next to it if asked)."""
    path = Path(path)
    try:
        path.write_text(results_csv(result), encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    written = [path]
    if svg:
        written.append(write_svg(result, path.with_suffix(".svg")))
    return written
