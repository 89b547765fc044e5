"""Results CSV read/write and the BER / data-rate SVG charts."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, fields
from pathlib import Path

from .studies import ResultRow

CSV_COLUMNS = tuple(f.name for f in fields(ResultRow))
_INT_COLUMNS = {"model", "boundary_set", "trial", "resets", "seed"}
_FLOAT_COLUMNS = {"snr_db", "ber", "data_rate", "occ_p1", "occ_p2", "occ_p3", "occ_p4"}


def _fmt(v) -> str:
    return repr(float(v)) if isinstance(v, float) else str(v)


def write_csv(rows: list[ResultRow], path: str | Path) -> Path:
    path = Path(path)
    if not rows:
        raise ValueError(f"refusing to write an empty results table to {path}")
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_COLUMNS)
            for r in rows:
                w.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc
    return path


def read_csv(path: str | Path) -> list[ResultRow]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        rows = []
        for rec in reader:
            vals = {}
            for c in CSV_COLUMNS:
                if c in _INT_COLUMNS:
                    vals[c] = int(rec[c])
                elif c in _FLOAT_COLUMNS:
                    vals[c] = float(rec[c])
                else:
                    vals[c] = rec[c]
            rows.append(ResultRow(**vals))
    return rows


def _series_key(row: ResultRow, study: str) -> str:
    if study == "boundaries":
        return f"boundary set {row.boundary_set}"
    if study == "models":
        return f"model {row.model}"
    return row.mode


def plot_rows(rows: list[ResultRow], stem: str | Path) -> list[Path]:
    """Write ``<stem>_ber.svg`` (log y) and ``<stem>_rate.svg`` (linear y)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "adaptive-pilot"
    study = rows[0].study
    series: dict[str, list[ResultRow]] = {}
    for r in rows:
        series.setdefault(_series_key(r, study), []).append(r)

    written = []
    for metric, ylabel, suffix, logy in (
        ("ber", "BER", "ber", True),
        ("data_rate", "data-rate fraction", "rate", False),
    ):
        fig, ax = plt.subplots(figsize=(6, 4))
        for name, pts in series.items():
            pts = sorted(pts, key=lambda r: r.snr_db)
            ys = [getattr(p, metric) for p in pts]
            if logy:
                ys = [y if y > 0 else float("nan") for y in ys]
            ax.plot([p.snr_db for p in pts], ys, marker="o", label=name)
        if logy:
            ax.set_yscale("log")
        ax.set_xlabel("SNR (dB)")
        ax.set_ylabel(ylabel)
        ax.grid(True, which="both", alpha=0.3)
        ax.legend()
        out = Path(f"{stem}_{suffix}.svg")
        fig.savefig(out, format="svg", metadata={"Date": None})
        plt.close(fig)
        written.append(out)
    return written


def emit_results(rows: list[ResultRow], path: str | Path, *, summary=None, meta: dict | None = None, figures: bool = True) -> list[Path]:
    """Write the results CSV at ``path`` plus charts and an optional metadata sidecar.

    Charts are drawn from ``summary`` when given (pooled rows), else from ``rows``.
    """
    path = Path(path)
    if not rows:
        raise ValueError("no result rows to emit (empty SNR grid?)")
    written = [write_csv(rows, path)]
    stem = path.with_suffix("")
    if meta is not None:
        side = Path(f"{stem}_config.json")
        side.write_text(json.dumps(meta, indent=2, sort_keys=True, default=str) + "\n")
        written.append(side)
    if figures:
        written += plot_rows(list(summary) if summary else rows, stem)
    return written


def row_dict(row: ResultRow) -> dict:
    return asdict(row)
