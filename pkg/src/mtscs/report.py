"""Benchmark output: CSV and JSON tables plus matplotlib figures."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .bench import BenchReport  # noqa: E402

FIELDS = ("map_index", "seed", "start", "goal", "length_a", "length_b", "length_ratio",
          "time_a", "time_b", "time_ratio", "nodes_a", "nodes_b", "node_ratio")


def write_csv(report: BenchReport, path, delimiter: str = ",") -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=FIELDS, delimiter=delimiter, extrasaction="ignore")
        w.writeheader()
        for r in report.records:
            row = r.row()
            row["start"] = " ".join(f"{v:g}" for v in row["start"])
            row["goal"] = " ".join(f"{v:g}" for v in row["goal"])
            w.writerow(row)


def write_figures(report: BenchReport, out_dir) -> list[Path]:
    out = Path(out_dir)
    idx = [r.map_index for r in report.records]
    s = report.summary()
    paths = []

    fig, ax = plt.subplots(figsize=(7, 3.2))
    ax.bar(idx, [r.length_ratio for r in report.records], color="#1f77b4")
    ax.axhline(1.0, color="k", lw=0.8)
    ax.axhline(s["length_ratio_avg"], color="#d62728", ls="--", lw=1.0,
               label=f"mean {s['length_ratio_avg']:.3f}")
    ax.set_xlabel("map")
    ax.set_ylabel(f"L({report.name_a}) / L({report.name_b})")
    ax.legend(loc="lower right")
    fig.tight_layout()
    paths.append(out / "length_ratio.png")
    fig.savefig(paths[-1], dpi=120, metadata={"Software": None})
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    ax.scatter([r.nodes_b for r in report.records], [r.nodes_a for r in report.records], s=14)
    top = max([1] + [max(r.nodes_a, r.nodes_b) for r in report.records])
    ax.plot([1, top], [1, top], color="k", lw=0.8)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(f"expansions, {report.name_b}")
    ax.set_ylabel(f"expansions, {report.name_a}")
    fig.tight_layout()
    paths.append(out / "expansions.png")
    fig.savefig(paths[-1], dpi=120, metadata={"Software": None})
    plt.close(fig)
    return paths


def write_report(report: BenchReport, out_dir, delimiter: str = ",") -> list[Path]:
    """``bench.csv``, ``bench.json`` and the figures, all under ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(report, out / "bench.csv", delimiter)
    doc = {"summary": report.summary(), "records": [r.row() for r in report.records]}
    (out / "bench.json").write_text(json.dumps(doc, indent=1) + "\n")
    return [out / "bench.csv", out / "bench.json", *write_figures(report, out)]
