"""Report and figure-data writers for the generalization experiment.

All CSV files are deterministic for a fixed config and seed: rows are
sorted, floats are printed with a fixed scientific format and no
timestamps appear.  Relative errors above 1.0 are clamped in the
figure data only; the report keeps the raw values.
"""

import json

import numpy as np

__all__ = [
    "REPORT_COLUMNS",
    "write_report_csv",
    "write_figure_data",
    "write_summary",
    "PLOT_SCRIPT",
]

# Column order of the long-format report.
REPORT_COLUMNS = ("method", "two_k", "mu_index", "lambda", "mu_lame",
                  "metric", "value")

# Metric order within one cell.
_CELL_METRICS = ("status", "reason", "rel_err", "e_l2", "o_v", "s_v",
                 "drift_max", "preserved")

# Plotting clamp for relative errors.
CLAMP = 1.0


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.16e}"


def write_report_csv(path, report):
    """Long format: one row per (method, size, parameter, metric)."""
    with open(path, "w", newline="") as fh:
        fh.write(",".join(REPORT_COLUMNS) + "\n")
        for row in report.rows:
            lam, mul = row.mu
            for metric in _CELL_METRICS:
                value = getattr(row, metric)
                fh.write(",".join((
                    row.method, str(row.two_k), str(row.mu_index),
                    _fmt(lam), _fmt(mul), metric, _fmt(value),
                )) + "\n")


def _boxplot_stats(values):
    """Quartiles (linear interpolation), 1.5 IQR whiskers, outliers."""
    values = np.sort(np.asarray(values, dtype=float))
    q1, med, q3 = np.percentile(values, [25.0, 50.0, 75.0],
                                method="linear")
    iqr = q3 - q1
    in_lo = values[values >= q1 - 1.5 * iqr]
    in_hi = values[values <= q3 + 1.5 * iqr]
    lo = float(in_lo[0]) if in_lo.size else float(values[0])
    hi = float(in_hi[-1]) if in_hi.size else float(values[-1])
    outliers = values[(values < lo) | (values > hi)]
    return q1, med, q3, lo, hi, outliers


def write_figure_data(outdir, report):
    """Figure-ready CSV files next to the report."""
    outdir.mkdir(parents=True, exist_ok=True)

    with open(outdir / "fig_projection_error.csv", "w", newline="") as fh:
        fh.write("method,two_k,e_l2\n")
        for (method, two_k) in sorted(report.e_l2):
            fh.write(f"{method},{two_k},{_fmt(report.e_l2[(method, two_k)])}"
                     "\n")

    with open(outdir / "fig_spectra.csv", "w", newline="") as fh:
        fh.write("series,index,value\n")
        for name, values in (
            ("singular", report.singular_values),
            ("symplectic_singular", report.symplectic_singular_values),
            ("weighted_symplectic", report.weighted_values),
        ):
            for i, v in enumerate(values):
                fh.write(f"{name},{i},{_fmt(v)}\n")

    with open(outdir / "fig_preservation.csv", "w", newline="") as fh:
        fh.write("method,two_k,preserved,total\n")
        counts = report.preservation_counts()
        for (method, two_k) in sorted(counts):
            ok, total = counts[(method, two_k)]
            fh.write(f"{method},{two_k},{ok},{total}\n")

    with open(outdir / "fig_relative_error.csv", "w", newline="") as fh:
        fh.write("method,two_k,q1,median,q3,whisker_lo,whisker_hi,"
                 "outliers\n")
        grouped = {}
        for row in report.rows:
            if row.status != "ok" or not np.isfinite(row.rel_err):
                continue
            grouped.setdefault((row.method, row.two_k), []).append(
                min(row.rel_err, CLAMP))
        for key in sorted(grouped):
            q1, med, q3, lo, hi, outliers = _boxplot_stats(grouped[key])
            joined = "|".join(_fmt(v) for v in outliers)
            fh.write(",".join((
                key[0], str(key[1]), _fmt(q1), _fmt(med), _fmt(q3),
                _fmt(lo), _fmt(hi), joined,
            )) + "\n")

    with open(outdir / "fig_hamiltonian_evolution.csv", "w",
              newline="") as fh:
        fh.write("method,two_k,mu_index,time_index,value\n")
        for row in report.rows:
            if row.ham_profile is None:
                continue
            for i, v in enumerate(row.ham_profile):
                fh.write(f"{row.method},{row.two_k},{row.mu_index},{i},"
                         f"{_fmt(v)}\n")


def write_summary(path, report, cfg, wall_seconds):
    """JSON summary; wall-clock fields vary between runs by design."""
    medians = {}
    for method in report.methods:
        for two_k in report.sweep:
            vals = [
                row.rel_err for row in report.rows
                if row.method == method and row.two_k == two_k
                and row.status == "ok" and np.isfinite(row.rel_err)
            ]
            if vals:
                medians[f"{method}@{two_k}"] = float(np.median(vals))
    counts = {
        f"{m}@{k}": {"preserved": ok, "total": total}
        for (m, k), (ok, total) in sorted(
            report.preservation_counts().items())
    }
    summary = {
        "methods": list(report.methods),
        "sweep": list(report.sweep),
        "autonomous": report.autonomous,
        "n_test": int(report.test_params.shape[0]),
        "median_rel_err": medians,
        "preservation": counts,
        "basis_failures": {
            f"{m}@{k}": reason
            for (m, k), reason in sorted(report.basis_failures.items())
        },
        "failed_cells": sum(r.status != "ok" for r in report.rows),
        "wall_seconds": wall_seconds,
        "config": cfg,
    }
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


PLOT_SCRIPT = '''\
#!/usr/bin/env python3
"""Render the figure-data CSV files written by the evaluate command.

Reads from the directory it sits in and writes PNG files next to the
data.  Requires matplotlib.
"""

import csv
from collections import defaultdict
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = Path(__file__).resolve().parent


def rows(name):
    with open(HERE / name, newline="") as fh:
        yield from csv.DictReader(fh)


def fig_projection_error():
    series = defaultdict(list)
    for r in rows("fig_projection_error.csv"):
        series[r["method"]].append((int(r["two_k"]), float(r["e_l2"])))
    fig, ax = plt.subplots()
    for method, pts in sorted(series.items()):
        pts.sort()
        ax.semilogy([p[0] for p in pts], [max(p[1], 1e-300) for p in pts],
                    marker="o", label=method)
    ax.set_xlabel("basis size 2k")
    ax.set_ylabel("projection error on training data")
    ax.legend(fontsize=7)
    fig.savefig(HERE / "fig_projection_error.png", dpi=150)


def fig_spectra():
    series = defaultdict(list)
    for r in rows("fig_spectra.csv"):
        series[r["series"]].append((int(r["index"]), float(r["value"])))
    fig, ax = plt.subplots()
    for name, pts in sorted(series.items()):
        pts.sort()
        ax.semilogy([p[0] for p in pts], [max(p[1], 1e-300) for p in pts],
                    label=name)
    ax.set_xlabel("index")
    ax.set_ylabel("value")
    ax.legend(fontsize=7)
    fig.savefig(HERE / "fig_spectra.png", dpi=150)


def fig_preservation():
    data = defaultdict(dict)
    sizes = set()
    for r in rows("fig_preservation.csv"):
        data[r["method"]][int(r["two_k"])] = (
            int(r["preserved"]), int(r["total"]))
        sizes.add(int(r["two_k"]))
    if not data:
        return
    sizes = sorted(sizes)
    methods = sorted(data)
    fig, ax = plt.subplots()
    grid = [[data[m].get(s, (0, 0))[0] for s in sizes] for m in methods]
    im = ax.imshow(grid, aspect="auto", cmap="viridis")
    ax.set_xticks(range(len(sizes)), [str(s) for s in sizes], fontsize=7)
    ax.set_yticks(range(len(methods)), methods, fontsize=7)
    for i, m in enumerate(methods):
        for j, s in enumerate(sizes):
            ok, total = data[m].get(s, (0, 0))
            ax.text(j, i, f"{ok}/{total}", ha="center", va="center",
                    fontsize=6, color="white")
    fig.colorbar(im, ax=ax, label="preserved runs")
    fig.savefig(HERE / "fig_preservation.png", dpi=150)


def fig_relative_error():
    per_method = defaultdict(list)
    for r in rows("fig_relative_error.csv"):
        per_method[r["method"]].append(r)
    fig, ax = plt.subplots()
    for method, entries in sorted(per_method.items()):
        entries.sort(key=lambda r: int(r["two_k"]))
        xs = [int(r["two_k"]) for r in entries]
        med = [float(r["median"]) for r in entries]
        q1 = [float(r["q1"]) for r in entries]
        q3 = [float(r["q3"]) for r in entries]
        ax.semilogy(xs, med, marker="o", label=method)
        ax.fill_between(xs, q1, q3, alpha=0.2)
    ax.set_xlabel("basis size 2k")
    ax.set_ylabel("relative error (clamped at 1)")
    ax.legend(fontsize=7)
    fig.savefig(HERE / "fig_relative_error.png", dpi=150)


def fig_hamiltonian_evolution():
    series = defaultdict(list)
    for r in rows("fig_hamiltonian_evolution.csv"):
        key = (r["method"], int(r["two_k"]), int(r["mu_index"]))
        series[key].append((int(r["time_index"]), float(r["value"])))
    if not series:
        return
    fig, ax = plt.subplots()
    for key, pts in sorted(series.items()):
        pts.sort()
        ax.plot([p[0] for p in pts], [p[1] for p in pts],
                label=f"{key[0]} 2k={key[1]} mu#{key[2]}", lw=0.8)
    ax.set_xlabel("time index")
    ax.set_ylabel("reduced Hamiltonian")
    ax.legend(fontsize=6)
    fig.savefig(HERE / "fig_hamiltonian_evolution.png", dpi=150)


if __name__ == "__main__":
    fig_projection_error()
    fig_spectra()
    fig_preservation()
    fig_relative_error()
    fig_hamiltonian_evolution()
    print("figures written to", HERE)
'''
