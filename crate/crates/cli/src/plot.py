#!/usr/bin/env python3
"""Plot whichever srpol CSV files sit next to this script.

Usage: python3 plot.py [directory]

Needs numpy and matplotlib. Lines starting with '#' are provenance
comments and are skipped.
"""
import csv
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def read(path):
    with open(path) as f:
        rows = list(csv.DictReader(line for line in f if not line.startswith("#")))
    return rows


def column(rows, name):
    return [float(r[name]) for r in rows]


def fig2a(rows, out):
    fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(5, 6))
    k = column(rows, "k_labs")
    ax1.plot(k, column(rows, "re_omega_over_gammabar"))
    ax1.set_ylabel(r"Re $\omega/\bar\gamma$")
    ax2.plot(k, column(rows, "im_omega_over_gammabar"), label="numeric")
    ax2.plot(k, column(rows, "im_omega_analytic_over_gammabar"), "--", label="small-k")
    ax2.set_ylabel(r"Im $\omega/\bar\gamma$")
    ax2.set_xlabel(r"$k\,l_{abs}$")
    ax2.legend()
    fig.tight_layout()
    fig.savefig(out)


def fig2b(rows, out):
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(column(rows, "delta_over_omega_s"), column(rows, "pop_e_plus_minus"))
    ax.set_xlabel(r"$\delta/\Omega_s$")
    ax.set_ylabel(r"$|e_+|^2 + |e_-|^2$")
    fig.tight_layout()
    fig.savefig(out)


def fig3(rows, out, xlabel):
    data = [r for r in rows if r["scan_variable"] != "baseline"]
    base = [r for r in rows if r["scan_variable"] == "baseline"]
    x = column(data, "scan_variable")
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for key, style in (("T", "-"), ("R", "-"), ("A", "-")):
        line, = ax.plot(x, column(data, key), style, label=key)
        if base:
            ax.axhline(float(base[0][key]), color=line.get_color(), ls=":", lw=0.8)
    ax.set_xlabel(xlabel)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out)


def main():
    here = sys.argv[1] if len(sys.argv) > 1 else os.path.dirname(os.path.abspath(__file__))
    jobs = {
        "fig2a.csv": fig2a,
        "fig2b.csv": fig2b,
        "fig3-upper.csv": lambda r, o: fig3(r, o, "n"),
        "fig3-lower.csv": lambda r, o: fig3(r, o, r"$\Omega_c/\Omega_s$"),
    }
    for name, plot in jobs.items():
        path = os.path.join(here, name)
        if os.path.exists(path):
            out = path[:-4] + ".png"
            plot(read(path), out)
            print(out)


if __name__ == "__main__":
    main()
