"""Text artifacts written by the CLI and read back by the package itself:
run traces, matrices, power grids, error/coefficient tables and reports."""

from __future__ import annotations

import math

import numpy as np

from .engine import RunTrace

_FMT = ".17g"


def _fmt(x: float) -> str:
    return format(float(x), _FMT)


# ---------------------------------------------------------------------------
# trace.csv


def write_trace_csv(path, trace: RunTrace) -> None:
    with open(path, "w") as fh:
        fh.write("N,sigma,rho,kind,h_domain,h_boundary,cond_C\n")
        for i in range(len(trace.steps)):
            fh.write(
                f"{trace.steps[i]},{_fmt(trace.sigma[i])},{_fmt(trace.rho[i])},"
                f"{trace.kind[i]},{_fmt(trace.h_domain[i])},"
                f"{_fmt(trace.h_boundary[i])},{_fmt(trace.cond_c[i])}\n"
            )


def read_trace_csv(path) -> RunTrace:
    steps, sigma, rho, kind, hd, hb, cc = [], [], [], [], [], [], []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "N,sigma,rho,kind,h_domain,h_boundary,cond_C":
            raise ValueError(f"unexpected trace header {header!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            f = line.split(",")
            steps.append(int(f[0]))
            sigma.append(float(f[1]))
            rho.append(float(f[2]))
            kind.append(f[3])
            hd.append(float(f[4]))
            hb.append(float(f[5]))
            cc.append(float(f[6]))
    return RunTrace(
        steps=np.array(steps),
        sigma=np.array(sigma),
        rho=np.array(rho),
        kind=kind,
        h_domain=np.array(hd),
        h_boundary=np.array(hb),
        cond_c=np.array(cc),
    )


# ---------------------------------------------------------------------------
# dense matrices (cmatrix.csv), comma-separated rows, no header


def write_matrix_csv(path, matrix) -> None:
    M = np.atleast_2d(np.asarray(matrix, dtype=float))
    with open(path, "w") as fh:
        for row in M:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def read_matrix_csv(path) -> np.ndarray:
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append([float(v) for v in line.split(",")])
    return np.array(rows, dtype=float)


# ---------------------------------------------------------------------------
# tabular CSVs with a header row


def write_table_csv(path, header: list[str], columns: list[np.ndarray]) -> None:
    ncols = len(header)
    nrows = len(columns[0])
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(nrows):
            fh.write(",".join(_fmt(columns[j][i]) for j in range(ncols)) + "\n")


def read_table_csv(path) -> tuple[list[str], np.ndarray]:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        data = []
        for line in fh:
            line = line.strip()
            if line:
                data.append([float(v) for v in line.split(",")])
    return header, np.array(data, dtype=float)


# ---------------------------------------------------------------------------
# key=value parameter files (kernel.txt)


def write_params(path, params: dict) -> None:
    with open(path, "w") as fh:
        for k, v in params.items():
            fh.write(f"{k} = {v!r}\n" if isinstance(v, float) else f"{k} = {v}\n")


def read_params(path) -> dict:
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            k, v = (p.strip() for p in line.split("=", 1))
            try:
                out[k] = int(v)
            except ValueError:
                out[k] = float(v)
    return out


# ---------------------------------------------------------------------------
# report + plot script


def format_report(lines: dict) -> str:
    width = max(len(k) for k in lines)
    return "\n".join(f"{k.ljust(width)} : {v}" for k, v in lines.items()) + "\n"


def write_rates_csv(path, rates: list[tuple[str, float, float, float]]) -> None:
    """Rows of (quantity, slope, window_lo, window_hi)."""
    with open(path, "w") as fh:
        fh.write("quantity,slope,window_lo,window_hi\n")
        for name, slope, lo, hi in rates:
            slope_s = "nan" if slope is None or math.isnan(slope) else _fmt(slope)
            fh.write(f"{name},{slope_s},{_fmt(lo)},{_fmt(hi)}\n")


_PLOT_SCRIPT = """\
#!/usr/bin/env python3
# Render the run trace written next to this script.
import csv
import math

import matplotlib.pyplot as plt

steps, sigma, rho, cond = [], [], [], []
with open("trace.csv") as fh:
    for row in csv.DictReader(fh):
        steps.append(int(row["N"]))
        sigma.append(float(row["sigma"]))
        rho.append(float(row["rho"]))
        cond.append(float(row["cond_C"]))

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
ax1.loglog(steps, sigma, label="sigma")
if any(not math.isnan(v) for v in rho):
    ax1.loglog(steps, rho, label="rho")
ax1.set_xlabel("N")
ax1.legend()
ax2.loglog(steps, cond, label="cond(C)")
ax2.set_xlabel("N")
ax2.legend()
fig.tight_layout()
fig.savefig("trace_plots.png", dpi=150)
print("wrote trace_plots.png")
"""


def write_plot_script(path) -> None:
    with open(path, "w") as fh:
        fh.write(_PLOT_SCRIPT)
