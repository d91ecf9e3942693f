"""Command line interface.

Subcommands: `build` runs the greedy selection and writes the basis and trace
artifacts, `solve` applies a stored basis to an analytic test problem, and
`report` re-runs the trace analysis on an existing output directory.  Exit
codes: 0 success, 2 usage/config error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import os
import shutil
import sys

import numpy as np

from . import runio, solver
from .analysis import fit_rate
from .config import RunConfig, dump_config, load_config
from .engine import restore_state, run
from .errors import ConfigError, GreedyPDEError, NumericalError
from .functionals import (
    FunctionalSet,
    GaussianBump,
    PowerCusp,
    data_vector,
    disk_functional_set,
    read_functionals,
    write_functionals,
)
from .geometry import disk_candidates, evaluation_grid
from .kernels import KernelSpec
from .parallel import resolve_workers


def _parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="greedypde", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)
    for name, doc in (
        ("build", "run the greedy selection and write basis artifacts"),
        ("solve", "solve a test problem with a stored basis"),
        ("report", "re-run the analysis on an existing trace"),
    ):
        p = sub.add_parser(name, help=doc)
        p.add_argument("--config", required=True, help="key=value config file")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--workers", type=int, default=None,
                       help="worker count (0 = all cores)")
        if name == "solve":
            p.add_argument("--basis", required=True,
                           help="directory produced by `build`")
    return top


def _fresh_outdir(out_dir: str) -> str:
    if os.path.exists(out_dir):
        raise ConfigError(f"output directory {out_dir!r} already exists; remove it first")
    tmp = f"{out_dir}.partial-{os.getpid()}"
    shutil.rmtree(tmp, ignore_errors=True)
    os.makedirs(tmp)
    return tmp


def _problem(cfg: RunConfig):
    if cfg.problem == "gaussian":
        return GaussianBump(center=cfg.problem_center, shape=cfg.problem_shape)
    if cfg.problem == "powercusp":
        return PowerCusp(center=cfg.problem_center, exponent=cfg.problem_exponent)
    raise ConfigError("problem: solve needs 'gaussian' or 'powercusp'")


def _safe_rate(xs, ys, window=None):
    try:
        return fit_rate(xs, ys, window)
    except ValueError:
        return math.nan


def _write_analysis(out: str, trace) -> None:
    """report.txt, rates.csv and the plot script for a trace."""
    window = (trace.steps[-1] / 2.0, float(trace.steps[-1]))
    sigma_rate = _safe_rate(trace.steps, trace.sigma, window)
    rho_rate = _safe_rate(trace.steps, trace.rho, window)
    cond_rate = _safe_rate(trace.steps, trace.cond_c, window)
    nb = trace.boundary_count()
    finite = np.isfinite(trace.rho)
    ratio = trace.rho[finite] / trace.sigma[finite]
    report = {
        "steps": len(trace.steps),
        "fit window": f"[{window[0]:g}, {window[1]:g}]",
        "sigma rate": f"{sigma_rate:+.4f}",
        "rho rate": f"{rho_rate:+.4f}",
        "cond growth rate": f"{cond_rate:+.4f}",
        "boundary selections": f"{nb} of {len(trace.steps)}",
        "final sigma": f"{trace.sigma[-1]:.6e}",
        "final rho": f"{trace.rho[-1]:.6e}",
        "max rho/sigma": f"{ratio.max():.4f}" if ratio.size else "n/a",
    }
    with open(os.path.join(out, "report.txt"), "w") as fh:
        fh.write(runio.format_report(report))
    runio.write_rates_csv(
        os.path.join(out, "rates.csv"),
        [("sigma", sigma_rate, *window), ("rho", rho_rate, *window),
         ("cond_C", cond_rate, *window)],
    )
    runio.write_plot_script(os.path.join(out, "make_plots.py"))


def cmd_build(cfg: RunConfig, out_dir: str) -> None:
    geometry = disk_candidates(cfg.domain_count, cfg.boundary_count)
    fset = disk_functional_set(geometry)
    if cfg.n_max > len(fset):
        raise ConfigError(f"n_max: {cfg.n_max} exceeds the {len(fset)} candidates")
    spec = KernelSpec(m=cfg.m, d=cfg.d, scale=cfg.scale)
    grid = evaluation_grid(geometry, cfg.grid_spacing)
    y_size = min(cfg.y_size, grid.n_interior)
    y_indices = np.unique(np.linspace(0, grid.n_interior - 1, y_size).astype(int))
    workers = resolve_workers(cfg.workers)

    state, trace = run(
        fset, spec, mode=cfg.mode, n_max=cfg.n_max, stop_tol=cfg.stop_tol,
        eval_grid=grid, rho_every=cfg.rho_every, y_indices=y_indices,
        workers=workers,
    )

    tmp = _fresh_outdir(out_dir)
    try:
        runio.write_trace_csv(os.path.join(tmp, "trace.csv"), trace)
        write_functionals(os.path.join(tmp, "selected.txt"),
                          [fset.entries[i] for i in state.selected])
        runio.write_matrix_csv(os.path.join(tmp, "cmatrix.csv"), state.c_matrix())
        basis = solver.evaluate_basis(state, fset, spec, grid.points, workers=workers)
        p2 = solver.power_on_deltas(state, basis, spec)
        runio.write_table_csv(
            os.path.join(tmp, "powergrid.csv"),
            ["x1", "x2", "p2_delta"],
            [grid.points[:, 0], grid.points[:, 1], p2],
        )
        runio.write_params(os.path.join(tmp, "kernel.txt"),
                           {"m": cfg.m, "d": cfg.d, "scale": cfg.scale})
        with open(os.path.join(tmp, "config.txt"), "w") as fh:
            fh.write(dump_config(cfg))
        _write_analysis(tmp, trace)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    os.replace(tmp, out_dir)


def cmd_solve(cfg: RunConfig, basis_dir: str, out_dir: str) -> None:
    kernel_path = os.path.join(basis_dir, "kernel.txt")
    if not os.path.exists(kernel_path):
        raise ConfigError(f"basis: {basis_dir!r} does not look like a build output")
    params = runio.read_params(kernel_path)
    ours = {"m": cfg.m, "d": cfg.d, "scale": cfg.scale}
    if any(params.get(k) != v for k, v in ours.items()):
        raise ConfigError(
            f"kernel parameters of the basis {params} do not match the config {ours}"
        )
    spec = KernelSpec(m=cfg.m, d=cfg.d, scale=cfg.scale)
    entries = read_functionals(os.path.join(basis_dir, "selected.txt"))
    cmat = runio.read_matrix_csv(os.path.join(basis_dir, "cmatrix.csv"))
    state = restore_state(FunctionalSet(entries), cmat, spec)
    problem = _problem(cfg)
    workers = resolve_workers(cfg.workers)

    geometry = disk_candidates(cfg.domain_count, cfg.boundary_count)
    grid = evaluation_grid(geometry, cfg.grid_spacing)
    data = data_vector(state.fset, range(state.n), problem)
    mu = solver.data_to_newton(state, data)
    basis = solver.evaluate_basis(state, state.fset, spec, grid.points,
                                  workers=workers)
    u_true = problem.value(grid.points)

    partial = np.cumsum(mu[:, None] * basis.values, axis=0)
    errors = np.abs(u_true[None, :] - partial).max(axis=1)
    normalized = errors / errors[0]
    steps = np.arange(1, state.n + 1)

    tmp = _fresh_outdir(out_dir)
    try:
        runio.write_table_csv(
            os.path.join(tmp, "errors.csv"),
            ["N", "max_abs_error", "normalized_error"],
            [steps, errors, normalized],
        )
        runio.write_table_csv(
            os.path.join(tmp, "coeffs.csv"),
            ["N", "coeff_sq_cumsum"],
            [steps, np.cumsum(mu**2)],
        )
        p_delta = np.sqrt(solver.power_on_deltas(state, basis, spec))
        runio.write_table_csv(
            os.path.join(tmp, "solution.csv"),
            ["x1", "x2", "u_true", "u_approx", "abs_error", "power_delta"],
            [grid.points[:, 0], grid.points[:, 1], u_true, partial[-1],
             np.abs(u_true - partial[-1]), p_delta],
        )
        with open(os.path.join(tmp, "config.txt"), "w") as fh:
            fh.write(dump_config(cfg))
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    os.replace(tmp, out_dir)


def cmd_report(cfg: RunConfig, out_dir: str) -> None:
    trace_path = os.path.join(out_dir, "trace.csv")
    if not os.path.exists(trace_path):
        raise ConfigError(f"report: no trace.csv under {out_dir!r}")
    trace = runio.read_trace_csv(trace_path)
    _write_analysis(out_dir, trace)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.workers is not None:
            cfg.workers = args.workers
        out_dir = args.out if args.out is not None else cfg.out_dir
        if args.command == "build":
            cmd_build(cfg, out_dir)
        elif args.command == "solve":
            cmd_solve(cfg, args.basis, out_dir)
        else:
            cmd_report(cfg, out_dir)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except GreedyPDEError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
