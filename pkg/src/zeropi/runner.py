"""Batch execution of configured runs with deterministic output files.

Every run writes ``manifest.txt`` (resolved configuration, package version,
grids, wall time, trust report) plus mode-specific CSV tables.  CSV content
is a pure function of the configuration and seed; the manifest additionally
records wall time and is therefore excluded from the byte-identical rerun
guarantee.
"""

from __future__ import annotations

import csv
import dataclasses
import time
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    SweepResult,
    degeneracy,
    dmax_grid,
    export_wavefunction,
    flux_sweep,
    optimize_ej,
)
from .config import RunConfig
from .dispersive import (
    cj_disorder_check,
    dispersive_analysis,
    junction_disorder_sweep,
)
from .grid import default_grid
from .solver import EigenSolution, solve_refined

__all__ = ["run"]


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return f"{value:.12g}"
    return str(value)


def _write_csv(path: Path, header: list, rows: list) -> None:
    with path.open("w", newline="") as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def run(config: RunConfig, out_dir) -> int:
    """Execute one configured run; returns a nonzero exit status iff any
    requested point hard-failed."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    notes: list[str] = []

    handler = {
        "spectrum": _run_spectrum,
        "flux-sweep": _run_flux_sweep,
        "dmax-grid": _run_dmax_grid,
        "ej-optimize": _run_ej_optimize,
        "disorder-sweep": _run_disorder_sweep,
        "dispersive": _run_dispersive,
        "wavefunction-export": _run_wavefunction_export,
    }[config.mode]
    exit_code = handler(config, out, notes)

    wall = time.perf_counter() - start
    _write_manifest(config, out, notes, wall, exit_code)
    return exit_code


# ---------------------------------------------------------------------------
# per-mode handlers


def _solve_single(config: RunConfig) -> EigenSolution:
    # single-point modes always use the two-grid solve so the reported
    # degeneracy carries a meaningful trust flag
    return solve_refined(
        config.params, config.disorder, k=config.k, quality=config.quality,
        tol=config.tol, seed=config.seed,
    )


def _write_spectrum(solution: EigenSolution, out: Path) -> None:
    rows = [
        (
            level,
            solution.energies[level],
            solution.disc_error[level] if solution.disc_error is not None else "",
            solution.residual_norms[level],
        )
        for level in range(solution.k)
    ]
    _write_csv(
        out / "spectrum.csv",
        ["level", "energy[hbar_omega_p]", "disc_error[hbar_omega_p]",
         "residual[hbar_omega_p]"],
        rows,
    )


def _write_degeneracy(report, out: Path) -> None:
    _write_csv(
        out / "degeneracy.csv",
        ["d_value[log10]", "splitting[hbar_omega_p]", "gap[hbar_omega_p]",
         "trusted", "splitting_disc_error[hbar_omega_p]"],
        [(report.d_value, report.splitting, report.gap, report.trusted,
          report.splitting_disc_error)],
    )


def _run_spectrum(config: RunConfig, out: Path, notes: list) -> int:
    solution = _solve_single(config)
    report = degeneracy(solution)
    _write_spectrum(solution, out)
    _write_degeneracy(report, out)
    if not report.trusted:
        notes.append(
            f"UNTRUSTED degeneracy: splitting disc error "
            f"{_fmt(report.splitting_disc_error)} vs splitting "
            f"{_fmt(report.splitting)}"
        )
    return 0


def _sweep_rows(sweep: SweepResult, k: int):
    rows = []
    for point in sweep.points:
        energies = ["" for _ in range(k)]
        splitting = gap = d_value = trusted = ""
        if point.energies is not None:
            energies = list(point.energies[:k])
        if point.report is not None:
            splitting = point.report.splitting
            gap = point.report.gap
            d_value = point.report.d_value
            trusted = point.report.trusted
        rows.append(
            [point.axis_value, point.status, *energies, splitting, gap,
             d_value, trusted, point.message]
        )
    return rows


def _write_sweep(sweep: SweepResult, config: RunConfig, out: Path,
                 notes: list) -> int:
    header = (
        [sweep.axis_name, "status"]
        + [f"E{i}[hbar_omega_p]" for i in range(config.k)]
        + ["splitting[hbar_omega_p]", "gap[hbar_omega_p]", "d_value[log10]",
           "trusted", "message"]
    )
    _write_csv(out / "sweep.csv", header, _sweep_rows(sweep, config.k))
    failed = sweep.failed_points()
    for point in failed:
        notes.append(f"FAILED point {point.axis_value}: {point.message}")
    for point in sweep.points:
        if point.status == "untrusted":
            notes.append(f"UNTRUSTED point {point.axis_value}")
    return 1 if failed else 0


def _run_flux_sweep(config: RunConfig, out: Path, notes: list) -> int:
    sweep = flux_sweep(
        config.params, config.flux_values, k=config.k, quality=config.quality,
        refined=config.refined, tol=config.tol, seed=config.seed,
        workers=config.workers, disorder=config.disorder,
    )
    return _write_sweep(sweep, config, out, notes)


def _run_disorder_sweep(config: RunConfig, out: Path, notes: list) -> int:
    if config.disorder_axis == "delta_e_j":
        sweep = junction_disorder_sweep(
            config.params, config.disorder_values, k=config.k,
            quality=config.quality, refined=config.refined, tol=config.tol,
            seed=config.seed, workers=config.workers,
            base_disorder=config.disorder,
        )
    else:
        sweep = cj_disorder_check(
            config.params, config.disorder_values, k=config.k,
            quality=config.quality, refined=config.refined, tol=config.tol,
            seed=config.seed, workers=config.workers,
            base_disorder=config.disorder,
        )
    return _write_sweep(sweep, config, out, notes)


def _run_dmax_grid(config: RunConfig, out: Path, notes: list) -> int:
    sweep = dmax_grid(
        config.e_l_values, config.e_c_sigma_values, k=config.k,
        workers=config.workers, phi_ext=config.params.phi_ext,
        report_quality=config.quality, tol=config.tol, seed=config.seed,
    )
    rows = []
    for point in sweep.points:
        e_l, e_cs = point.axis_value
        trusted = point.report.trusted if point.report is not None else ""
        rows.append([e_l, e_cs, point.status, point.e_j_star or "",
                     point.d_max if point.d_max is not None else "", trusted,
                     point.message])
    _write_csv(
        out / "sweep.csv",
        ["e_l[hbar_omega_p]", "e_c_sigma[hbar_omega_p]", "status",
         "e_j_star[hbar_omega_p]", "d_max[log10]", "trusted", "message"],
        rows,
    )
    failed = sweep.failed_points()
    for point in failed:
        notes.append(f"FAILED point {point.axis_value}: {point.message}")
    return 1 if failed else 0


def _run_ej_optimize(config: RunConfig, out: Path, notes: list) -> int:
    result = optimize_ej(
        config.params.e_l, config.params.e_c_sigma, k=config.k,
        phi_ext=config.params.phi_ext, report_quality=config.quality,
        tol=config.tol, seed=config.seed,
    )
    rows = [
        (e_j, d, "scan")
        for e_j, d in zip(result.scan_e_j, result.scan_d)
        if np.isfinite(d)
    ]
    rows.append((result.e_j_star, result.d_max, "optimum"))
    _write_csv(
        out / "sweep.csv",
        ["e_j[hbar_omega_p]", "d_value[log10]", "point_type"],
        rows,
    )
    if result.flat:
        notes.append("FLAT optimization landscape: optimum is scan best")
    if not result.report.trusted:
        notes.append("UNTRUSTED d_max at optimum")
    return 0


def _run_dispersive(config: RunConfig, out: Path, notes: list) -> int:
    # delta_E_J / delta_C_J enter the 2D solve exactly; delta_C / delta_E_L
    # act through the chi-oscillator couplings
    junction_only = dataclasses.replace(
        config.disorder, delta_c_rel=0.0, delta_e_l=0.0
    )
    solution = solve_refined(
        config.params, junction_only, k=config.k, quality=config.quality,
        tol=config.tol, seed=config.seed,
    )
    result = dispersive_analysis(solution, config.params, config.disorder)
    _write_spectrum(solution, out)

    resonant = set(result.resonant_pairs)
    coupling_rows = []
    for l in range(config.k):
        for lp in range(config.k):
            coupling_rows.append(
                (l, lp, result.couplings.g_phi[l, lp],
                 result.couplings.g_theta[l, lp], result.detunings[l, lp],
                 (l, lp) in resonant)
            )
    _write_csv(
        out / "couplings.csv",
        ["l", "lp", "g_phi[hbar_omega_p]", "g_theta[hbar_omega_p]",
         "detuning[hbar_omega_p]", "resonant"],
        coupling_rows,
    )
    _write_csv(
        out / "shifts.csv",
        ["level", "stark[hbar_omega_p]", "lamb[hbar_omega_p]",
         "tail_estimate[hbar_omega_p]"],
        [
            (l, result.stark[l], result.lamb[l], result.tail_estimate[l])
            for l in range(config.k)
        ],
    )
    for l, lp in result.resonant_pairs:
        notes.append(
            f"RESONANCE flag: pair ({l},{lp}) detuning "
            f"{_fmt(result.detunings[l, lp])} excluded from dispersive sums"
        )
    return 0


def _run_wavefunction_export(config: RunConfig, out: Path, notes: list) -> int:
    solution = _solve_single(config)
    _write_spectrum(solution, out)
    for level in config.levels:
        table = export_wavefunction(solution, level)
        _write_csv(
            out / f"wavefunction_{level}.csv",
            ["phi", "theta", "amplitude"],
            [tuple(row) for row in table],
        )
    return 0


# ---------------------------------------------------------------------------
# manifest


def _write_manifest(config: RunConfig, out: Path, notes: list,
                    wall: float, exit_code: int) -> None:
    lines = [
        f"zeropi version: {__version__}",
        f"mode: {config.mode}",
        "",
        "[resolved config]",
    ]
    for fld in dataclasses.fields(config):
        value = getattr(config, fld.name)
        if fld.name in ("params", "disorder"):
            for sub in dataclasses.fields(value):
                lines.append(f"{fld.name}.{sub.name} = "
                             f"{_fmt(getattr(value, sub.name))}")
        else:
            lines.append(f"{fld.name} = {_fmt(value)}")
    grid = default_grid(config.params, config.quality)
    lines += [
        "",
        "[grid]",
        f"base: phi_max={_fmt(grid.phi_max)} n_phi={grid.n_phi} "
        f"n_theta={grid.n_theta}",
        f"refined: phi_max={_fmt(grid.refined().phi_max)} "
        f"n_phi={grid.refined().n_phi} n_theta={grid.refined().n_theta}",
        "",
        "[trust report]",
    ]
    lines += notes if notes else ["all points ok"]
    lines += [
        "",
        f"wall_time_s: {wall:.3f}",
        f"exit_code: {exit_code}",
    ]
    (out / "manifest.txt").write_text("\n".join(lines) + "\n")
