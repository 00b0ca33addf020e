"""Command-line front end: spectra, Z scans, energy accuracy, particle counts.

Every subcommand emits either CSV (deterministic row order and formatting:
LF line endings, ``.`` decimal separator, floats at 6 decimals, Z columns at
3 decimals, scalar results as leading ``# key=value`` comment lines) or JSON
(one top-level object with ``config``, ``rows``, and ``summary``; floats at
full precision).  Exit codes: 0 success, 1 numerical failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Sequence

import numpy as np

from . import oracle
from .correlations import (
    DEFAULT_SATURATION_TOL,
    DEFAULT_SCHEDULE,
    mean_particle_number,
    parity,
    z_analytic,
    z_saturated,
    z_value,
)
from .folding import prepare_eigenstate
from .quadratic import (
    KitaevParams,
    analytic_periodic_energies,
    build_coupling_matrix,
    eigenenergy,
    schur_decompose,
)
from .tensor import MAX_BOND_DIMENSION, TRUNCATION_THRESHOLD, energy_expectation

__all__ = ["main", "run"]


class UsageError(ValueError):
    """Invalid flag combination or malformed grid/schedule syntax."""


# -- parsing helpers ---------------------------------------------------------


def parse_schedule(text: str) -> tuple[int, ...]:
    """Chain-length schedule: ``8,16,24`` or ``start:stop:step`` (inclusive)."""
    try:
        if ":" in text:
            start, stop, step = (int(part) for part in text.split(":"))
            if step <= 0:
                raise ValueError
            values = tuple(range(start, stop + 1, step))
        else:
            values = tuple(int(part) for part in text.split(","))
    except ValueError as exc:
        raise UsageError(f"bad schedule {text!r}; use N,N,... or start:stop:step") from exc
    if not values:
        raise UsageError(f"schedule {text!r} is empty")
    return values


def parse_grid(text: str) -> tuple[float, ...]:
    """Parameter grid: ``0,0.5,1`` or ``min:max:step`` (inclusive)."""
    try:
        if ":" in text:
            lo, hi, step = (float(part) for part in text.split(":"))
            if step <= 0 or hi < lo:
                raise ValueError
            count = int(round((hi - lo) / step))
            values = tuple(round(lo + k * step, 10) for k in range(count + 1))
        else:
            values = tuple(float(part) for part in text.split(","))
    except ValueError as exc:
        raise UsageError(f"bad grid {text!r}; use v,v,... or min:max:step") from exc
    if not values:
        raise UsageError(f"grid {text!r} is empty")
    return values


def _fmt(value: float, decimals: int = 6) -> str:
    return f"{float(value) + 0.0:.{decimals}f}"


def _fmt_bool(value: bool) -> str:
    return "true" if value else "false"


# -- output ------------------------------------------------------------------


def emit(
    args: argparse.Namespace,
    header: Sequence[str],
    csv_rows: Iterable[Sequence[str]],
    json_rows: list[dict],
    summary: dict,
    config: dict,
) -> None:
    if args.format == "json":
        payload = {"config": config, "rows": json_rows, "summary": summary}
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        lines = [f"# {key}={value}" for key, value in sorted(summary.items())]
        lines.append(",".join(header))
        lines.extend(",".join(row) for row in csv_rows)
        text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


# -- shared parameter plumbing ----------------------------------------------


def make_params(args: argparse.Namespace, **overrides) -> KitaevParams:
    if args.phi != 0.0:
        raise UsageError("--phi is validated for 0 only")
    fields = dict(
        n_sites=args.n,
        hopping=args.w,
        chemical_potential=args.mu,
        pairing_magnitude=args.delta,
        pairing_phase=args.phi,
        boundary=args.boundary,
    )
    fields.update(overrides)
    try:
        return KitaevParams(**fields)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


# -- spectrum ----------------------------------------------------------------


def cmd_spectrum(args: argparse.Namespace) -> int:
    params = make_params(args)
    schur = schur_decompose(build_coupling_matrix(params))
    ground = eigenenergy(schur.epsilons, [0] * params.n_sites)
    summary = {
        "ground_energy": _fmt(ground) if args.format == "csv" else ground,
        "degenerate": _fmt_bool(schur.is_degenerate)
        if args.format == "csv"
        else schur.is_degenerate,
    }
    header = ["mode", "epsilon"]
    analytic: np.ndarray | None = None
    if params.boundary == "periodic":
        analytic = np.sort(np.abs(analytic_periodic_energies(params)))[::-1]
        deviation = float(np.abs(schur.epsilons - analytic).max())
        summary["max_deviation"] = _fmt(deviation, 12) if args.format == "csv" else deviation
        header += ["epsilon_analytic", "deviation"]
    csv_rows = []
    json_rows = []
    for index, eps in enumerate(schur.epsilons):
        row = {"mode": index + 1, "epsilon": float(eps)}
        cells = [str(index + 1), _fmt(eps)]
        if analytic is not None:
            row["epsilon_analytic"] = float(analytic[index])
            row["deviation"] = float(abs(eps - analytic[index]))
            cells += [_fmt(analytic[index]), _fmt(row["deviation"], 12)]
        csv_rows.append(cells)
        json_rows.append(row)
    emit(args, header, csv_rows, json_rows, summary, _config_dict(args))
    return 0


# -- zscan -------------------------------------------------------------------


def _zscan_point(payload: tuple) -> dict:
    mu, two_w, delta, schedule, tol, trunc = payload
    params = KitaevParams(
        n_sites=max(3, schedule[0]),
        hopping=two_w / 2.0,
        chemical_potential=mu,
        pairing_magnitude=delta,
    )
    row = {"mu": mu, "two_w": two_w, "z_analytic": z_analytic(params)}
    try:
        result = z_saturated(params, schedule=schedule, tol=tol, threshold=trunc)
    except Exception as exc:  # recorded in-row; the scan continues
        row.update(z=None, converged=None, n_used=None, abs_difference=None, error=str(exc))
        return row
    row.update(
        z=result.z,
        converged=result.converged,
        n_used=result.n_used,
        abs_difference=abs(result.z - row["z_analytic"]),
        error="",
    )
    return row


def cmd_zscan(args: argparse.Namespace) -> int:
    if args.boundary != "open":
        raise UsageError("zscan is defined for open chains")
    if args.phi != 0.0:
        raise UsageError("--phi is validated for 0 only")
    if args.tol <= 0 or args.trunc <= 0:
        raise UsageError("--tol and --trunc must be positive")
    schedule = parse_schedule(args.n_schedule) if args.n_schedule else DEFAULT_SCHEDULE
    mu_grid = parse_grid(args.mu_grid)
    two_w_grid = parse_grid(args.two_w_grid)
    points = [
        (mu, two_w, args.delta, schedule, args.tol, args.trunc)
        for mu in sorted(mu_grid, reverse=True)
        for two_w in sorted(two_w_grid)
    ]
    rows = _run_pool(_zscan_point, points, args.jobs)
    header = ["mu", "two_w", "z", "converged", "n_used", "z_analytic", "abs_difference", "error"]
    csv_rows = []
    for row in rows:
        failed = row["z"] is None
        csv_rows.append(
            [
                _fmt(row["mu"]),
                _fmt(row["two_w"]),
                "" if failed else _fmt(row["z"], 3),
                "" if failed else _fmt_bool(row["converged"]),
                "" if failed else str(row["n_used"]),
                _fmt(row["z_analytic"], 3),
                "" if failed else _fmt(row["abs_difference"]),
                row["error"],
            ]
        )
    n_failed = sum(1 for row in rows if row["z"] is None)
    n_unconverged = sum(1 for row in rows if row["z"] is not None and not row["converged"])
    summary = {"points": len(rows), "failed": n_failed, "unconverged": n_unconverged}
    emit(args, header, csv_rows, rows, summary, _config_dict(args, schedule=list(schedule)))
    return 0


# -- energy accuracy ---------------------------------------------------------


def _energy_point(payload: tuple) -> dict:
    mu, w, n_sites, delta, trunc = payload
    params = KitaevParams(
        n_sites=n_sites,
        hopping=w,
        chemical_potential=mu,
        pairing_magnitude=delta,
        boundary="periodic",
    )
    row = {"mu": mu, "w": w}
    schur = schur_decompose(build_coupling_matrix(params))
    reference = -0.5 * float(np.sum(schur.epsilons))
    row["energy_reference"] = reference
    if schur.is_degenerate:
        row.update(energy_tensor=None, abs_difference=None, degenerate=True, error="")
        return row
    try:
        state, _, _ = prepare_eigenstate(params, threshold=trunc)
        energy = energy_expectation(state, params)
    except Exception as exc:
        row.update(energy_tensor=None, abs_difference=None, degenerate=False, error=str(exc))
        return row
    row.update(
        energy_tensor=energy,
        abs_difference=abs(energy - reference),
        degenerate=False,
        error="",
    )
    return row


def cmd_energy_accuracy(args: argparse.Namespace) -> int:
    if args.boundary != "periodic":
        raise UsageError("energy-accuracy uses the periodic-chain shortcut; pass --boundary periodic")
    if args.phi != 0.0:
        raise UsageError("--phi is validated for 0 only")
    if args.trunc <= 0:
        raise UsageError("--trunc must be positive")
    mu_grid = parse_grid(args.mu_grid)
    w_grid = parse_grid(args.w_grid)
    points = [
        (mu, w, args.n, args.delta, args.trunc)
        for w in sorted(w_grid)
        for mu in sorted(mu_grid)
    ]
    rows = _run_pool(_energy_point, points, args.jobs)
    header = ["mu", "w", "energy_tensor", "energy_reference", "abs_difference", "degenerate", "error"]
    csv_rows = []
    differences = [row["abs_difference"] for row in rows if row["abs_difference"] is not None]
    for row in rows:
        skipped = row["energy_tensor"] is None
        csv_rows.append(
            [
                _fmt(row["mu"]),
                _fmt(row["w"]),
                "" if skipped else _fmt(row["energy_tensor"]),
                _fmt(row["energy_reference"]),
                "" if skipped else _fmt(row["abs_difference"], 12),
                _fmt_bool(row["degenerate"]),
                row["error"],
            ]
        )
    summary = {
        "points": len(rows),
        "degenerate_skipped": sum(1 for row in rows if row["degenerate"]),
        "max_abs_difference": (
            (_fmt(max(differences), 12) if args.format == "csv" else max(differences))
            if differences
            else ""
        ),
    }
    emit(args, header, csv_rows, rows, summary, _config_dict(args))
    return 0


# -- particles ---------------------------------------------------------------


def _particles_point(payload: tuple) -> dict:
    mu, w, n_sites, delta, trunc = payload
    params = KitaevParams(
        n_sites=n_sites,
        hopping=w,
        chemical_potential=mu,
        pairing_magnitude=delta,
        boundary="periodic",
    )
    row = {"mu": mu, "w": w}
    try:
        state, _, plan = prepare_eigenstate(params, threshold=trunc)
    except Exception as exc:
        row.update(mean_particles=None, parity="", degenerate=None, error=str(exc))
        return row
    sector = parity([0] * n_sites, plan.particle_hole)
    row.update(
        mean_particles=mean_particle_number(state),
        parity=sector,
        degenerate=plan.degenerate,
        error="",
    )
    return row


def cmd_particles(args: argparse.Namespace) -> int:
    if args.boundary != "periodic":
        raise UsageError("particles reproduces the periodic-chain surface; pass --boundary periodic")
    if args.phi != 0.0:
        raise UsageError("--phi is validated for 0 only")
    if args.trunc <= 0:
        raise UsageError("--trunc must be positive")
    mu_grid = parse_grid(args.mu_grid)
    w_grid = parse_grid(args.w_grid)
    points = [
        (mu, w, args.n, args.delta, args.trunc)
        for w in sorted(w_grid)
        for mu in sorted(mu_grid)
    ]
    rows = _run_pool(_particles_point, points, args.jobs)
    header = ["mu", "w", "mean_particles", "parity", "degenerate", "error"]
    csv_rows = []
    for row in rows:
        failed = row["mean_particles"] is None
        csv_rows.append(
            [
                _fmt(row["mu"]),
                _fmt(row["w"]),
                "" if failed else _fmt(row["mean_particles"]),
                row["parity"],
                "" if failed else _fmt_bool(row["degenerate"]),
                row["error"],
            ]
        )
    summary = {
        "points": len(rows),
        "failed": sum(1 for row in rows if row["mean_particles"] is None),
    }
    emit(args, header, csv_rows, rows, summary, _config_dict(args))
    return 0


# -- verify ------------------------------------------------------------------

_VERIFY_GRID = (
    (1.0, 0.0, 1.0),
    (1.0, 0.5, 1.0),
    (1.0, 1.0, 1.0),
    (1.0, 2.5, 1.0),
    (0.7, 0.8, 1.0),
    (1.3, 1.7, 0.6),
)


def _verify_point(payload: tuple) -> list[dict]:
    w, mu, delta, n_sites, trunc = payload
    params = KitaevParams(n_sites, w, mu, delta)
    point = {"w": w, "mu": mu, "delta": delta}
    schur = schur_decompose(build_coupling_matrix(params))
    h = oracle.dense_hamiltonian(n_sites, w, mu, delta)
    checks: list[dict] = []

    def record(check: str, status: str, residual: float | None, detail: str = "") -> None:
        checks.append(dict(point, check=check, status=status, residual=residual, detail=detail))

    dense_spectrum = oracle.ed_spectrum(h)
    rebuilt = np.sort(
        [
            eigenenergy(schur.epsilons, [(index >> k) & 1 for k in range(n_sites)])
            for index in range(2**n_sites)
        ]
    )
    residual = float(np.abs(rebuilt - dense_spectrum).max())
    record("spectrum_multiset", "pass" if residual < 1e-9 else "fail", residual)

    state, _, plan = prepare_eigenstate(params, threshold=trunc)
    vec = state.fock_coefficients().reshape(-1)

    if plan.degenerate:
        record("ground_overlap", "skipped", None, "degenerate ground level")
    else:
        _, ground = oracle.ed_ground_state(h)
        overlap = abs(np.vdot(ground, vec))
        record("ground_overlap", "pass" if overlap >= 1.0 - 1e-9 else "fail", max(0.0, 1.0 - overlap))

    if n_sites < 3:
        record("rdm_ends", "skipped", None, "end-pair contraction needs 3 sites")
    else:
        rho = state.rdm_ends().entries
        dense_rho = oracle.partial_trace_ends(vec, n_sites)
        residual = float(np.abs(rho - dense_rho).max())
        record("rdm_ends", "pass" if residual < 1e-10 else "fail", residual)

    if plan.degenerate:
        record("z_value", "skipped", None, "degenerate ground level")
    elif n_sites < 3:
        record("z_value", "skipped", None, "end-pair contraction needs 3 sites")
    else:
        sector = parity([0] * n_sites, plan.particle_hole)
        _, ground = oracle.ed_ground_state(h)
        dense_z = abs(oracle.ed_expectation(oracle.dense_edge_operator(n_sites, "Q"), ground).real)
        residual = abs(z_value(state, sector) - dense_z)
        record("z_value", "pass" if residual < 1e-9 else "fail", residual)
    return checks


def cmd_verify(args: argparse.Namespace) -> int:
    if args.boundary != "open":
        raise UsageError("verify runs the open-chain equivalence suite")
    if args.phi != 0.0:
        raise UsageError("--phi is validated for 0 only")
    if not 2 <= args.n <= 8:
        raise UsageError("verify needs 2 <= --n <= 8 (dense reference)")
    if args.w is None and args.mu is None:
        points = [(w, mu, delta, args.n, args.trunc) for w, mu, delta in _VERIFY_GRID]
    else:
        points = [(args.w if args.w is not None else 1.0, args.mu or 0.0, args.delta, args.n, args.trunc)]
    rows = [check for result in _run_pool(_verify_point, points, args.jobs) for check in result]
    header = ["w", "mu", "delta", "check", "status", "residual", "detail"]
    csv_rows = [
        [
            _fmt(row["w"]),
            _fmt(row["mu"]),
            _fmt(row["delta"]),
            row["check"],
            row["status"],
            "" if row["residual"] is None else _fmt(row["residual"], 12),
            row["detail"],
        ]
        for row in rows
    ]
    failures = sum(1 for row in rows if row["status"] == "fail")
    summary = {
        "checks": len(rows),
        "failures": failures,
        "skipped": sum(1 for row in rows if row["status"] == "skipped"),
    }
    emit(args, header, csv_rows, rows, summary, _config_dict(args))
    return 0 if failures == 0 else 1


# -- plumbing ----------------------------------------------------------------


def _run_pool(worker: Callable, payloads: list, jobs: int) -> list:
    if jobs <= 1 or len(payloads) <= 1:
        return [worker(payload) for payload in payloads]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, payloads))


def _config_dict(args: argparse.Namespace, **extra) -> dict:
    config = {
        key: value
        for key, value in sorted(vars(args).items())
        if key not in ("func",) and value is not None
    }
    config.update(extra)
    return config


def _add_common(parser: argparse.ArgumentParser, *, boundary: str, n_default: int) -> None:
    parser.add_argument("--n", type=int, default=n_default, help="number of chain sites")
    parser.add_argument("--delta", type=float, default=1.0, help="pairing magnitude")
    parser.add_argument("--phi", type=float, default=0.0, help="pairing phase (validated 0 only)")
    parser.add_argument(
        "--boundary", choices=("open", "periodic"), default=boundary, help="chain boundary"
    )
    parser.add_argument(
        "--trunc", type=float, default=TRUNCATION_THRESHOLD, help="relative truncation threshold"
    )
    parser.add_argument("--format", choices=("csv", "json"), default="csv", help="output format")
    parser.add_argument("--out", help="output path (default stdout)")
    parser.add_argument("--jobs", type=int, default=1, help="parallel workers for grid points")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kitaev-chain",
        description="Kitaev-chain spectra, eigenstates, and end-to-end correlation scans.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    spectrum = sub.add_parser("spectrum", help="single-body energies and ground energy")
    _add_common(spectrum, boundary="open", n_default=10)
    spectrum.add_argument("--w", type=float, default=1.0, help="hopping amplitude")
    spectrum.add_argument("--mu", type=float, default=0.0, help="chemical potential")
    spectrum.set_defaults(func=cmd_spectrum)

    zscan = sub.add_parser("zscan", help="saturated Z over a (mu, 2w) grid")
    _add_common(zscan, boundary="open", n_default=8)
    zscan.add_argument("--mu-grid", default="-4:4:1", help="mu grid (list or min:max:step)")
    zscan.add_argument("--two-w-grid", default="-4:4:1", help="2w grid (list or min:max:step)")
    zscan.add_argument("--n-schedule", default="", help="chain lengths (list or start:stop:step)")
    zscan.add_argument("--tol", type=float, default=DEFAULT_SATURATION_TOL, help="saturation tolerance")
    zscan.set_defaults(func=cmd_zscan)

    energy = sub.add_parser("energy-accuracy", help="tensor-route ground-energy error on a grid")
    _add_common(energy, boundary="periodic", n_default=10)
    energy.add_argument("--mu-grid", default="-4:4:0.5", help="mu grid (list or min:max:step)")
    energy.add_argument("--w-grid", default="-4:4:0.5", help="w grid (list or min:max:step)")
    energy.set_defaults(func=cmd_energy_accuracy)

    particles = sub.add_parser("particles", help="mean particle number and parity on a grid")
    _add_common(particles, boundary="periodic", n_default=10)
    particles.add_argument("--mu-grid", default="-4:4:0.5", help="mu grid (list or min:max:step)")
    particles.add_argument("--w-grid", default="-4:4:0.5", help="w grid (list or min:max:step)")
    particles.set_defaults(func=cmd_particles)

    verify = sub.add_parser("verify", help="dense-reference equivalence suite")
    _add_common(verify, boundary="open", n_default=6)
    verify.add_argument("--w", type=float, default=None, help="hopping (default: built-in grid)")
    verify.add_argument("--mu", type=float, default=None, help="chemical potential")
    verify.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # numerical failure surfaced with exit code 1
        print(f"failed: {exc}", file=sys.stderr)
        return 1


def run() -> None:
    sys.exit(main())
