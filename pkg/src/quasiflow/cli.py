"""Command-line driver: ``quasiflow <command> [flags]``.

Every command writes ``<command>.json`` (a :class:`RunRecord`) plus CSV
series into ``--out``. Exit codes: 0 success, 1 a verification check failed,
2 bad input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
import time
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from .bifurcation import bisect_lambda, kappa_sweep
from .core import Field, make_grid
from .errors import NumericalFailure, PreconditionError, QuasiflowError
from .flow import evolve, initial_profile
from .params import Params
from .records import RunRecord, load_run, read_series_csv, serialize_run, series_csv, write_atomic
from .spectral import nondegeneracy_report
from .stationary import (StationaryProfile, decay_rate, first_integral_residual_1d, ode_residual,
                         pohozaev_residual, pohozaev_terms, shoot)

log = logging.getLogger("quasiflow")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise PreconditionError(f"{self.prog}: {message}")


def _bracket(text: str):
    try:
        lo, hi = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}")
    return lo, hi


def _kappas(text: str):
    return [float(x) for x in text.split(",") if x]


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="quasiflow", description=__doc__.splitlines()[0])
    top.add_argument("-v", "--verbose", action="store_true")
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, flow=False):
        p.add_argument("--dim", type=int, default=1)
        p.add_argument("--p", type=float, default=3.0)
        p.add_argument("--kappa", type=float, default=1.0)
        p.add_argument("--rmax", type=float, default=15.0)
        p.add_argument("--nr", type=int, default=1500)
        p.add_argument("--out", type=Path, default=Path("runs"))
        p.add_argument("--exploratory", action="store_true",
                       help="allow exponents outside the admissible range")
        if flow:
            p.add_argument("--profile", default="gauss:4")
            p.add_argument("--tmax", type=float, default=200.0)
            p.add_argument("--cadence", type=float, default=1.0)

    ev = sub.add_parser("evolve", help="integrate the flow from lambda * profile")
    common(ev, flow=True)
    ev.add_argument("--lambda", dest="lam", type=float, default=1.0)

    for name, text in (("shoot", "ground state by shooting"),
                       ("spectrum", "linearized spectrum around the ground state")):
        p = sub.add_parser(name, help=text)
        common(p)
        p.add_argument("--tol", type=float, default=1e-10)

    bi = sub.add_parser("bisect", help="bracket the amplitude threshold")
    common(bi, flow=True)
    bi.add_argument("--bracket", type=_bracket, default=(0.05, 10.0))
    bi.add_argument("--iters", type=int, default=12)
    bi.add_argument("--tol", type=float, default=None, help="stop once the bracket is this narrow")

    sw = sub.add_parser("sweep-kappa", help="threshold bracket for several kappa values")
    common(sw, flow=True)
    sw.add_argument("--kappas", type=_kappas, default=[0.0, 0.5, 1.0, 2.0])
    sw.add_argument("--bracket", type=_bracket, default=(0.05, 10.0))
    sw.add_argument("--iters", type=int, default=12)
    sw.add_argument("--tol", type=float, default=None)

    ve = sub.add_parser("verify", help="certificate suite on a stored profile and/or acceptance criteria")
    ve.add_argument("--run", type=Path, help="shoot.json written by the shoot command")
    ve.add_argument("--criteria", default=None, help="comma-separated numbers 1-9 or 'all'")
    ve.add_argument("--out", type=Path, default=Path("runs"))
    return top


# -- helpers --------------------------------------------------------------------------

def _params(a, lam: float = 0.0) -> Params:
    return Params(a.dim, a.p, a.kappa, lam, strict=not a.exploratory)


def _profile(spec: str, grid):
    kind, _, arg = spec.partition(":")
    if kind in ("gauss", "bump"):
        try:
            width = float(arg)
        except ValueError:
            raise PreconditionError(f"bad profile width in {spec!r}")
        return ("gaussian" if kind == "gauss" else "bump", width)
    if kind == "file":
        try:
            data = np.loadtxt(arg, delimiter=",", ndmin=2, comments="#")
        except (OSError, ValueError) as exc:
            raise PreconditionError(f"cannot read profile {arg!r}: {exc}")
        if data.shape[1] >= 2:
            # (r, value) columns, resampled on the grid
            values = np.interp(grid.nodes, data[:, 0], data[:, 1], right=0.0)
        else:
            values = data[:, 0]
        return ("table", values)
    raise PreconditionError(f"profile must be gauss:σ, bump:σ or file:path, got {spec!r}")


def _grid_dict(g) -> dict:
    return {"dim": g.dim, "rmax": g.rmax, "nr": g.n}


def _params_dict(prm: Params) -> dict:
    return {"dim": prm.dim, "p": prm.p, "kappa": prm.kappa, "lambda": prm.lam,
            "exploratory": prm.exploratory}


def _emit(out: Path, record: RunRecord, t0: float, files: dict) -> RunRecord:
    for name, text in files.items():
        write_atomic(out / name, text)
    record.wall_time = round(time.perf_counter() - t0, 6)
    write_atomic(out / f"{record.command.replace('-', '_')}.json", serialize_run(record))
    return record


def _fmt(x) -> str:
    return "None" if x is None else f"{x:.10g}"


# -- commands -------------------------------------------------------------------------

def cmd_evolve(a, t0) -> int:
    grid = make_grid(a.dim, a.rmax, a.nr)
    prm = _params(a, a.lam)
    traj = evolve(prm, initial_profile(_profile(a.profile, grid), a.lam, grid), a.tmax, a.cadence)
    snaps = series_csv([[t] + list(f.values) for t, f in traj.snapshots],
                       ["t"] + [f"r{i}" for i in range(grid.n + 1)])
    rec = RunRecord("evolve", _params_dict(prm), dict(_grid_dict(grid), profile=a.profile,
                                                      tmax=a.tmax, cadence=a.cadence),
                    traj.classification.value,
                    {"t_end": traj.t_end, "final_sup": traj.series[-1][1],
                     "final_I": traj.series[-1][2], "blowup_certificate": traj.blowup_certificate,
                     "breakdown": traj.breakdown, "steps": len(traj.series) - 1},
                    {"series": "evolve_series.csv", "snapshots": "evolve_snapshots.csv"})
    _emit(a.out, rec, t0, {"evolve_series.csv": series_csv(traj.series), "evolve_snapshots.csv": snaps})
    print(f"classification={traj.classification.value} t_end={_fmt(traj.t_end)}")
    return 0


def _shoot_scalars(prof: StationaryProfile) -> dict:
    t = pohozaev_terms(prof)
    out = {"w0": prof.w0, "decay_rate": prof.decay_rate, "ode_residual": prof.ode_residual_sup,
           "shoot_tolerance": prof.shoot_tolerance, "match_radius": prof.match_radius,
           "bracket_lo": prof.bracket[0], "bracket_hi": prof.bracket[1],
           "iterations": prof.iterations, "pohozaev_residual": pohozaev_residual(prof),
           "pohozaev_potential_side": t.potential_side, "mass": t.mass}
    if prof.params.dim == 1:
        fi = first_integral_residual_1d(prof)
        out.update(first_integral_drift=fi.drift, first_integral_h0=fi.h0)
    return out


def _profile_csv(prof: StationaryProfile) -> str:
    return series_csv(np.column_stack([prof.grid.nodes, prof.w.values, prof.slope()]),
                      ["r", "w", "dw"])


def cmd_shoot(a, t0) -> int:
    grid = make_grid(a.dim, a.rmax, a.nr)
    prm = _params(a)
    prof = shoot(prm, a.tol, grid=grid)
    rec = RunRecord("shoot", _params_dict(prm), dict(_grid_dict(grid), tol=a.tol), None,
                    _shoot_scalars(prof), {"profile": "shoot_profile.csv"})
    _emit(a.out, rec, t0, {"shoot_profile.csv": _profile_csv(prof)})
    print(f"w0={prof.w0:.10f} decay_rate={prof.decay_rate:.6f} ode_residual={prof.ode_residual_sup:.3g}")
    return 0


def cmd_spectrum(a, t0) -> int:
    grid = make_grid(a.dim, a.rmax, a.nr)
    prm = _params(a)
    prof = shoot(prm, a.tol, grid=grid)
    s = nondegeneracy_report(prof)
    scalars = {"w0": prof.w0, "mu1": s.mu1, "mu_ell1": s.mu_ell1,
               "zero_mode_corr": s.zero_mode_corr, "gap": s.gap, "gap_sector": s.gap_sector,
               "psi1_sign_changes": s.psi1_sign_changes}
    for ell, vals in s.sector_eigenvalues.items():
        for j, v in enumerate(vals):
            scalars[f"sector{ell}_eig{j}"] = v
    rec = RunRecord("spectrum", _params_dict(prm), dict(_grid_dict(grid), tol=a.tol), None, scalars,
                    {"psi1": "spectrum_psi1.csv"})
    psi = series_csv(np.column_stack([grid.nodes, s.psi1.values]), ["r", "psi1"])
    _emit(a.out, rec, t0, {"spectrum_psi1.csv": psi})
    print(f"mu1={s.mu1:.8g} mu_ell1={s.mu_ell1:.3g} corr={s.zero_mode_corr:.6f} gap={s.gap:.6g}")
    return 0


def _runs_csv(res) -> str:
    return series_csv([[r.lam, r.classification.value, r.t_end, r.tmax,
                        "" if r.certificate is None else repr(r.certificate)] for r in res.runs],
                      ["lambda", "classification", "t_end", "tmax", "certificate"])


def cmd_bisect(a, t0) -> int:
    grid = make_grid(a.dim, a.rmax, a.nr)
    prm = _params(a)
    res = bisect_lambda(prm, _profile(a.profile, grid), a.bracket, a.iters, a.tmax,
                        grid=grid, cadence=a.cadence, width_tol=a.tol)
    scalars = {"lambda_lo": res.lambda_lo, "lambda_hi": res.lambda_hi, "width": res.width,
               "midpoint": res.midpoint, "iterations": res.iterations,
               "evolutions": res.evolutions, "undecided": len(res.undecided),
               "interval_gap": res.interval_gap()}
    rec = RunRecord("bisect", _params_dict(prm),
                    dict(_grid_dict(grid), profile=a.profile, tmax=a.tmax, cadence=a.cadence,
                         bracket=list(a.bracket), iters=a.iters),
                    None, scalars, {"runs": "bisect_runs.csv"})
    _emit(a.out, rec, t0, {"bisect_runs.csv": _runs_csv(res)})
    print(f"lambda0 in [{res.lambda_lo:.8g}, {res.lambda_hi:.8g}] after {res.evolutions} evolutions")
    return 0


def cmd_sweep(a, t0) -> int:
    grid = make_grid(a.dim, a.rmax, a.nr)
    prm = _params(a)
    phi0 = _profile(a.profile, grid)
    entries = kappa_sweep(a.kappas, prm, phi0, a.bracket, a.iters, a.tmax, grid=grid,
                          cadence=a.cadence, width_tol=a.tol)
    rows, scalars = [], {}
    for e in entries:
        lo = e.result.lambda_lo if e.result else math.nan
        hi = e.result.lambda_hi if e.result else math.nan
        rows.append([e.kappa, lo, hi, e.error or ""])
        scalars[f"kappa={e.kappa:g}"] = {"lambda_lo": lo, "lambda_hi": hi, "error": e.error}
        print(f"kappa={e.kappa:g}: [{_fmt(lo)}, {_fmt(hi)}]" + (f" {e.error}" if e.error else ""))
    rec = RunRecord("sweep-kappa", _params_dict(prm),
                    dict(_grid_dict(grid), profile=a.profile, tmax=a.tmax, cadence=a.cadence,
                         bracket=list(a.bracket), iters=a.iters, kappas=a.kappas),
                    None, scalars, {"sweep": "sweep_kappa.csv"})
    _emit(a.out, rec, t0, {"sweep_kappa.csv": series_csv(rows, ["kappa", "lambda_lo", "lambda_hi", "error"])})
    return 0 if all(e.error is None for e in entries) else 3


def load_profile(record_path: Path) -> StationaryProfile:
    """Rebuild a ground state from a ``shoot`` record and its profile CSV."""
    rec = load_run(Path(record_path).read_bytes())
    if rec.command != "shoot":
        raise PreconditionError(f"{record_path} is a {rec.command!r} record, not shoot")
    header, rows = read_series_csv((Path(record_path).parent / rec.series["profile"]).read_text())
    if header != ["r", "w", "dw"]:
        raise PreconditionError(f"unexpected profile columns {header}")
    data = np.array(rows)
    g = rec.grid
    grid = make_grid(int(g["dim"]), float(g["rmax"]), int(g["nr"]))
    pr = rec.params
    prm = Params(int(pr["dim"]), float(pr["p"]), float(pr["kappa"]), strict=not pr["exploratory"])
    s = rec.scalars
    return StationaryProfile(prm, Field(grid, data[:, 1]), Field(grid, data[:, 2]), float(s["w0"]),
                             float(s["decay_rate"]), float(s["ode_residual"]),
                             float(s["shoot_tolerance"]), float(s["match_radius"]),
                             (s["bracket_lo"], s["bracket_hi"]), int(s["iterations"]))


def certificate_suite(prof: StationaryProfile) -> List[tuple]:
    """(name, value, limit, ok) rows for a stored ground state."""
    N = prof.params.dim
    rows = []
    res = ode_residual(prof)
    rows.append(("ode_residual", res, "<= 1e-4*w0", res <= 1e-4 * prof.w0))
    if N == 1:
        fi = first_integral_residual_1d(prof)
        rows.append(("first_integral_drift", fi.drift, "<= 1e-6", fi.drift <= 1e-6))
        rows.append(("first_integral_h0", fi.h0, "<= 1e-6", fi.h0 <= 1e-6))
    if N == 2:
        t = pohozaev_terms(prof)
        v = abs(t.potential_side) / t.mass
        rows.append(("pohozaev_potential_over_mass", v, "<= 1e-4", v <= 1e-4))
    else:
        v = pohozaev_residual(prof)
        rows.append(("pohozaev_relative", v, "<= 1e-3", v <= 1e-3))
    d = decay_rate(prof)
    rows.append(("decay_rate", d, "> 0", d > 0))
    return rows


def cmd_verify(a, t0) -> int:
    if a.run is None and a.criteria is None:
        raise PreconditionError("verify needs --run and/or --criteria")
    scalars, ok = {}, True
    if a.run is not None:
        for name, value, limit, good in certificate_suite(load_profile(a.run)):
            scalars[name] = {"value": value, "limit": limit, "passed": good}
            ok &= good
            print(f"[{'PASS' if good else 'FAIL'}] {name}={value:.6g} ({limit})")
    if a.criteria is not None:
        from .acceptance import CRITERIA, run_criteria
        if a.criteria == "all":
            numbers = sorted(CRITERIA)
        else:
            try:
                numbers = [int(x) for x in a.criteria.split(",")]
            except ValueError:
                raise PreconditionError(f"bad criteria list {a.criteria!r}")
            bad = [k for k in numbers if k not in CRITERIA]
            if bad:
                raise PreconditionError(f"unknown criteria {bad}; valid are 1-9")
        for res in run_criteria(numbers):
            print(res.line())
            scalars[f"criterion_{res.number}"] = res.as_dict()
            ok &= res.passed
    rec = RunRecord("verify", {}, {}, "passed" if ok else "failed", scalars,
                    {}, note="run: " + (str(a.run) if a.run else "none"))
    _emit(a.out, rec, t0, {})
    return 0 if ok else 1


COMMANDS = {"evolve": cmd_evolve, "shoot": cmd_shoot, "spectrum": cmd_spectrum,
            "bisect": cmd_bisect, "sweep-kappa": cmd_sweep, "verify": cmd_verify}


def main(argv: Optional[Sequence[str]] = None) -> int:
    t0 = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return COMMANDS[args.command](args, t0)
    except PreconditionError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except NumericalFailure as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except QuasiflowError as exc:  # pragma: no cover
        print(f"error: {exc}", file=sys.stderr)
        return 3


def run_command(argv: Sequence[str]) -> int:
    return main(list(argv))


if __name__ == "__main__":
    sys.exit(main())
