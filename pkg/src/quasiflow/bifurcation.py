"""Amplitude threshold λ₀ between vanishing and blow-up, by bisection on
run classifications, and its dependence on the quasilinear coefficient κ."""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .core import Field, RadialGrid, derivative_values, integrate_values, make_grid
from .energy import p3_condition
from .errors import AdmissibilityError, BracketFailure, QuasiflowError
from .flow import Classification, Trajectory, evolve, initial_profile
from .params import Params
from .stationary import StationaryProfile, shoot

log = logging.getLogger(__name__)

MAX_EXPAND = 8


@dataclass(frozen=True)
class RunSummary:
    lam: float
    classification: Classification
    t_end: float
    tmax: float
    certificate: Optional[float]
    steps: int


@dataclass
class BisectionResult:
    params: Params
    phi0: tuple
    lambda_lo: float
    lambda_hi: float
    iterations: int = 0
    evolutions: int = 0
    undecided: List[float] = field(default_factory=list)
    runs: List[RunSummary] = field(default_factory=list)

    @property
    def width(self) -> float:
        return self.lambda_hi - self.lambda_lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lambda_lo + self.lambda_hi)

    def interval_gap(self) -> float:
        """min{λ: BlowUp} - max{λ: Vanish} over all recorded runs (> 0 when ordered)."""
        van = [r.lam for r in self.runs if r.classification is Classification.VANISH]
        blo = [r.lam for r in self.runs if r.classification is Classification.BLOWUP]
        if not van or not blo:
            return math.inf
        return min(blo) - max(van)


def _default_grid(params: Params, grid: Optional[RadialGrid]) -> RadialGrid:
    return grid if grid is not None else make_grid(params.dim, 15.0, 1500)


def check_admissible_profile(params: Params, phi0: tuple, grid: RadialGrid) -> float:
    """For p = 3 the energy along λφ₀ must become negative; returns the p = 3 integral."""
    phi = initial_profile(phi0, 1.0, grid)
    if not np.any(phi.values > 0):
        raise AdmissibilityError("initial profile is identically zero")
    val = p3_condition(phi, params.kappa)
    if params.p == 3 and val >= 0:
        raise AdmissibilityError(
            f"p = 3 requires ∫(κφ²|∇φ|² - φ⁴/4) < 0 for the initial profile; got {val:.6g}")
    return val


def _run(params, phi0, lam, grid, tmax, cadence) -> Trajectory:
    u0 = initial_profile(phi0, lam, grid)
    return evolve(params.with_lam(lam), u0, tmax, cadence)


def bisect_lambda(params: Params, phi0: tuple, bracket: Tuple[float, float] = (0.05, 10.0),
                  iters: int = 12, tmax: float = 200.0, *, grid: Optional[RadialGrid] = None,
                  cadence: float = 1.0, width_tol: Optional[float] = None) -> BisectionResult:
    """Bisect the amplitude of ``phi0`` between Vanish and BlowUp.

    ``iters`` bounds the number of bracket-refining evaluations; endpoint
    checks and retries are counted separately in ``evolutions``.
    """
    grid = _default_grid(params, grid)
    check_admissible_profile(params, phi0, grid)
    lo, hi = map(float, bracket)
    if not 0 < lo < hi:
        raise BracketFailure(f"invalid bracket {bracket}")
    res = BisectionResult(params, tuple(phi0), lo, hi)

    def run(lam, t_end):
        traj = _run(params, phi0, lam, grid, t_end, cadence)
        res.evolutions += 1
        res.runs.append(RunSummary(lam, traj.classification, traj.t_end, t_end,
                                   traj.blowup_certificate, len(traj.series)))
        log.info("lambda=%.8g -> %s (t=%.4g)", lam, traj.classification.value, traj.t_end)
        return traj.classification

    def classify_at(lam):
        cls = run(lam, tmax)
        if cls is Classification.UNDECIDED:
            cls = run(lam, 2 * tmax)
        return cls

    # lower end must vanish, upper end must blow up
    for _ in range(MAX_EXPAND + 1):
        cls = classify_at(lo)
        if cls is Classification.VANISH:
            break
        if cls is Classification.BLOWUP:
            hi = min(hi, lo)
        lo /= 2
    else:
        raise BracketFailure(f"no vanishing amplitude found down to {lo * 2:.4g}")
    for _ in range(MAX_EXPAND + 1):
        cls = classify_at(hi)
        if cls is Classification.BLOWUP:
            break
        if cls is Classification.VANISH:
            lo = max(lo, hi)
        hi *= 2
    else:
        raise BracketFailure(f"no blow-up amplitude found up to {hi / 2:.4g}")
    res.lambda_lo, res.lambda_hi = lo, hi

    biased = [0.25, 0.75]
    frac = 0.5
    while res.iterations < iters:
        if width_tol is not None and res.width <= width_tol:
            break
        lam = lo + frac * (hi - lo)
        cls = classify_at(lam)
        res.iterations += 1
        if cls is Classification.VANISH:
            lo, frac = lam, 0.5
        elif cls is Classification.BLOWUP:
            hi, frac = lam, 0.5
        else:
            # converging runs near the threshold are expected; keep the
            # bracket and probe off-centre next
            res.undecided.append(lam)
            frac = biased[len(res.undecided) % 2]
        res.lambda_lo, res.lambda_hi = lo, hi
    return res


@dataclass
class ThresholdReport:
    lam: float
    classification: Classification
    w0: float
    plateau_time: float
    closest_sup_distance: float
    closest_time: float
    trailing_sup_distance: float
    window_h1: float
    trajectory: Trajectory = field(repr=False)


def plateau_duration(traj: Trajectory, level: float, lo: float = 0.5, hi: float = 1.5) -> float:
    """Longest contiguous time with sup-norm in [lo, hi] * level."""
    t = traj.times()
    s = traj.sup_series()
    inside = (s >= lo * level) & (s <= hi * level)
    best = cur = 0.0
    for j in range(1, t.size):
        if inside[j] and inside[j - 1]:
            cur += t[j] - t[j - 1]
            best = max(best, cur)
        else:
            cur = 0.0
    return best


def threshold_run(result: BisectionResult, tmax: float = 400.0, *, grid: Optional[RadialGrid] = None,
                  profile: Optional[StationaryProfile] = None, cadence: float = 0.25,
                  window: float = 1.0, lam: Optional[float] = None) -> ThresholdReport:
    """Evolve at the bracket midpoint and measure how closely the run shadows w."""
    params = result.params
    grid = _default_grid(params, grid)
    if profile is None:
        profile = shoot(params.with_lam(0.0), 1e-10, grid=grid)
    lam = result.midpoint if lam is None else lam
    traj = _run(params, result.phi0, lam, grid, tmax, cadence)
    w = profile.w.values
    dists = [(float(np.max(np.abs(f.values - w))), t) for t, f in traj.snapshots]
    closest, t_close = min(dists)
    trailing = [d for d, t in dists if t >= traj.t_end - window]
    # time-averaged H¹ distance over [t_close, t_close + window]
    h1 = []
    ts = []
    for t, f in traj.snapshots:
        if t_close <= t <= t_close + window + 1e-12:
            d = f.values - w
            dd = derivative_values(d, grid.h)
            h1.append(integrate_values(d * d + dd * dd, grid))
            ts.append(t)
    window_h1 = float(np.trapezoid(h1, ts)) if len(ts) > 1 else math.nan
    return ThresholdReport(lam, traj.classification, profile.w0,
                           plateau_duration(traj, profile.w0), closest, t_close,
                           max(trailing) if trailing else math.nan, window_h1, traj)


@dataclass
class SweepEntry:
    kappa: float
    lam0: float
    width: float
    result: Optional[BisectionResult] = None
    error: Optional[str] = None


def _sweep_one(args):
    kappa, params, phi0, bracket, iters, tmax, grid, cadence, width_tol = args
    try:
        prm = params.with_kappa(kappa)
        res = bisect_lambda(prm, phi0, bracket, iters, tmax, grid=grid, cadence=cadence,
                            width_tol=width_tol)
        return SweepEntry(kappa, res.midpoint, res.width, res)
    except QuasiflowError as exc:
        return SweepEntry(kappa, math.nan, math.nan, None, f"{type(exc).__name__}: {exc}")


def worker_count(jobs: int) -> int:
    env = os.environ.get("QUASIFLOW_THREADS")
    cap = int(env) if env else (os.cpu_count() or 1)
    return max(1, min(cap, jobs))


def kappa_sweep(kappas: Sequence[float], params: Params, phi0: tuple,
                bracket: Tuple[float, float] = (0.05, 10.0), iters: int = 12, tmax: float = 200.0,
                *, grid: Optional[RadialGrid] = None, cadence: float = 1.0,
                width_tol: Optional[float] = None, workers: Optional[int] = None) -> List[SweepEntry]:
    """λ₀ estimate for each κ with a shared initial profile; failures are recorded per κ."""
    kappas = [float(k) for k in kappas]
    if kappas != sorted(kappas):
        raise ValueError("kappas must be sorted ascending")
    grid = _default_grid(params, grid)
    jobs = [(k, params, tuple(phi0), bracket, iters, tmax, grid, cadence, width_tol) for k in kappas]
    n = workers if workers is not None else worker_count(len(jobs))
    if n <= 1:
        return [_sweep_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(_sweep_one, jobs))
