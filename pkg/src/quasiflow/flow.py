"""Time integration of the radial quasilinear flow

    u_t = div((1 + 2κu²)∇u) - 2κu|∇u|² - u + |u|^{p-1}u,

which is the divergence form of u_t - Δu - κuΔ(u²) + u = |u|^{p-1}u.
The principal part and the linear damping are implicit with the diffusion
coefficient frozen at the old level; the remaining terms are explicit.
Step sizes are controlled by step doubling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import solveh_banded

from .core import Field, RadialGrid, derivative_values, integrate_values, divergence_bands, laplacian_values
from .energy import CERTIFICATE_LEVEL, energy_values
from .errors import PreconditionError, StiffnessBreakdown
from .params import Params

VANISH_LEVEL = 1e-8
BLOWUP_LEVEL = 1e3
CONVERGE_WINDOW = 10.0
CONVERGE_SUP_RTOL = 1e-6
CONVERGE_L2_RTOL = 1e-5

DT_MIN = 1e-10
RTOL = 1e-6
GROW_AFTER = 5
GROW_FACTOR = 1.2


class Classification(str, Enum):
    VANISH = "Vanish"
    CONVERGE = "Converge"
    BLOWUP = "BlowUp"
    UNDECIDED = "Undecided"


@dataclass(frozen=True)
class FlowState:
    field: Field
    t: float = 0.0
    dt: float = 1e-3
    steps: int = 0
    streak: int = 0


@dataclass
class Trajectory:
    params: Params
    grid: RadialGrid
    snapshots: List[Tuple[float, Field]] = field(default_factory=list)
    series: List[Tuple[float, float, float, float]] = field(default_factory=list)
    classification: Classification = Classification.UNDECIDED
    t_end: float = 0.0
    blowup_certificate: Optional[float] = None
    breakdown: bool = False
    final: Optional[Field] = None

    def times(self) -> np.ndarray:
        return np.array([s[0] for s in self.series])

    def sup_series(self) -> np.ndarray:
        return np.array([s[1] for s in self.series])

    def energy_series(self) -> np.ndarray:
        return np.array([s[2] for s in self.series])


# -- initial data ---------------------------------------------------------------

def initial_profile(kind, amplitude: float, grid: RadialGrid) -> Field:
    """Non-negative, radially non-increasing initial datum.

    ``kind`` is ``("gaussian", σ)``, ``("bump", σ)`` or ``("table", values)``.
    """
    if amplitude < 0:
        raise PreconditionError("amplitude must be non-negative")
    name, arg = kind
    r = grid.nodes
    if name in ("gaussian", "gauss"):
        if arg <= 0:
            raise PreconditionError("width must be positive")
        v = np.exp(-(r / arg) ** 2)
    elif name == "bump":
        if arg <= 0:
            raise PreconditionError("width must be positive")
        v = np.zeros_like(r)
        inside = r < arg
        v[inside] = np.exp(-arg**2 / (arg**2 - r[inside] ** 2))
    elif name == "table":
        v = np.asarray(arg, dtype=float)
        if v.shape != r.shape:
            raise PreconditionError(f"table needs {r.size} values, got {v.shape}")
        if np.any(v < 0) or np.any(np.diff(v) > 0):
            raise PreconditionError("table profile must be non-negative and non-increasing")
    else:
        raise PreconditionError(f"unknown profile kind {name!r}")
    v = amplitude * v
    v[-1] = 0.0
    return Field(grid, v)


# -- pointwise right-hand side --------------------------------------------------

def rhs_values(u: np.ndarray, grid: RadialGrid, params: Params) -> np.ndarray:
    k, p = params.kappa, params.p
    lap = laplacian_values(u, grid)
    d = derivative_values(u, grid.h)
    out = (1 + 2 * k * u * u) * lap + 2 * k * u * d * d - u + np.abs(u) ** (p - 1) * u
    out[-1] = 0.0
    return out


def rhs(u: Field, params: Params) -> Field:
    """(1+2κu²)Δu + 2κu|∇u|² - u + |u|^{p-1}u, zero at the Dirichlet node."""
    return u.like(rhs_values(u.values, u.grid, params))


# -- stepping ---------------------------------------------------------------------

def _substep(u: np.ndarray, dt: float, grid: RadialGrid, params: Params) -> np.ndarray:
    k, p = params.kappa, params.p
    vol = grid.volumes[:-1]
    a2 = k * u * u
    coef = 1 + a2[:-1] + a2[1:]
    diag, off = divergence_bands(grid, coef)
    d = derivative_values(u, grid.h)
    explicit = -2 * k * u * d * d + np.abs(u) ** (p - 1) * u
    b = vol * (u[:-1] + dt * explicit[:-1])
    ab = np.empty((2, grid.n))
    ab[0, 0] = 0.0
    ab[0, 1:] = dt * off
    ab[1] = (1 + dt) * vol + dt * diag
    out = np.zeros_like(u)
    out[:-1] = solveh_banded(ab, b, overwrite_ab=True, overwrite_b=True, check_finite=False)
    return out


def _try_step(u, dt, grid, params):
    full = _substep(u, dt, grid, params)
    half = _substep(_substep(u, 0.5 * dt, grid, params), 0.5 * dt, grid, params)
    err = float(np.max(np.abs(full - half)))
    return half, err


def step(state: FlowState, params: Params, *, rtol: float = RTOL, dt_min: float = DT_MIN,
         dt_max: Optional[float] = None, dt_cap: Optional[float] = None) -> FlowState:
    """One accepted step. ``dt_cap`` clips this step only (to land on output times)."""
    grid = state.field.grid
    if dt_max is None:
        dt_max = 0.5 * grid.h
    u = state.field.values
    dt = min(state.dt, dt_max)
    while True:
        if dt < dt_min:
            raise StiffnessBreakdown(state.t, dt)
        trial = dt if dt_cap is None else min(dt, dt_cap)
        new, err = _try_step(u, trial, grid, params)
        if np.all(np.isfinite(new)) and err <= rtol * max(1.0, float(np.max(np.abs(new)))):
            break
        dt = 0.5 * trial
    streak = state.streak + 1
    if streak >= GROW_AFTER:
        dt = min(dt * GROW_FACTOR, dt_max)
        streak = 0
    return FlowState(Field(grid, new), state.t + trial, dt, state.steps + 1, streak)


# -- classification ---------------------------------------------------------------

def _snapshot_near(traj: Trajectory, t: float) -> Optional[Field]:
    best = None
    for ts, f in traj.snapshots:
        if best is None or abs(ts - t) < abs(best[0] - t):
            best = (ts, f)
    if best is None or abs(best[0] - t) > 1e-6 * max(1.0, abs(t)):
        return None
    return best[1]


def classify(traj: Trajectory) -> Classification:
    """Vanish / BlowUp / Converge decision for a (possibly running) trajectory."""
    if not traj.series:
        return Classification.UNDECIDED
    t_last, sup_last = traj.series[-1][0], traj.series[-1][1]
    if sup_last <= VANISH_LEVEL:
        return Classification.VANISH
    if sup_last >= BLOWUP_LEVEL:
        return Classification.BLOWUP
    certified = any(s[2] < CERTIFICATE_LEVEL for s in traj.series)
    if traj.breakdown and certified:
        return Classification.BLOWUP
    if _converged(traj, t_last, sup_last):
        return Classification.CONVERGE
    return Classification.UNDECIDED


def _converged(traj: Trajectory, t_last: float, sup_last: float) -> bool:
    if not (1.0 <= sup_last < BLOWUP_LEVEL) or t_last < CONVERGE_WINDOW:
        return False
    t0 = t_last - CONVERGE_WINDOW
    sups = np.array([s[1] for s in traj.series if s[0] >= t0 - 1e-12])
    if np.max(np.abs(sups - sup_last)) / sup_last > CONVERGE_SUP_RTOL:
        return False
    now = _snapshot_near(traj, t_last)
    before = _snapshot_near(traj, t0)
    if now is None or before is None:
        return False
    g = now.grid
    diff = math.sqrt(integrate_values((now.values - before.values) ** 2, g))
    norm = math.sqrt(integrate_values(now.values**2, g))
    return diff <= CONVERGE_L2_RTOL * norm


# -- driver ----------------------------------------------------------------------

def evolve(params: Params, u0: Field, tmax: float, cadence: float = 1.0, *,
           rtol: float = RTOL, dt_min: float = DT_MIN, dt_max: Optional[float] = None,
           validate: bool = True) -> Trajectory:
    """Integrate until ``tmax`` or until a classification fires.

    Snapshots are stored at multiples of ``cadence``; the series records
    ``(t, sup_norm, I, dt)`` at every accepted step.
    """
    grid = u0.grid
    if validate:
        v = u0.values
        if np.any(v < 0) or np.any(np.diff(v) > 0):
            raise PreconditionError("initial datum must be non-negative and radially non-increasing")
    if cadence <= 0 or tmax < 0:
        raise PreconditionError("need cadence > 0 and tmax >= 0")
    if dt_max is None:
        dt_max = 0.5 * grid.h
    p, k = params.p, params.kappa
    u = u0.values.copy()
    u[-1] = 0.0
    state = FlowState(Field(grid, u), 0.0, dt_max, 0, 0)
    traj = Trajectory(params, grid)
    traj.snapshots.append((0.0, state.field))
    traj.series.append((0.0, float(np.max(np.abs(u))), energy_values(u, grid, p, k), 0.0))

    n_snap = 1
    while True:
        cls = classify(traj)
        if cls is not Classification.UNDECIDED or state.t >= tmax * (1 - 1e-14):
            break
        t_next = min(n_snap * cadence, tmax)
        try:
            state = step(state, params, rtol=rtol, dt_min=dt_min, dt_max=dt_max,
                         dt_cap=t_next - state.t)
        except StiffnessBreakdown:
            traj.breakdown = True
            cls = classify(traj)
            break
        uv = state.field.values
        t = state.t
        if abs(t - t_next) <= 1e-12 * max(1.0, t_next):
            t = t_next
            state = replace(state, t=t)
            if t_next == n_snap * cadence:
                traj.snapshots.append((t, state.field))
                n_snap += 1
        traj.series.append((t, float(np.max(np.abs(uv))), energy_values(uv, grid, p, k), state.dt))

    traj.classification = cls
    traj.t_end = state.t
    traj.final = state.field
    traj.blowup_certificate = next((s[0] for s in traj.series if s[2] < CERTIFICATE_LEVEL), None)
    return traj


# -- order and monotonicity harnesses -----------------------------------------------

@dataclass(frozen=True)
class OrderReport:
    violation: float
    scale: float
    times: int

    @property
    def relative(self) -> float:
        return self.violation / self.scale if self.scale > 0 else self.violation


def co_evolve(params: Params, fields: Sequence[Field], tmax: float, cadence: float = 1.0, *,
              rtol: float = RTOL, dt_min: float = DT_MIN, dt_max: Optional[float] = None):
    """Evolve several data with one shared step sequence; yields ``(t, [values])``
    at every accepted step. Stops early if any member leaves [0, 1e3]."""
    grid = fields[0].grid
    if dt_max is None:
        dt_max = 0.5 * grid.h
    us = [f.values.copy() for f in fields]
    for u in us:
        u[-1] = 0.0
    t, dt, streak = 0.0, dt_max, 0
    yield t, us
    n_out = 1
    while t < tmax * (1 - 1e-14):
        t_next = min(n_out * cadence, tmax)
        while True:
            if dt < dt_min:
                raise StiffnessBreakdown(t, dt)
            trial = min(dt, t_next - t)
            trials = [_try_step(u, trial, grid, params) for u in us]
            if all(err <= rtol * max(1.0, float(np.max(np.abs(new)))) for new, err in trials):
                break
            dt = 0.5 * trial
        us = [new for new, _ in trials]
        t += trial
        streak += 1
        if streak >= GROW_AFTER:
            dt, streak = min(dt * GROW_FACTOR, dt_max), 0
        if abs(t - t_next) <= 1e-12 * max(1.0, t_next):
            t = t_next
            n_out += 1
        yield t, us
        if any(np.max(np.abs(u)) >= BLOWUP_LEVEL or np.max(np.abs(u)) <= VANISH_LEVEL for u in us):
            break


def order_check(u0_low: Field, u0_high: Field, params: Params, tmax: float,
                cadence: float = 1.0, **kw) -> OrderReport:
    """Co-evolve ordered data and report the worst ordering violation."""
    if np.any(u0_low.values > u0_high.values):
        raise PreconditionError("u0_low must lie below u0_high")
    worst, scale, count = 0.0, 0.0, 0
    for _, (lo, hi) in co_evolve(params, [u0_low, u0_high], tmax, cadence, **kw):
        worst = max(worst, float(np.max(lo - hi)))
        scale = max(scale, float(np.max(np.abs(lo))), float(np.max(np.abs(hi))))
        count += 1
    return OrderReport(worst, scale, count)


@dataclass(frozen=True)
class MonotonicityReport:
    max_increase: float
    sup_norm: float
    flagged: bool


def monotonicity_check(traj: Trajectory, rtol: float = 1e-8) -> MonotonicityReport:
    """Largest forward difference u_{i+1} - u_i over all snapshots."""
    worst, scale = 0.0, 0.0
    fields = [f for _, f in traj.snapshots]
    if traj.final is not None:
        fields.append(traj.final)
    for f in fields:
        v = f.values
        worst = max(worst, float(np.max(np.diff(v))))
        scale = max(scale, float(np.max(np.abs(v))))
    return MonotonicityReport(worst, scale, worst > rtol * scale)


# -- diagnostics ----------------------------------------------------------------------

def positivity_violation(traj: Trajectory) -> float:
    """Most negative value over saved times relative to the sup-norm (0 if none)."""
    worst = 0.0
    for _, f in traj.snapshots:
        v = f.values
        s = float(np.max(np.abs(v)))
        if s > 0:
            worst = max(worst, -float(np.min(v)) / s)
    return worst


def far_field_ratio(traj: Trajectory) -> float:
    """sup over snapshots of u on r >= rmax/2, divided by the largest sup-norm of the run."""
    far = traj.grid.nodes >= traj.grid.rmax / 2
    peak = max(float(np.max(np.abs(f.values))) for _, f in traj.snapshots)
    if peak == 0:
        return 0.0
    return max(float(np.max(np.abs(f.values[far]))) for _, f in traj.snapshots) / peak


def windowed_h1_distance(traj: Trajectory, target: Field, t_start: float, length: float) -> float:
    """∫_{t_start}^{t_start+length} ‖u(t) - target‖²_{H¹} dt by trapezoid over snapshots."""
    g = traj.grid
    ts, vals = [], []
    for t, f in traj.snapshots:
        if t_start - 1e-12 <= t <= t_start + length + 1e-12:
            d = f.values - target.values
            dd = derivative_values(d, g.h)
            ts.append(t)
            vals.append(integrate_values(d * d + dd * dd, g))
    if len(ts) < 2:
        return math.nan
    return float(np.trapezoid(vals, ts))
