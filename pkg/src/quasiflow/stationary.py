"""Positive radial ground state of the stationary problem, by shooting.

The radial profile solves

    (1 + 2κw²)(w'' + (N-1)/r w') + 2κw(w')² - w + w^p = 0,   w'(0) = 0,

and is found by bisection on ``s = w(0)`` between undershooting shots (w'
turns positive while w > 0) and overshooting shots (w crosses zero).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import kve

from .core import Field, RadialGrid, derivative_values, integrate_values, laplacian_values, make_grid
from .errors import DegenerateWindow, NoBracket, PreconditionError
from .params import Params, threshold_constant

S_HIGH = 10.0
# the bracket low end sits just below the threshold constant so that the
# one-dimensional case, where w(0) equals it, is strictly bracketed
LOW_NUDGE = 1e-6
R_SHOOT_MAX = 200.0
ODE_RTOL = 1e-13
ODE_ATOL = 1e-16
MATCH_REL = 1e-4


class Shot(Enum):
    OVERSHOOT = "overshoot"
    UNDERSHOOT = "undershoot"


@dataclass(frozen=True, eq=False)
class StationaryProfile:
    params: Params
    w: Field
    dw: Optional[Field]
    w0: float
    decay_rate: float
    ode_residual_sup: float
    shoot_tolerance: float
    match_radius: float = math.inf
    bracket: tuple = (math.nan, math.nan)
    iterations: int = 0

    @property
    def grid(self) -> RadialGrid:
        return self.w.grid

    def slope(self) -> np.ndarray:
        if self.dw is not None:
            return self.dw.values
        return derivative_values(self.w.values, self.grid.h)


def _power(w, p):
    return np.abs(w) ** (p - 1) * w


def _make_rhs(params: Params):
    N, p, k = params.dim, params.p, params.kappa

    def rhs(r, y):
        w, v = y
        a = 1 + 2 * k * w * w
        acc = (w - _power(w, p) - 2 * k * w * v * v) / a - (N - 1) / r * v
        return [v, acc]

    return rhs


def _start(s: float, params: Params, r0: float):
    c = (s - s**params.p) / (params.dim * (1 + 2 * params.kappa * s * s))
    return [s + 0.5 * c * r0 * r0, c * r0]


def _integrate_shot(s: float, params: Params, dense: bool = False, r_end: float = R_SHOOT_MAX):
    r0 = 1e-6

    def hit_zero(r, y):
        return y[0]
    hit_zero.terminal = True
    hit_zero.direction = -1

    def turn_up(r, y):
        return y[1]
    turn_up.terminal = True
    turn_up.direction = 1

    return solve_ivp(_make_rhs(params), (r0, r_end), _start(s, params, r0),
                     method="DOP853", rtol=ODE_RTOL, atol=ODE_ATOL,
                     events=(hit_zero, turn_up), dense_output=dense)


def classify_shot(s: float, params: Params) -> Shot:
    sol = _integrate_shot(s, params)
    if sol.t_events[0].size:
        return Shot.OVERSHOOT
    if sol.t_events[1].size:
        return Shot.UNDERSHOOT
    # no event before r_end: the shot tracks the decaying branch to roundoff;
    # the sign of w + w' tells which side of it the shot leaves on
    w, v = sol.y[:, -1]
    return Shot.OVERSHOOT if w + v < 0 else Shot.UNDERSHOOT


def _bessel_tail(r, r_m, dim):
    """Decaying solution of w'' + (N-1)/r w' = w normalized to 1 at r_m,
    together with its logarithmic derivative."""
    nu = (dim - 2) / 2
    ratio = (r_m / r) ** nu * kve(nu, r) / kve(nu, r_m) * np.exp(-(r - r_m))
    logd = -kve(nu + 1, r) / kve(nu, r)
    return ratio, logd


def shoot(params: Params, tol: float = 1e-10, grid: Optional[RadialGrid] = None) -> StationaryProfile:
    """Ground state by bisection on w(0); sampled on ``grid`` (default rmax=15, n=1500)."""
    if not (1e-12 <= tol <= 1e-4):
        raise PreconditionError(f"shooting tolerance must lie in [1e-12, 1e-4], got {tol}")
    if grid is None:
        grid = make_grid(params.dim, 15.0, 1500)
    if grid.dim != params.dim:
        raise PreconditionError("grid dimension differs from params.dim")

    s_lo = threshold_constant(params.p) * (1 - LOW_NUDGE)
    s_hi = S_HIGH
    if classify_shot(s_lo, params) is not Shot.UNDERSHOOT or classify_shot(s_hi, params) is not Shot.OVERSHOOT:
        raise NoBracket(f"[{s_lo:.6g}, {s_hi}] does not straddle the ground state "
                        f"for N={params.dim}, p={params.p}, kappa={params.kappa}")
    iterations = 0
    while s_hi - s_lo > tol:
        mid = 0.5 * (s_lo + s_hi)
        if mid in (s_lo, s_hi):
            break
        if classify_shot(mid, params) is Shot.OVERSHOOT:
            s_hi = mid
        else:
            s_lo = mid
        iterations += 1
    s = 0.5 * (s_lo + s_hi)

    w, dw, r_m = _sample_profile(s, s_lo, s_hi, params, grid)
    wf, dwf = Field(grid, w), Field(grid, dw)
    prof = StationaryProfile(params, wf, dwf, float(w[0]), math.nan, math.nan, tol,
                             match_radius=r_m, bracket=(s_lo, s_hi), iterations=iterations)
    try:
        delta = decay_rate(prof)
    except DegenerateWindow:
        delta = math.nan
    object.__setattr__(prof, "decay_rate", delta)
    object.__setattr__(prof, "ode_residual_sup", ode_residual(prof))
    return prof


def _sample_profile(s, s_lo, s_hi, params, grid):
    sols = [_integrate_shot(x, params, dense=True) for x in (s_lo, s, s_hi)]
    r_stop = min(sol.t[-1] for sol in sols)
    r_fine = np.linspace(sols[1].t[0], r_stop, 20001)
    w_lo, w_mid, w_hi = (sol.sol(r_fine)[0] for sol in sols)
    spread = np.abs(w_hi - w_lo)
    bad = np.nonzero((spread > MATCH_REL * np.abs(w_mid)) | (w_mid <= 0))[0]
    r_m = r_fine[bad[0] - 1] if bad.size else r_stop
    r_m = min(r_m, grid.rmax)

    r = grid.nodes
    w = np.empty_like(r)
    dw = np.empty_like(r)
    inner = r <= r_m
    inner[0] = False
    w[0], dw[0] = s, 0.0
    y = sols[1].sol(r[inner])
    w[inner], dw[inner] = y[0], y[1]
    outer = r > r_m
    if outer.any():
        w_m = sols[1].sol(r_m)[0]
        ratio, logd = _bessel_tail(r[outer], r_m, params.dim)
        w[outer] = w_m * ratio
        dw[outer] = w[outer] * logd
    return w, dw, float(r_m)


def ode_residual(profile: StationaryProfile) -> float:
    """Sup over interior nodes of the stationary equation residual."""
    res = stationary_residual_values(profile.w.values, profile.grid, profile.params)
    return float(np.max(np.abs(res[1:-1])))


def stationary_residual_values(w: np.ndarray, grid: RadialGrid, params: Params) -> np.ndarray:
    k = params.kappa
    lap = laplacian_values(w, grid)
    d = derivative_values(w, grid.h)
    return (1 + 2 * k * w * w) * lap + 2 * k * w * d * d - w + _power(w, params.p)


class FirstIntegral(NamedTuple):
    drift: float      # sup_r |H(r) - H(0)|
    h0: float         # |H(0)|, zero for a decaying solution


def hamiltonian(profile: StationaryProfile) -> np.ndarray:
    w, v = profile.w.values, profile.slope()
    k, p = profile.params.kappa, profile.params.p
    return 0.5 * (1 + 2 * k * w * w) * v * v + np.abs(w) ** (p + 1) / (p + 1) - 0.5 * w * w


def first_integral_residual_1d(profile: StationaryProfile) -> FirstIntegral:
    if profile.params.dim != 1:
        raise PreconditionError("the first integral exists only for N = 1")
    H = hamiltonian(profile)
    return FirstIntegral(float(np.max(np.abs(H - H[0]))), float(abs(H[0])))


class PohozaevTerms(NamedTuple):
    gradient_side: float   # (N-2)/(2N) ∫ (1+2κw²)|∇w|²
    potential_side: float  # ∫ w^{p+1}/(p+1) - w²/2
    mass: float            # ∫ w²


def pohozaev_terms(profile: StationaryProfile) -> PohozaevTerms:
    g, N = profile.grid, profile.params.dim
    w, v = profile.w.values, profile.slope()
    k, p = profile.params.kappa, profile.params.p
    grad = integrate_values((1 + 2 * k * w * w) * v * v, g)
    pot = integrate_values(np.abs(w) ** (p + 1) / (p + 1) - 0.5 * w * w, g)
    return PohozaevTerms((N - 2) / (2 * N) * grad, pot, integrate_values(w * w, g))


def pohozaev_residual(profile: StationaryProfile) -> float:
    t = pohozaev_terms(profile)
    return abs(t.gradient_side - t.potential_side) / max(abs(t.potential_side), 1e-12)


def decay_rate(profile, window=None) -> float:
    """Least-squares slope of -log w on ``window`` (default [rmax/2, 3rmax/4])."""
    f = profile.w if isinstance(profile, StationaryProfile) else profile
    r, w = f.grid.nodes, f.values
    lo, hi = window if window is not None else (f.grid.rmax / 2, 0.75 * f.grid.rmax)
    sel = (r >= lo) & (r <= hi)
    if sel.sum() < 2 or np.any(w[sel] <= 1e-300):
        raise DegenerateWindow(f"profile not positive on [{lo}, {hi}]")
    slope = np.polyfit(r[sel], -np.log(w[sel]), 1)[0]
    return float(slope)
