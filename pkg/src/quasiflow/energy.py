"""Lyapunov energy of the flow, its dissipation identity and blow-up certificates."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .core import Field, RadialGrid, derivative_values, integrate_values
from .errors import PreconditionError

CERTIFICATE_LEVEL = -1e-8


@dataclass(frozen=True)
class EnergyReport:
    t: float
    I_kappa: float
    dissipation: float
    identity_residual: float


def energy_density(u: np.ndarray, grid: RadialGrid, p: float, kappa: float) -> np.ndarray:
    d = derivative_values(u, grid.h)
    return 0.5 * ((1 + 2 * kappa * u * u) * d * d + u * u) - np.abs(u) ** (p + 1) / (p + 1)


def energy_values(u: np.ndarray, grid: RadialGrid, p: float, kappa: float) -> float:
    return integrate_values(energy_density(u, grid, p, kappa), grid)


def energy(u: Field, params) -> float:
    """I_κ(u) = ½∫((1+2κu²)|∇u|² + u²) - ∫|u|^{p+1}/(p+1)."""
    return energy_values(u.values, u.grid, params.p, params.kappa)


def energy_local(u: Field, R: float, params) -> float:
    """Energy restricted to the ball r <= R (same quadrature as :func:`energy`)."""
    g = u.grid
    if not 0 < R <= g.rmax:
        raise PreconditionError(f"need 0 < R <= rmax={g.rmax}, got {R}")
    dens = energy_density(u.values, g, params.p, params.kappa)
    if R == g.rmax:
        return integrate_values(dens, g)
    # whole dual cells inside the ball, plus the partial cell containing R
    edges = np.concatenate(([0.0], g.faces, [g.rmax]))
    N = g.dim
    inner = np.clip(edges[1:], None, R)
    lower = np.clip(edges[:-1], None, R)
    vol = g.omega * (inner**N - lower**N) / N
    return float(np.dot(vol, dens))


def plateau_profile(grid: RadialGrid, height: float, R: float) -> Field:
    """Value ``height`` on r <= R-1, smooth monotone ramp to 0 on [R-1, R]."""
    r = grid.nodes
    s = np.clip(R - r, 0.0, 1.0)
    # C^1 smoothstep
    ramp = s * s * (3 - 2 * s)
    return Field(grid, height * ramp)


def p3_condition(phi0: Field, kappa: float = 1.0) -> float:
    """∫(κφ²|∇φ|² - φ⁴/4); negative means the p = 3 energy turns negative
    along the ray λφ for large λ."""
    u = phi0.values
    d = derivative_values(u, phi0.grid.h)
    return integrate_values(kappa * u * u * d * d - 0.25 * u**4, phi0.grid)


def energy_identity_residual(traj) -> List[EnergyReport]:
    """Compare ΔI/Δt with -‖Δu/Δt‖² over consecutive snapshots."""
    snaps = traj.snapshots
    if len(snaps) < 3:
        raise PreconditionError("need at least 3 snapshots")
    p, k = traj.params.p, traj.params.kappa
    out = []
    for (t0, u0), (t1, u1) in zip(snaps[:-1], snaps[1:]):
        dt = t1 - t0
        I0 = energy_values(u0.values, u0.grid, p, k)
        I1 = energy_values(u1.values, u1.grid, p, k)
        diss = integrate_values(((u1.values - u0.values) / dt) ** 2, u0.grid)
        res = abs((I1 - I0) / dt + diss) / max(abs(I0), 1.0)
        out.append(EnergyReport(t0, I0, diss, res))
    return out


def blowup_certificate(traj) -> Optional[float]:
    """First recorded time with I(u(t)) < -1e-8, or None."""
    for t, _, I, _ in traj.series:
        if I < CERTIFICATE_LEVEL:
            return t
    return None


def energy_monotonicity_violation(traj) -> float:
    """Largest relative increase of I between consecutive accepted steps."""
    I = np.array([s[2] for s in traj.series])
    if I.size < 2:
        return 0.0
    inc = np.diff(I) / np.maximum(1.0, np.abs(I[:-1]))
    return float(max(0.0, inc.max()))
