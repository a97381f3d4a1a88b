"""Radial grids, quadrature and finite-difference stencils.

All functions act on radially symmetric functions of ``x`` in ``R^N`` sampled
on a uniform mesh ``r_i = i*h``, ``i = 0..n``. The last node carries the
homogeneous Dirichlet value used as truncation of the whole space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import PreconditionError

MIN_CELLS = 16


def sphere_measure(dim: int) -> float:
    """Surface measure of the unit sphere in R^dim (2 for dim = 1)."""
    return 2.0 * math.pi ** (dim / 2) / math.gamma(dim / 2)


@dataclass(frozen=True)
class RadialGrid:
    dim: int
    rmax: float
    n: int

    @property
    def h(self) -> float:
        return self.rmax / self.n

    @cached_property
    def nodes(self) -> np.ndarray:
        r = self.rmax * np.arange(self.n + 1) / self.n
        r.flags.writeable = False
        return r

    @property
    def omega(self) -> float:
        return sphere_measure(self.dim)

    @cached_property
    def faces(self) -> np.ndarray:
        """Cell faces r_{i+1/2}, i = 0..n-1."""
        f = (np.arange(self.n) + 0.5) * self.h
        f.flags.writeable = False
        return f

    @cached_property
    def face_areas(self) -> np.ndarray:
        a = self.omega * self.faces ** (self.dim - 1)
        a.flags.writeable = False
        return a

    @cached_property
    def volumes(self) -> np.ndarray:
        """Exact r^{N-1} measure of the dual cells around each node.

        These are the quadrature weights; they sum to the ball volume exactly
        and coincide with the trapezoidal rule for N = 1.
        """
        N = self.dim
        edges = np.concatenate(([0.0], self.faces, [self.rmax]))
        v = self.omega * (edges[1:] ** N - edges[:-1] ** N) / N
        v.flags.writeable = False
        return v


@dataclass(frozen=True, eq=False)
class Field:
    grid: RadialGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n + 1,):
            raise PreconditionError(
                f"field has {v.shape} values, grid needs {self.grid.n + 1}")
        if not np.all(np.isfinite(v)):
            raise PreconditionError("field contains non-finite values")
        object.__setattr__(self, "values", v)

    def like(self, values) -> "Field":
        return Field(self.grid, values)

    @property
    def r(self) -> np.ndarray:
        return self.grid.nodes


def make_grid(dim: int, rmax: float, n: int) -> RadialGrid:
    if int(dim) != dim or dim < 1:
        raise PreconditionError(f"dimension must be a positive integer, got {dim}")
    if not math.isfinite(rmax) or rmax <= 0:
        raise PreconditionError(f"rmax must be positive and finite, got {rmax}")
    if int(n) != n or n < MIN_CELLS:
        raise PreconditionError(f"need at least {MIN_CELLS} cells, got {n}")
    return RadialGrid(int(dim), float(rmax), int(n))


# -- array-level stencils (used directly by the time stepper) -----------------

def derivative_values(f: np.ndarray, h: float) -> np.ndarray:
    d = np.empty_like(f)
    d[0] = 0.0
    d[1:-1] = (f[2:] - f[:-2]) / (2 * h)
    d[-1] = (3 * f[-1] - 4 * f[-2] + f[-3]) / (2 * h)
    return d


def laplacian_values(f: np.ndarray, grid: RadialGrid) -> np.ndarray:
    h, N, r = grid.h, grid.dim, grid.nodes
    lap = np.empty_like(f)
    lap[0] = N * 2 * (f[1] - f[0]) / h**2
    lap[1:-1] = ((f[2:] - 2 * f[1:-1] + f[:-2]) / h**2
                 + (N - 1) / r[1:-1] * (f[2:] - f[:-2]) / (2 * h))
    # one-sided second order at the outer node
    d2 = (2 * f[-1] - 5 * f[-2] + 4 * f[-3] - f[-4]) / h**2
    d1 = (3 * f[-1] - 4 * f[-2] + f[-3]) / (2 * h)
    lap[-1] = d2 + (N - 1) / r[-1] * d1
    return lap


def integrate_values(f: np.ndarray, grid: RadialGrid) -> float:
    return float(np.dot(grid.volumes, f))


def divergence_bands(grid: RadialGrid, coef_faces: np.ndarray):
    """Bands of the stiffness matrix of -div(c grad .) on nodes 0..n-1.

    Node n is the Dirichlet node and is eliminated. Returns ``(diag, off)``
    with ``off[i]`` coupling nodes i and i+1. The operator in the weighted
    inner product is ``M^{-1} K`` with ``M = diag(volumes[:-1])``.
    """
    flux = grid.face_areas * coef_faces / grid.h
    diag = flux.copy()
    diag[1:] += flux[:-1]
    off = -flux[:-1]
    return diag, off


# -- Field-level operations ----------------------------------------------------

def radial_laplacian(f: Field) -> Field:
    """Central approximation of f'' + (N-1)/r f'; N f''(0) at the origin."""
    return f.like(laplacian_values(f.values, f.grid))


def derivative(f: Field) -> Field:
    return f.like(derivative_values(f.values, f.grid.h))


def gradient_sq(f: Field) -> Field:
    return f.like(derivative_values(f.values, f.grid.h) ** 2)


def integrate(f: Field) -> float:
    """Integral over R^N of the radial function, truncated at rmax."""
    return integrate_values(f.values, f.grid)


def sup_norm(f: Field) -> float:
    return float(np.max(np.abs(f.values)))


def l2_norm(f: Field) -> float:
    return math.sqrt(integrate_values(f.values**2, f.grid))


def h1_norm_sq(f: Field) -> float:
    d = derivative_values(f.values, f.grid.h)
    return integrate_values(f.values**2 + d**2, f.grid)
