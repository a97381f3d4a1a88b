"""Spectrum of the linearization around the ground state, sector by sector.

For a radial ground state the linearized operator

    Lφ = -div((1+2κw²)∇φ) + [-4κwΔw - 2κ|∇w|² + 1 - p w^{p-1}] φ

commutes with rotations, so on the spherical-harmonic component of degree ℓ
it reduces to a radial Sturm-Liouville operator with the extra potential
ℓ(ℓ+N-2)/r² (1+2κw²). Components with ℓ >= 1 vanish at the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from .core import Field, divergence_bands
from .errors import ConvergenceFailure, PreconditionError
from .stationary import StationaryProfile


@dataclass(frozen=True, eq=False)
class SectorOperator:
    """Tridiagonal operator on the sector unknowns ``nodes``.

    ``lower``, ``diag``, ``upper`` are the bands of the operator matrix A;
    ``weight`` holds the quadrature weights, so ``diag(weight) @ A`` is symmetric.
    """

    ell: int
    nodes: np.ndarray
    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray
    weight: np.ndarray
    grid: object = field(repr=False, default=None)

    @property
    def size(self) -> int:
        return self.diag.size

    def symmetry_defect(self) -> float:
        """max |m_i A_{i,i+1} - m_{i+1} A_{i+1,i}| relative to the largest entry."""
        m = self.weight
        d = np.abs(m[:-1] * self.upper - m[1:] * self.lower)
        scale = max(np.max(np.abs(m * self.diag)), np.max(np.abs(m[:-1] * self.upper)), 1e-300)
        return float(np.max(d, initial=0.0) / scale)

    def symmetric_bands(self) -> Tuple[np.ndarray, np.ndarray]:
        """Bands of M^{1/2} A M^{-1/2}, which is symmetric."""
        m = self.weight
        off = self.upper * np.sqrt(m[:-1] / m[1:])
        return self.diag.copy(), off

    def apply(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        out[:-1] += self.upper * v[1:]
        out[1:] += self.lower * v[:-1]
        return out

    def inner(self, a: np.ndarray, b: np.ndarray) -> float:
        return float(np.sum(self.weight * a * b))

    def to_field(self, v: np.ndarray) -> Field:
        full = np.zeros(self.grid.n + 1)
        full[self.nodes] = v
        return Field(self.grid, full)

    def restrict(self, f: Field) -> np.ndarray:
        return f.values[self.nodes]


def linearized_potential(profile: StationaryProfile, ell: int) -> np.ndarray:
    g, prm = profile.grid, profile.params
    N, k, p = prm.dim, prm.kappa, prm.p
    w, v = profile.w.values, profile.slope()
    a = 1 + 2 * k * w * w
    # Δw from the stationary equation instead of differencing twice
    lap_w = (w - np.abs(w) ** (p - 1) * w - 2 * k * w * v * v) / a
    pot = -4 * k * w * lap_w - 2 * k * v * v + 1 - p * np.abs(w) ** (p - 1)
    if ell:
        r = g.nodes.copy()
        r[0] = np.inf
        pot = pot + ell * (ell + N - 2) / r**2 * a
    return pot


def assemble_sector(profile: StationaryProfile, ell: int) -> SectorOperator:
    if ell < 0 or int(ell) != ell:
        raise PreconditionError("ell must be a non-negative integer")
    g, k = profile.grid, profile.params.kappa
    if g.dim == 1 and ell > 1:
        raise PreconditionError("in one dimension only ell = 0 (even) and ell = 1 (odd) exist")
    w = profile.w.values
    w2 = k * w * w
    diag, off = divergence_bands(g, 1 + w2[:-1] + w2[1:])
    vol = g.volumes[:-1]
    pot = linearized_potential(profile, ell)[:-1]
    start = 0 if ell == 0 else 1
    nodes = np.arange(start, g.n)
    m = vol[start:]
    A_diag = diag[start:] / m + pot[start:]
    o = off[start:]
    upper = o / m[:-1]
    lower = o / m[1:]
    return SectorOperator(int(ell), nodes, lower, A_diag, upper, m, g)


def eig_smallest(op: SectorOperator, k: int = 1, residual_tol: float = 1e-8) -> List[Tuple[float, np.ndarray]]:
    """k algebraically smallest eigenpairs (Sturm bisection + inverse iteration).

    Eigenvectors are returned on the sector nodes, normalized so that
    ``op.inner(v, v) == 1``.
    """
    if not 1 <= k <= 6:
        raise PreconditionError("k must lie in 1..6")
    d, e = op.symmetric_bands()
    try:
        vals, vecs = eigh_tridiagonal(d, e, select="i", select_range=(0, k - 1),
                                      lapack_driver="stebz")
    except LinAlgError as exc:
        raise ConvergenceFailure(f"tridiagonal eigensolver failed: {exc}") from exc
    scale = float(np.max(np.abs(d)) + 2 * np.max(np.abs(e), initial=0.0))
    out = []
    for j in range(k):
        v = vecs[:, j] / np.sqrt(op.weight)
        res = float(np.linalg.norm(np.sqrt(op.weight) * (op.apply(v) - vals[j] * v)))
        if res > residual_tol * scale:
            raise ConvergenceFailure(f"eigenpair {j} residual {res:.3g} exceeds tolerance", residual=res)
        # fix the sign so that the largest component is positive
        if v[np.argmax(np.abs(v))] < 0:
            v = -v
        out.append((float(vals[j]), v))
    return out


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    mu1: float
    psi1: Field
    mu_ell1: float
    zero_mode_corr: float
    gap: float
    gap_sector: int
    sector_eigenvalues: Dict[int, List[float]]

    @property
    def psi1_sign_changes(self) -> int:
        v = self.psi1.values
        big = v[np.abs(v) > 1e-10 * np.max(np.abs(v))]
        return int(np.sum(np.diff(np.sign(big)) != 0))


def nondegeneracy_report(profile: StationaryProfile) -> SpectrumResult:
    N = profile.params.dim
    op0 = assemble_sector(profile, 0)
    (mu1, psi), (mu0_2, _) = eig_smallest(op0, 2)
    op1 = assemble_sector(profile, 1)
    (mu_l1, v1), (mu1_2, _) = eig_smallest(op1, 2)
    dw = op1.restrict(Field(profile.grid, profile.slope()))
    corr = abs(op1.inner(v1, dw)) / math.sqrt(op1.inner(v1, v1) * op1.inner(dw, dw))
    sectors = {0: [mu1, mu0_2], 1: [mu_l1, mu1_2]}
    # deflating ψ1 in sector 0 and w' in sector 1 leaves the second eigenvalues
    candidates = [(mu0_2, 0), (mu1_2, 1)]
    if N >= 2:
        mu2 = eig_smallest(assemble_sector(profile, 2), 1)[0][0]
        sectors[2] = [mu2]
        candidates.append((mu2, 2))
    gap, sector = min(candidates)
    return SpectrumResult(mu1, op0.to_field(psi), mu_l1, corr, gap, sector, sectors)
