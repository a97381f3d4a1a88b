from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import AdmissibilityError


def critical_exponent(dim: int, kappa: float = 1.0) -> float:
    """Upper admissible exponent: (3N+2)/(N-2) for the quasilinear flow,
    (N+2)/(N-2) when the quasilinear term is switched off; inf for N <= 2."""
    if dim <= 2:
        return math.inf
    if kappa == 0:
        return (dim + 2) / (dim - 2)
    return (3 * dim + 2) / (dim - 2)


@dataclass(frozen=True)
class Params:
    """Equation parameters.

    ``kappa`` multiplies the quasilinear term ``u Δ(u²)`` (1 is the model
    equation, 0 the semilinear heat equation); ``lam`` is the amplitude of the
    initial datum. ``strict=False`` allows exponents outside the admissible
    range; results are then flagged as exploratory.
    """

    dim: int
    p: float
    kappa: float = 1.0
    lam: float = 0.0
    strict: bool = True

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise AdmissibilityError(f"dimension must be >= 1, got {self.dim}")
        if self.kappa < 0 or not math.isfinite(self.kappa):
            raise AdmissibilityError(f"kappa must be finite and >= 0, got {self.kappa}")
        if self.lam < 0 or not math.isfinite(self.lam):
            raise AdmissibilityError(f"lambda must be finite and >= 0, got {self.lam}")
        if not math.isfinite(self.p) or self.p <= 1:
            raise AdmissibilityError(f"exponent must exceed 1, got {self.p}")
        if self.strict and not self.admissible:
            raise AdmissibilityError(
                f"p={self.p} outside the admissible range 3 <= p < "
                f"{critical_exponent(self.dim, self.kappa)} for N={self.dim}")

    @property
    def admissible(self) -> bool:
        return 3 <= self.p < critical_exponent(self.dim, self.kappa)

    @property
    def exploratory(self) -> bool:
        return not self.admissible

    def with_lam(self, lam: float) -> "Params":
        return replace(self, lam=float(lam))

    def with_kappa(self, kappa: float) -> "Params":
        return replace(self, kappa=float(kappa))


def threshold_constant(p: float) -> float:
    """((p+1)/2)^{1/(p-1)}: below this level w^{p+1}/(p+1) - w^2/2 < 0."""
    return ((p + 1) / 2) ** (1 / (p - 1))
