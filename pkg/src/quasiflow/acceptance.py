"""Quantitative acceptance checks, numbered 1-9.

Each ``criterion_k`` returns a :class:`CriterionResult` holding the measured
numbers next to their limits. The test suite and ``quasiflow verify`` share
these functions, so the CLI reproduces exactly what the tests assert.
"""

from __future__ import annotations

import json
import math
import tempfile
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Dict, List

import numpy as np
from scipy.optimize import brentq

from .bifurcation import bisect_lambda, threshold_run
from .core import Field, integrate, laplacian_values, derivative_values, make_grid
from .energy import energy_identity_residual, energy_monotonicity_violation, p3_condition
from .flow import Classification, evolve, initial_profile, monotonicity_check, order_check
from .params import Params, threshold_constant
from .records import RunRecord, load_run, serialize_run
from .spectral import nondegeneracy_report
from .stationary import first_integral_residual_1d, pohozaev_terms, pohozaev_residual, shoot

RMAX = 15.0
NR = 1500
TRICHOTOMY_PROFILE = ("gaussian", 4.0)


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    limit: str
    ok: bool


@dataclass
class CriterionResult:
    number: int
    title: str
    checks: List[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    def add(self, name: str, value, limit: str, ok: bool) -> None:
        self.checks.append(Check(name, float(value), limit, bool(ok)))

    def check(self, name: str) -> Check:
        return next(c for c in self.checks if c.name == name)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        parts = "; ".join(f"{c.name}={c.value:.6g} ({c.limit}){'' if c.ok else ' <-- FAIL'}"
                          for c in self.checks)
        return f"[{status}] criterion {self.number}: {self.title} | {parts}"

    def as_dict(self) -> Dict[str, object]:
        return {"number": self.number, "title": self.title, "passed": self.passed,
                "checks": [c.__dict__ for c in self.checks]}


# -- shared, cached computations --------------------------------------------------------

@lru_cache(maxsize=None)
def ground_state(dim: int, p: float, kappa: float = 1.0, nr: int = NR, rmax: float = RMAX,
                 tol: float = 1e-10):
    return shoot(Params(dim, p, kappa), tol, grid=make_grid(dim, rmax, nr))


@lru_cache(maxsize=None)
def gaussian_run(dim: int, p: float, kappa: float, lam: float, sigma: float, nr: int = NR,
                 cadence: float = 1.0, tmax: float = 200.0):
    grid = make_grid(dim, RMAX, nr)
    u0 = initial_profile(("gaussian", sigma), lam, grid)
    return evolve(Params(dim, p, kappa, lam), u0, tmax, cadence)


@lru_cache(maxsize=None)
def threshold_bracket(kappa: float):
    """Bisection for N = 2, p = 3 and the σ = 4 gaussian at default resolution."""
    return bisect_lambda(Params(2, 3.0, kappa), TRICHOTOMY_PROFILE, (0.05, 10.0), iters=12,
                         tmax=200.0, grid=make_grid(2, RMAX, NR), width_tol=1e-2)


# -- criteria ------------------------------------------------------------------------------

def criterion_1() -> CriterionResult:
    res = CriterionResult(1, "one-dimensional ground-state height")
    for p in (3.0, 5.0):
        w0 = ground_state(1, p).w0
        err = abs(w0 - threshold_constant(p))
        res.add(f"|w0-((p+1)/2)^(1/(p-1))| p={p:g}", err, "<= 1e-6", err <= 1e-6)
    return res


def criterion_2() -> CriterionResult:
    res = CriterionResult(2, "first integral of the 1-D profile")
    fi = first_integral_residual_1d(ground_state(1, 3.0))
    res.add("sup|H(r)-H(0)|", fi.drift, "<= 1e-6", fi.drift <= 1e-6)
    res.add("|H(0)|", fi.h0, "<= 1e-6", fi.h0 <= 1e-6)
    return res


def criterion_3() -> CriterionResult:
    res = CriterionResult(3, "Pohozaev identity")
    t2 = pohozaev_terms(ground_state(2, 3.0))
    rel2 = abs(t2.potential_side) / t2.mass
    res.add("N=2 |potential side|/mass", rel2, "<= 1e-4", rel2 <= 1e-4)
    r3 = pohozaev_residual(ground_state(3, 3.0))
    res.add("N=3 relative residual", r3, "<= 1e-3", r3 <= 1e-3)
    return res


def criterion_4() -> CriterionResult:
    res = CriterionResult(4, "energy identity on a vanishing run")
    coarse = gaussian_run(2, 3.0, 1.0, 0.05, 4.0, NR, 1.0)
    fine = gaussian_run(2, 3.0, 1.0, 0.05, 4.0, 2 * NR, 0.5)
    res.add("coarse run vanishes", coarse.classification is Classification.VANISH, "== 1",
            coarse.classification is Classification.VANISH)
    r1 = max(e.identity_residual for e in energy_identity_residual(coarse))
    r2 = max(e.identity_residual for e in energy_identity_residual(fine))
    res.add("max residual", r1, "<= 0.05", r1 <= 0.05)
    ratio = r2 / r1
    res.add("refined/default residual", ratio, "in [0.25, 0.75]", 0.25 <= ratio <= 0.75)
    mono = max(energy_monotonicity_violation(coarse), energy_monotonicity_violation(fine))
    res.add("energy increase", mono, "<= 1e-8", mono <= 1e-8)
    return res


def criterion_5() -> CriterionResult:
    res = CriterionResult(5, "spectral picture, N=1, p=3")
    s1 = nondegeneracy_report(ground_state(1, 3.0))
    s2 = nondegeneracy_report(ground_state(1, 3.0, nr=2 * NR))
    res.add("mu1", s1.mu1, "< -0.1", s1.mu1 < -0.1)
    res.add("|mu_l1|", abs(s1.mu_ell1), "<= 1e-2", abs(s1.mu_ell1) <= 1e-2)
    ratio = abs(s1.mu_ell1) / abs(s2.mu_ell1)
    res.add("|mu_l1| reduction under h/2", ratio, "in [3, 5]", 3 <= ratio <= 5)
    res.add("zero-mode correlation", s1.zero_mode_corr, ">= 0.999", s1.zero_mode_corr >= 0.999)
    res.add("deflated gap", s1.gap, "> 0", s1.gap > 0)
    return res


def criterion_6() -> CriterionResult:
    res = CriterionResult(6, "trichotomy, N=2, p=3, gaussian sigma=4")
    low = gaussian_run(2, 3.0, 1.0, 0.05, 4.0)
    high = gaussian_run(2, 3.0, 1.0, 10.0, 4.0)
    res.add("lambda=0.05 vanishes", low.classification is Classification.VANISH, "== 1",
            low.classification is Classification.VANISH)
    certified = high.classification is Classification.BLOWUP and high.blowup_certificate is not None
    res.add("lambda=10 blows up with I<0", certified, "== 1", certified)
    b = threshold_bracket(1.0)
    res.add("bracket width", b.width, "<= 1e-2", b.width <= 1e-2)
    res.add("evolutions", b.evolutions, "<= 14", b.evolutions <= 14)
    tr = threshold_run(b, grid=make_grid(2, RMAX, NR), profile=ground_state(2, 3.0))
    res.add("plateau time in [0.5,1.5] w(0)", tr.plateau_time, ">= 20", tr.plateau_time >= 20)
    return res


def criterion_7() -> CriterionResult:
    res = CriterionResult(7, "stabilizing effect of the quasilinear term")
    b0, b1 = threshold_bracket(0.0), threshold_bracket(1.0)
    sep = b1.lambda_lo - b0.lambda_hi
    res.add("lo(kappa=1) - hi(kappa=0)", sep, "> 0", sep > 0)
    return res


def _pair_violations(seed: int = 20240611, pairs: int = 10, tmax: float = 3.0) -> List[float]:
    rng = np.random.default_rng(seed)
    grid = make_grid(2, RMAX, NR)
    out = []
    for _ in range(pairs):
        a_lo, a_hi = np.sort(rng.uniform(0.05, 1.2, 2))
        s_lo, s_hi = np.sort(rng.uniform(1.0, 4.0, 2))
        lo = initial_profile(("gaussian", s_lo), a_lo, grid)
        hi = initial_profile(("gaussian", s_hi), a_hi, grid)
        rep = order_check(lo, hi, Params(2, 3.0, 1.0), tmax, 0.5)
        out.append(rep.violation)
    return out


def _stencil_ratio(kind: str, dim: int) -> float:
    errs = []
    rmax = 40.0 if kind == "quadrature" else 8.0
    for n in (400, 800):
        g = make_grid(dim, rmax, n)
        r = g.nodes
        f = np.exp(-r * r)
        if kind == "laplacian":
            num, exact = laplacian_values(f, g), (4 * r * r - 2 * dim) * f
        elif kind == "gradient":
            num, exact = derivative_values(f, g.h) ** 2, 4 * r * r * f * f
        else:
            f = np.exp(-r)
            num = np.array([integrate(Field(g, f))])
            exact = np.array([g.omega * math.gamma(dim)])
        errs.append(np.max(np.abs(num - exact)))
    return errs[0] / errs[1]


def criterion_8() -> CriterionResult:
    res = CriterionResult(8, "property suites")
    worst = max(_pair_violations())
    res.add("comparison violation (10 pairs)", worst, "<= 1e-6", worst <= 1e-6)

    runs = [gaussian_run(2, 3.0, 1.0, 0.05, 4.0), gaussian_run(2, 3.0, 1.0, 10.0, 4.0)]
    inc = max(monotonicity_check(t).max_increase for t in runs)
    res.add("radial increase on classified runs", inc, "<= 1e-8", inc <= 1e-8)

    c = 0.9
    grid = make_grid(2, RMAX, NR)
    u0 = initial_profile(("gaussian", 4.0), c, grid)
    sup = float(max(s[1] for s in evolve(Params(2, 3.0, 1.0), u0, 10.0, 1.0).series))
    res.add("sup under constant supersolution 0.9", sup, "<= 0.9", sup <= c * (1 + 1e-12))

    for kind in ("laplacian", "gradient", "quadrature"):
        for dim in (1, 2, 3):
            ratio = _stencil_ratio(kind, dim)
            res.add(f"{kind} error ratio N={dim}", ratio, "in [3.5, 4.5]", 3.5 <= ratio <= 4.5)

    rec = RunRecord("shoot", {"dim": 1, "p": 3.0, "kappa": 1.0}, {"rmax": RMAX, "nr": NR},
                    None, {"w0": ground_state(1, 3.0).w0, "note": "x", "n": 3}, {"profile": "p.csv"})
    blob = serialize_run(rec)
    same = load_run(blob) == rec and serialize_run(load_run(blob)) == blob
    res.add("record round trip", same, "== 1", same)
    res.add("CLI determinism", _cli_deterministic(), "== 1", _cli_deterministic())
    return res


@lru_cache(maxsize=None)
def _cli_deterministic() -> bool:
    from .cli import main

    blobs = []
    for _ in range(2):
        with tempfile.TemporaryDirectory() as d:
            code = main(["shoot", "--dim", "1", "--p", "3", "--nr", "400", "--out", d])
            data = json.loads((Path(d) / "shoot.json").read_text())
            data.pop("wall_time")
            blobs.append((code, json.dumps(data), (Path(d) / "shoot_profile.csv").read_bytes()))
    return blobs[0][0] == 0 and blobs[0] == blobs[1]


def criterion_9() -> CriterionResult:
    res = CriterionResult(9, "p=3 admissibility sign flip at sigma=2, N=2")
    grid = make_grid(2, 30.0, 6000)

    def cond(sigma):
        return p3_condition(initial_profile(("gaussian", sigma), 1.0, grid), 1.0)

    a, b = cond(1.95), cond(2.05)
    res.add("condition at sigma=1.95", a, "> 0", a > 0)
    res.add("condition at sigma=2.05", b, "< 0", b < 0)
    root = brentq(cond, 1.95, 2.05, xtol=1e-10)
    res.add("sign-change width", root, "in [1.95, 2.05]", 1.95 <= root <= 2.05)
    return res


CRITERIA: Dict[int, Callable[[], CriterionResult]] = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
    6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9,
}


def run_criteria(numbers=None) -> List[CriterionResult]:
    numbers = sorted(CRITERIA) if numbers is None else numbers
    return [CRITERIA[k]() for k in numbers]
