import math

import numpy as np
import pytest

from quasiflow import (Classification, Field, FlowState, Params, Trajectory, classify, co_evolve,
                       evolve, initial_profile, make_grid, monotonicity_check, nondegeneracy_report,
                       order_check, rhs, shoot, step)
from quasiflow.errors import PreconditionError
from quasiflow.flow import far_field_ratio, positivity_violation, windowed_h1_distance

P3 = Params(2, 3.0, 1.0)


def const(grid, c):
    return Field(grid, np.full(grid.n + 1, float(c)))


# -- initial data ---------------------------------------------------------------

def test_zero_amplitude_gives_zero(grid2):
    assert np.all(initial_profile(("gaussian", 1.0), 0.0, grid2).values == 0)


def test_bump_support_and_peak():
    g = make_grid(1, 5.0, 500)
    v = initial_profile(("bump", 2.0), 1.0, g).values
    assert v[0] == pytest.approx(math.exp(-1))
    assert np.all(v[g.nodes < 2] > 0) and np.all(v[g.nodes >= 2] == 0)


@pytest.mark.parametrize("kind,amp", [(("table", None), 1.0), (("gaussian", -1.0), 1.0),
                                      (("gaussian", 1.0), -1.0), (("bump", 0.0), 1.0),
                                      (("wave", 1.0), 1.0)])
def test_initial_profile_rejects(kind, amp):
    g = make_grid(1, 5.0, 20)
    if kind[0] == "table":
        vals = np.zeros(21)
        vals[:3] = [2, 1, 3]
        kind = ("table", vals)
    with pytest.raises(PreconditionError):
        initial_profile(kind, amp, g)


def test_table_profile_accepted():
    g = make_grid(1, 5.0, 20)
    vals = np.linspace(1, 0, 21)
    np.testing.assert_array_equal(initial_profile(("table", vals), 2.0, g).values, 2 * vals)


# -- right-hand side ----------------------------------------------------------------

def test_rhs_constants(grid2):
    assert np.max(np.abs(rhs(const(grid2, 1.0), P3).values[:-1])) == 0.0
    c = 0.7
    out = rhs(const(grid2, c), P3).values
    np.testing.assert_allclose(out[:-1], c**3 - c, rtol=1e-14)
    assert out[-1] == 0.0


def test_rhs_small_at_ground_state(w1):
    res = np.max(np.abs(rhs(w1.w, w1.params).values[:-1]))
    assert res <= 10 * (w1.shoot_tolerance + w1.grid.h**2)


# -- stepping ---------------------------------------------------------------------

def test_step_keeps_zero_and_one(grid2):
    s = step(FlowState(const(grid2, 0.0), dt=0.005), P3)
    assert np.all(s.field.values == 0)
    s = step(FlowState(const(grid2, 1.0), dt=0.005), P3)
    inner = grid2.nodes <= grid2.rmax / 2
    assert np.max(np.abs(s.field.values[inner] - 1)) <= 1e-14


def test_step_respects_bounds(grid2):
    s = FlowState(initial_profile(("gaussian", 2.0), 0.5, grid2), dt=1.0)
    out = step(s, P3, dt_max=0.01)
    assert 0 < out.t <= 0.01 and out.dt <= 0.01 and out.steps == 1


def test_small_data_follows_linear_heat_decay():
    """Amplitude 1e-3: u_t ≈ Δu - u, so u(0,t) = a(σ²/(σ²+4t))^{N/2} e^{-t}.

    The per-unit-time decay factors are compared; the integrator is first order
    in time and its error test is absolute below sup-norm 1."""
    sigma, a, N = 3.0, 1e-3, 2
    g = make_grid(N, 20.0, 1000)
    traj = evolve(P3, initial_profile(("gaussian", sigma), a, g), 3.0, 1.0)
    centre = [f.values[0] for _, f in traj.snapshots]

    def exact(t):
        return a * (sigma**2 / (sigma**2 + 4 * t)) ** (N / 2) * math.exp(-t)

    for t in range(3):
        assert centre[t + 1] / centre[t] == pytest.approx(exact(t + 1) / exact(t), rel=5e-3)


def test_negative_energy_data_grow_monotonically(blowup_run):
    s = blowup_run.sup_series()
    assert np.all(np.diff(s) > 0)
    assert blowup_run.classification is Classification.BLOWUP


# -- evolve and classify ---------------------------------------------------------------

def test_zero_data_vanish_immediately(grid2):
    traj = evolve(P3, initial_profile(("gaussian", 4.0), 0.0, grid2), 200.0)
    assert traj.classification is Classification.VANISH and traj.t_end == 0.0


def test_vanish_and_blowup(vanish_run, blowup_run):
    assert vanish_run.classification is Classification.VANISH and vanish_run.t_end < 200
    assert blowup_run.classification is Classification.BLOWUP
    assert blowup_run.blowup_certificate is not None


def test_series_times_increase(vanish_run):
    t = vanish_run.times()
    assert np.all(np.diff(t) > 0)
    snaps = [s[0] for s in vanish_run.snapshots]
    np.testing.assert_allclose(snaps, np.arange(len(snaps)), atol=1e-12)


def test_evolve_rejects_increasing_data(grid2):
    with pytest.raises(PreconditionError):
        evolve(P3, Field(grid2, grid2.nodes / grid2.rmax), 1.0)


def synthetic(series, snapshots=()):
    g = make_grid(1, 5.0, 50)
    traj = Trajectory(Params(1, 3.0), g)
    traj.series = list(series)
    traj.snapshots = list(snapshots)
    return traj


def test_classify_synthetic_series():
    assert classify(synthetic([(0.0, 0.0, 0.0, 0.0)])) is Classification.VANISH
    assert classify(synthetic([(0.0, 1.0, 0.1, 0.0), (1.0, 1e3, -5.0, 0.1)])) is Classification.BLOWUP
    assert classify(synthetic([(0.0, 1.0, 0.1, 0.0), (1.0, 2.0, 0.1, 0.1)])) is Classification.UNDECIDED


def test_classify_breakdown_needs_certificate():
    traj = synthetic([(0.0, 2.0, 0.1, 0.0), (1.0, 5.0, 0.05, 0.1)])
    traj.breakdown = True
    assert classify(traj) is Classification.UNDECIDED
    traj.series.append((1.1, 6.0, -1.0, 1e-10))
    assert classify(traj) is Classification.BLOWUP


def test_classify_converge_on_steady_window():
    g = make_grid(1, 5.0, 50)
    prof = Field(g, 1.5 * np.exp(-g.nodes))
    series = [(float(t), 1.5, 0.2, 0.1) for t in np.arange(0, 12.5, 0.5)]
    snaps = [(float(t), prof) for t in range(13)]
    assert classify(synthetic(series, snaps)) is Classification.CONVERGE
    # a 1e-4 drift in L² inside the window defeats the detector
    moved = Field(g, prof.values * (1 + 1e-4))
    snaps[2] = (2.0, moved)
    assert classify(synthetic(series, snaps)) is not Classification.CONVERGE
    # sup below 1 is never a positive steady state
    low = [(t, 0.5, 0.0, d) for t, _, _, d in series]
    assert classify(synthetic(low, snaps)) is Classification.UNDECIDED


@pytest.mark.parametrize("dim", [1, 2])
def test_seeded_at_ground_state_stays_close_then_departs(dim):
    """The ground state is linearly unstable (μ₁ < 0): the run stays within 1e-3 of w while
    the discretization error is amplified by e^{|μ₁|t}, then leaves along ψ₁."""
    prof = shoot(Params(dim, 3.0), 1e-10, grid=make_grid(dim, 15.0, 1500))
    traj = evolve(prof.params, prof.w.like(prof.w.values.copy()), 5.0, 0.25, validate=False)
    w = prof.w.values
    dist = {t: float(np.max(np.abs(f.values - w))) for t, f in traj.snapshots}
    assert all(d <= 1e-3 for t, d in dist.items() if t <= 1.5)
    rate = math.log(dist[3.0] / dist[1.0]) / 2.0
    assert rate == pytest.approx(-nondegeneracy_report(prof).mu1, rel=0.05)


def test_semilinear_ground_state_and_flow():
    """κ = 0, N = 1, p = 3: the ground state is √2 sech r, and the κ = 0 flow holds it."""
    g = make_grid(1, 15.0, 1500)
    prof = shoot(Params(1, 3.0, 0.0), 1e-10, grid=g)
    exact = math.sqrt(2) / np.cosh(g.nodes)
    assert np.max(np.abs(prof.w.values - exact)) <= 1e-4
    traj = evolve(prof.params, prof.w.like(prof.w.values.copy()), 1.0, 0.5, validate=False)
    assert max(np.max(np.abs(f.values - exact)) for _, f in traj.snapshots) <= 1e-4


# -- comparison and monotonicity ---------------------------------------------------------

def test_order_identical_data_exact(grid2):
    u = initial_profile(("gaussian", 3.0), 0.8, grid2)
    assert order_check(u, u, P3, 2.0).violation == 0.0


def test_order_half_data(grid2):
    hi = initial_profile(("gaussian", 3.0), 1.0, grid2)
    lo = hi.like(0.5 * hi.values)
    rep = order_check(lo, hi, P3, 3.0)
    assert rep.violation <= 1e-6 * rep.scale


def test_order_rejects_unordered(grid2):
    hi = initial_profile(("gaussian", 3.0), 1.0, grid2)
    with pytest.raises(PreconditionError):
        order_check(hi, hi.like(0.5 * hi.values), P3, 1.0)


def test_random_ordered_pairs(rng):
    g = make_grid(2, 15.0, 600)
    for _ in range(10):
        a_lo, a_hi = np.sort(rng.uniform(0.05, 1.2, 2))
        s_lo, s_hi = np.sort(rng.uniform(1.0, 4.0, 2))
        rep = order_check(initial_profile(("gaussian", s_lo), a_lo, g),
                          initial_profile(("gaussian", s_hi), a_hi, g), P3, 2.0, 0.5)
        assert rep.violation <= 1e-6


def test_constant_supersolution(grid2):
    traj = evolve(P3, initial_profile(("bump", 5.0), 0.9, grid2), 10.0)
    assert max(traj.sup_series()) <= 0.9


def test_co_evolve_shares_steps(grid2):
    a = initial_profile(("gaussian", 2.0), 0.3, grid2)
    b = initial_profile(("gaussian", 2.0), 0.6, grid2)
    out = list(co_evolve(P3, [a, b], 0.5, 0.25))
    assert out[-1][0] == pytest.approx(0.5)
    assert all(len(us) == 2 for _, us in out)


def test_monotonicity_reports(vanish_run, blowup_run, grid2):
    zero = evolve(P3, initial_profile(("gaussian", 1.0), 0.0, grid2), 1.0)
    assert monotonicity_check(zero).max_increase == 0.0
    for traj in (vanish_run, blowup_run):
        rep = monotonicity_check(traj)
        assert rep.max_increase <= 1e-8 * rep.sup_norm and not rep.flagged
    bad = initial_profile(("gaussian", 2.0), 0.5, grid2).values.copy()
    bad[10] += 0.1
    traj = evolve(P3, Field(grid2, bad), 0.5, 0.25, validate=False)
    rep = monotonicity_check(traj)
    assert rep.max_increase > 0 and rep.flagged


def test_positivity(vanish_run, blowup_run):
    assert positivity_violation(vanish_run) <= 1e-10
    assert positivity_violation(blowup_run) <= 1e-10


def test_uniform_decay_far_field(grid2):
    traj = evolve(P3, initial_profile(("gaussian", 1.0), 0.5, grid2), 200.0)
    assert traj.classification is Classification.VANISH
    assert far_field_ratio(traj) <= 1e-4


def test_windowed_distance_decreases(vanish_run):
    zero = Field(vanish_run.grid, np.zeros(vanish_run.grid.n + 1))
    d = [windowed_h1_distance(vanish_run, zero, s, 2.0) for s in (2.0, 4.0, 6.0)]
    assert d[0] > d[1] > d[2] > 0
