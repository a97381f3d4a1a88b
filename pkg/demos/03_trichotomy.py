# Small data vanish, large data blow up, and in between there is one amplitude
# lambda0 where the solution hangs near the ground state for a while.
#
# Takes about a minute at the default resolution.

import logging

from quasiflow import Params, bisect_lambda, evolve, initial_profile, make_grid, shoot, threshold_run

logging.basicConfig(level=logging.INFO, format="%(message)s")

prm = Params(2, 3.0, 1.0)
grid = make_grid(2, 15.0, 1500)
phi = ("gaussian", 4.0)

for lam in (0.05, 10.0):
    traj = evolve(prm.with_lam(lam), initial_profile(phi, lam, grid), 200.0)
    print(f"lambda={lam}: {traj.classification.value} at t={traj.t_end:.4g}, "
          f"I<0 first at {traj.blowup_certificate}")

res = bisect_lambda(prm, phi, (0.05, 10.0), iters=12, grid=grid, width_tol=1e-2)
print(f"lambda0 in [{res.lambda_lo:.6f}, {res.lambda_hi:.6f}] ({res.evolutions} evolutions)")

w = shoot(prm, 1e-10, grid=grid)
rep = threshold_run(res, grid=grid, profile=w)
print(f"midpoint run: {rep.classification.value}; sup-norm within [0.5, 1.5]*w(0) "
      f"for {rep.plateau_time:.2f} time units, closest approach {rep.closest_sup_distance:.3g}")

# the plateau only grows like log(1/width)/|mu1|
for t, s, I, dt in rep.trajectory.series[:: max(1, len(rep.trajectory.series) // 20)]:
    print(f"  t={t:7.3f}  sup={s:9.5f}  I={I:10.5f}")
