# The quasilinear term raises the blow-up threshold: lambda0(0) < lambda0(kappa).
#
# A coarse grid keeps this to a couple of minutes; QUASIFLOW_THREADS caps the pool.

from quasiflow import Params, kappa_sweep, make_grid

grid = make_grid(2, 15.0, 500)
entries = kappa_sweep([0.0, 0.5, 1.0, 2.0], Params(2, 3.0), ("gaussian", 4.0), (0.05, 10.0),
                      iters=12, grid=grid, width_tol=1e-2)
for e in entries:
    r = e.result
    print(f"kappa={e.kappa:3.1f}: lambda0 in [{r.lambda_lo:.4f}, {r.lambda_hi:.4f}]")
