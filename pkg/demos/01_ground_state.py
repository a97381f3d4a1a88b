# Ground states by shooting, and the identities that certify them.
#
# In one dimension the height of the ground state is known in closed form,
# w(0) = ((p+1)/2)^{1/(p-1)}. In higher dimensions it is strictly larger.

import numpy as np

from quasiflow import Params, make_grid, shoot, threshold_constant
from quasiflow.stationary import first_integral_residual_1d, pohozaev_terms, decay_rate

for p in (3.0, 5.0):
    prof = shoot(Params(1, p), 1e-10)
    print(f"N=1 p={p:g}: w0 = {prof.w0:.10f}   closed form {threshold_constant(p):.10f}")

w = shoot(Params(1, 3.0), 1e-10)
fi = first_integral_residual_1d(w)
print("first integral drift", fi.drift, " H(0)", fi.h0)

# tail: w ~ e^{-r}, the rate creeps up to 1 as the window moves out
for win in [(3, 5), (5, 7.5), (7.5, 11.25)]:
    print("decay rate on", win, decay_rate(w, win))

for N in (2, 3):
    prof = shoot(Params(N, 3.0), 1e-10, grid=make_grid(N, 15.0, 1500))
    t = pohozaev_terms(prof)
    print(f"N={N}: w0={prof.w0:.6f}  pohozaev sides {t.gradient_side:.6g} vs {t.potential_side:.6g}")

r = w.grid.nodes
print("profile samples:", np.round(w.w.values[::250], 6), "at r =", r[::250])
