# The linearization around w: one negative direction, a translation kernel, a gap.

from quasiflow import Params, assemble_sector, eig_smallest, make_grid, nondegeneracy_report, shoot

w = shoot(Params(1, 3.0), 1e-10)
s = nondegeneracy_report(w)
print("mu1 =", s.mu1, "(negative: w is unstable along psi1)")
print("smallest odd eigenvalue =", s.mu_ell1, "correlation with w' =", s.zero_mode_corr)
print("gap =", s.gap, "in sector", s.gap_sector)

# O(h^2) convergence of the translation eigenvalue
for n in (750, 1500, 3000):
    prof = shoot(Params(1, 3.0), 1e-10, grid=make_grid(1, 15.0, n))
    print(n, nondegeneracy_report(prof).mu_ell1)

w2 = shoot(Params(2, 3.0), 1e-10, grid=make_grid(2, 15.0, 1500))
for ell in range(4):
    vals = [v for v, _ in eig_smallest(assemble_sector(w2, ell), 3)]
    print(f"N=2 ell={ell}:", ["%.5f" % v for v in vals])
