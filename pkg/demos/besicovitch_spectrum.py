"""Dimension spectrum of digit frequencies, checked against the closed form.

The attractor of the two equal halves x/2 and (1+x)/2 is all of [0,1]; a
point's symbolic address is its binary expansion.  Averaging the potential
that pays 1 on the left branch and 0 on the right asks: what fraction of a
point's binary digits are zeros?  The set of points where that frequency is
alpha has Hausdorff dimension H(alpha)/log 2, a classical fact, and this
family is exactly where both estimator routes can be audited end to end.
"""

from mfspec import (BesicovitchSpec, SolverOptions, besicovitch_spectrum,
                    first_symbol, full_spectrum, linear_system)

system = linear_system([0.5, 0.5])
potential = first_symbol([1.0, 0.0])
closed_form = BesicovitchSpec(m=2, ratio=0.5, values=(1.0, 0.0))

opts = SolverOptions(n=14, rho=0.05)
grid = [0.05 * k for k in range(2, 19)]

print(f"depth n={opts.n}, window rho={opts.rho}")
print(f"{'alpha':>6} {'lower':>10} {'upper':>10} {'closed':>10} "
      f"{'lower err':>10}")
for point in full_spectrum(system, potential, grid, opts):
    closed = besicovitch_spectrum(closed_form, point.alpha)
    print(f"{point.alpha:6.2f} {point.lower:10.6f} {point.upper:10.6f} "
          f"{closed:10.6f} {abs(point.lower - closed):10.2e}")

print()
print("The lower route is exact here (the optimal block measure is a")
print("product measure), while the cover route carries the finite-depth")
print("window quantization; both straddle H(alpha)/log 2 as required.")
