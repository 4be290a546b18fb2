"""A binomial cascade and its partition function.

Every box of the cascade splits its mass 0.6 : 0.4 between its children, so
the moments of the box masses scale exactly and tau(q) has a closed form.
We recover it from the generated masses, then read off D(q) and f(alpha).
"""

import numpy as np

from mfscaling import (GeneratorSpec, QGrid, analytic_tau_cascade, cascade_measures,
                       generate, legendre_transform_tau_to_f, partition_spectrum)

a = 0.6
g = generate(GeneratorSpec("binomial_cascade", seed=1, params={"a": a, "depth": 14}))
q = QGrid.arange(-4, 4, 0.5)
tau, dims = partition_spectrum(cascade_measures(g.box_masses, range(6, 15)), q)
exact = analytic_tau_cascade(a, q)

print("   q    tau(q)   closed form    D(q)")
for qi, t, e in zip(q.values, tau.ordinate, exact.ordinate):
    print("%5.1f  %8.4f  %11.4f  %6.3f" % (qi, t, e, dims.at(qi)))

f = legendre_transform_tau_to_f(partition_spectrum(
    cascade_measures(g.box_masses, range(6, 15)), QGrid.arange(-10, 10, 0.1))[0])
print("\nf(alpha) spans alpha in [%.3f, %.3f]; theory [%.3f, %.3f]"
      % (f.abscissa[0], f.abscissa[-1], -np.log2(a), -np.log2(1 - a)))
print("peak f = %.4f at alpha = %.3f" % (f.ordinate.max(), f.abscissa[np.argmax(f.ordinate)]))
