"""Diffusion entropy against second moments on a Levy flight.

For symmetric stable increments with index mu the displacement over t
steps spreads like t^(1/mu).  DEA reads that off the entropy growth.
DFA works with variances, which a heavy-tailed sample does not have, and
reports the Gaussian-looking 1/2 instead.
"""

import numpy as np

from mfscaling import GeneratorSpec, dea, dfa_hurst, generate

mu = 1.5
deltas, hursts = [], []
for seed in range(5):
    inc = generate(GeneratorSpec("levy", 2 ** 16, seed, {"mu": mu})).series
    res = dea(inc, [0.5, 1.0, 2.0])
    deltas.append(res.curve.ordinate)
    hursts.append(dfa_hurst(inc).slope)
    print("seed %d  delta(0.5, 1, 2) = %s   DFA h(2) = %.3f"
          % (seed, np.round(res.curve.ordinate, 3), hursts[-1]))

print("\nexpected 1/mu = %.3f" % (1 / mu))
print("mean delta(1) = %.3f   mean DFA h(2) = %.3f"
      % (np.mean(deltas, axis=0)[1], np.mean(hursts)))

gauss = generate(GeneratorSpec("gaussian_white", 2 ** 16, 0)).series
print("Gaussian control: delta(1) = %.3f" % dea(gauss, [1.0]).curve.ordinate[0])
