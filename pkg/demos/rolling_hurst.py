"""A regime change seen through a rolling Hurst exponent.

Anti-persistent noise (H = 0.3) is followed by persistent noise (H = 0.8).
A 1024-sample window slides across the splice; the trace should switch
from below 1/2 to above it once, near the middle.
"""

import numpy as np

from mfscaling import TimeSeries, fgn_ensemble, rolling_hurst

half = 8192
x = np.concatenate((fgn_ensemble(0.3, half, [1])[0].values,
                    fgn_ensemble(0.8, half, [2])[0].values))
trace = rolling_hurst(TimeSeries(x), window=1024, step=512)

for end, est in trace:
    bar = "#" * int(round(40 * est))
    side = "<" if end < half else ">"
    print("%6d %s %.3f %s" % (end, side, est, bar))
