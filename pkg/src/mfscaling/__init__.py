"""Multifractal scaling exponents of time series.

Three estimators that check one another:

* partition-function analysis of box measures (:mod:`mfscaling.spectra`),
* multifractal detrended fluctuation analysis (:mod:`mfscaling.mfdfa`),
* Rényi-entropy diffusion entropy analysis (:mod:`mfscaling.dea`),

plus seeded generators with closed-form spectra (:mod:`mfscaling.synth`).
"""

__version__ = "0.1.0"

from .core import (LogLogFit, QGrid, ScaleGrid, ScalingError, SpectrumCurve,
                   TimeSeries, fit_loglog, fit_semilog,
                   legendre_transform_f_to_tau, legendre_transform_tau_to_f)
from .dea import (BinRule, DiffusionEnsemble, HistogramSpec, bin_count,
                  collect_fluctuations, dea, delta_spectrum, histogram,
                  renyi_entropy)
from .ingest import ColumnSpec, load_series, to_increments
from .mfdfa import (DfaConfig, FluctuationSurface, dfa_hurst,
                    fluctuation_function, h_spectrum, local_fluctuation, mfdfa,
                    profile, rescaled_range, rolling_hurst, tau_from_h)
from .spectra import (BoxMeasure, cascade_measures, compare_spectra,
                      generalized_dimensions, measure_from_series,
                      partition_function, partition_spectrum)
from .synth import GeneratorSpec, analytic_tau_cascade, fgn_ensemble, generate
