"""Dagum and Generalized Cauchy covariances and their isotropic spectral densities."""
from .errors import (DagumError, DivergenceError, DomainError, PoleError, QuadratureError,
                     RegimeError, ResonanceError)
from .kernels import (CauchyParams, DagumParams, ValidityReport, cauchy_cov, classify_validity,
                      dagum_cov, dagum_total_integral, fractal_hurst)
from .spectral import (Method, ResonanceReport, SpectralValue, cauchy_density_reference,
                       density_auto, density_fox_wright, density_series_large_z,
                       density_series_small_z, high_freq_leading, low_freq_asymptotic,
                       resonance_check)
from .transforms import (QuadratureReport, density_quadrature, imag_axis_density_d1,
                         imag_axis_density_dge2, inverse_density)

__version__ = "0.1.0"
