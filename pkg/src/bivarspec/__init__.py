"""Quaternion spectral analysis of bivariate signals.

Bivariate samples ``u + i v`` are embedded in the quaternions, transformed
with a quaternion Fourier transform along ``j``, and summarized per
frequency by a quaternion spectral density ``S0 + i S3 + j S1 + k S2``
whose components are the Stokes parameters.
"""

__version__ = "0.1.0"

from .estimators import MultitaperSpectrum, PolarizationPeriodogram
from .mcstudy import (
    BiasStudyConfig,
    BiasTable,
    Section5Report,
    averaged_dop_estimate,
    run_bias_study,
    run_section5_experiment,
)
from .polar import (
    StokesSpectrum,
    UPDecomposition,
    degree_of_polarization,
    from_rotary,
    poincare_angles,
    properness_test,
    quaternion_to_stokes,
    rotate_frame,
    stokes_to_quaternion,
    to_rotary,
    up_decompose,
)
from .qft import frequencies, qft_direct, qft_forward, qft_inverse
from .sigmodel import (
    MonochromaticSpec,
    TheoreticalSpectrum,
    WhiteNoiseSpec,
    gen_monochromatic,
    gen_tone_plus_noise,
    gen_white_noise,
    oracle_tone_plus_noise,
)
from .specest import (
    QuaternionCovariance,
    SpectralDensityEstimate,
    TaperSet,
    covariance_to_density,
    cross_periodogram,
    est_quaternion_autocov,
    est_quaternion_cross_cov,
    multitaper_estimate,
    polarization_periodogram,
    slepian_tapers,
)
