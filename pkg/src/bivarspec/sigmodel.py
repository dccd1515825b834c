"""Synthetic bivariate signals with closed-form spectral oracles.

Units
-----
``WhiteNoiseSpec.s0`` is the per-sample power ``E|w[t]|^2``, which is also
the (constant) spectral density per unit frequency and the expected
periodogram value in every bin.  A tone contributes a spectral line whose
weight is its Stokes vector (``S0 = a^2``); in a length-N periodogram an
on-grid line shows up as ``N`` times that weight in a single bin.  The
reference tone-in-noise setup (``N = 1024``, ``s0 = 10``) therefore has a
noise-to-line power ratio of ``10 / N`` in the tone bin.

Random streams
--------------
``derive_rng(seed, *indices)`` seeds a PCG64 generator with
``SeedSequence([seed, *indices])``.  Replicate ``r`` of a Monte-Carlo run
uses ``derive_rng(seed, r)``, so results do not depend on how the work is
split across workers.
"""

from dataclasses import dataclass, field

import numpy as np

from . import quaternion as Q
from ._validation import check_probability
from .polar import stokes_to_quaternion


@dataclass(frozen=True)
class MonochromaticSpec:
    a: float = 1.0
    theta: float = 0.0
    chi: float = 0.0
    nu0: float = 0.125

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"a must be positive, got {self.a}")
        if not 0.0 < self.nu0 < 0.5:
            raise ValueError(f"nu0 must lie in (0, 1/2), got {self.nu0}")
        if abs(self.chi) > np.pi / 4 + 1e-12:
            raise ValueError(f"chi must lie in [-pi/4, pi/4], got {self.chi}")


@dataclass(frozen=True)
class WhiteNoiseSpec:
    s0: float = 1.0
    phi: float = 0.0
    theta: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not self.s0 > 0:
            raise ValueError(f"s0 must be positive, got {self.s0}")
        check_probability(self.phi, "phi")


@dataclass(frozen=True)
class TheoreticalSpectrum:
    """Continuous density per bin plus on-grid spectral lines.

    ``density`` has shape ``(N, 4)``; ``lines`` maps a bin index to the
    quaternion weight of the line sitting on it.
    """

    density: np.ndarray
    lines: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.density.shape[0]

    def per_bin(self):
        """Expected length-N periodogram value in every bin."""
        out = self.density.copy()
        for k, weight in self.lines.items():
            out[k] += self.n * np.asarray(weight)
        return out


def derive_rng(seed, *indices):
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, indices)]))


def gen_monochromatic(spec, n):
    """``2a e^{i theta} (cos chi cos(2 pi nu0 t) + i sin chi sin(2 pi nu0 t))``."""
    t = np.arange(n)
    w = 2 * np.pi * spec.nu0 * t
    return 2 * spec.a * np.exp(1j * spec.theta) * (np.cos(spec.chi) * np.cos(w) + 1j * np.sin(spec.chi) * np.sin(w))


def oracle_monochromatic_stokes(spec):
    a2 = spec.a**2
    c = np.cos(2 * spec.chi)
    return (
        a2,
        a2 * c * np.cos(2 * spec.theta),
        a2 * c * np.sin(2 * spec.theta),
        a2 * np.sin(2 * spec.chi),
    )


def oracle_monochromatic_autocov(spec, tau_max):
    """Quaternion autocovariance on lags ``-tau_max..tau_max``."""
    S0, S1, S2, S3 = oracle_monochromatic_stokes(spec)
    tau = np.arange(-tau_max, tau_max + 1)
    c = np.cos(2 * np.pi * spec.nu0 * tau)
    s = np.sin(2 * np.pi * spec.nu0 * tau)
    return tau, Q.quat(2 * S0 * c, 0.0, 2 * S1 * c, 2 * (S2 * c + S3 * s))


def _noise_draws(rng, shape):
    g = rng.standard_normal((3,) + shape)
    unpolarized = (g[0] + 1j * g[1]) / np.sqrt(2.0)
    return unpolarized, g[2]


def gen_white_noise(spec, n, replicate=None, size=None):
    """White Gaussian noise with the requested Stokes parameters.

    ``sqrt(s0) (sqrt(1 - phi) wu + sqrt(phi) e^{i theta} wp)``, with ``wu``
    circular complex noise of unit power (u and v each of variance 1/2) and
    ``wp`` real unit-variance noise.

    Parameters
    ----------
    spec : WhiteNoiseSpec
    n : int
        Number of samples.
    replicate : int, optional
        Draw from the derived stream ``(spec.seed, replicate)``.
    size : int, optional
        Draw ``size`` independent signals at once, shape ``(size, n)``.
    """
    rng = derive_rng(spec.seed) if replicate is None else derive_rng(spec.seed, replicate)
    return white_noise_from_rng(spec, n, rng, size)


def white_noise_from_rng(spec, n, rng, size=None):
    shape = (n,) if size is None else (size, n)
    wu, wp = _noise_draws(rng, shape)
    return np.sqrt(spec.s0) * (np.sqrt(1 - spec.phi) * wu + np.sqrt(spec.phi) * np.exp(1j * spec.theta) * wp)


def white_noise_stokes(spec):
    return (
        spec.s0,
        spec.s0 * spec.phi * np.cos(2 * spec.theta),
        spec.s0 * spec.phi * np.sin(2 * spec.theta),
        0.0,
    )


def white_noise_density(spec):
    return stokes_to_quaternion(*white_noise_stokes(spec))


def oracle_white_noise_density(sigma_u, sigma_v, rho_uv):
    if sigma_u < 0 or sigma_v < 0:
        raise ValueError("standard deviations must be non-negative")
    if abs(rho_uv) > 1:
        raise ValueError(f"correlation must lie in [-1, 1], got {rho_uv}")
    su2, sv2 = sigma_u**2, sigma_v**2
    return Q.quat(su2 + sv2, 0.0, su2 - sv2, 2 * rho_uv * sigma_u * sigma_v)


def white_noise_dop(sigma_u, sigma_v, rho_uv):
    su2, sv2 = sigma_u**2, sigma_v**2
    return np.sqrt((su2 - sv2) ** 2 + 4 * rho_uv**2 * su2 * sv2) / (su2 + sv2)


def oracle_white_noise_angle(sigma_u, sigma_v, rho_uv):
    """Orientation of the linearly polarized part of bivariate white noise."""
    if white_noise_dop(sigma_u, sigma_v, rho_uv) == 0:
        raise ValueError("orientation is undefined for unpolarized noise")
    if rho_uv == 0:
        # only the sign of su^2 - sv^2 matters: horizontal or vertical
        return 0.0 if sigma_u > sigma_v else -np.pi / 2
    if sigma_u == sigma_v:
        return np.pi / 4 if rho_uv > 0 else -np.pi / 4
    return 0.5 * np.arctan2(2 * rho_uv * sigma_u * sigma_v, sigma_u**2 - sigma_v**2)


def oracle_tone_plus_noise(x_spec, w_spec, n):
    """Theoretical spectrum of an on-grid tone plus independent white noise."""
    k0 = int(round(x_spec.nu0 * n))
    if not np.isclose(k0, x_spec.nu0 * n, rtol=0, atol=1e-9):
        raise ValueError(f"nu0 = {x_spec.nu0} is not on the length-{n} frequency grid")
    density = np.tile(white_noise_density(w_spec), (n, 1))
    line = stokes_to_quaternion(*oracle_monochromatic_stokes(x_spec))
    lines = {k0: line, (n - k0) % n: Q.conj_involution(line, "i")}
    return TheoreticalSpectrum(density=density, lines=lines)


def gen_tone_plus_noise(x_spec, w_spec, n, replicate=None, size=None):
    return gen_monochromatic(x_spec, n) + gen_white_noise(w_spec, n, replicate=replicate, size=size)
