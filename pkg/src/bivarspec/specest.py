"""Nonparametric quaternion spectral density estimators.

All estimates are arrays of shape ``(..., N, 4)`` on the bins ``k / N``.
The time index runs over ``t = 0..N-1``; shifting it only multiplies the
QFT by a unit phase on the right, which cancels in every estimate below.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from . import quaternion as Q
from ._validation import check_signal
from .polar import StokesSpectrum
from .qft import frequencies, qft_forward


@dataclass(frozen=True)
class QuaternionCovariance:
    """Quaternion covariance on lags ``-(N-1)..(N-1)``."""

    lags: np.ndarray
    values: np.ndarray

    def at(self, tau):
        n = (len(self.lags) + 1) // 2
        if abs(tau) >= n:
            return np.zeros(4)
        return self.values[tau + n - 1]


@dataclass(frozen=True)
class TaperSet:
    tapers: np.ndarray
    bandwidth: float
    concentrations: np.ndarray = field(default=None)

    @property
    def n_tapers(self):
        return self.tapers.shape[0]


@dataclass(frozen=True)
class SpectralDensityEstimate:
    bins: np.ndarray
    method: str
    n_tapers: int = None

    @property
    def n(self):
        return self.bins.shape[-2]

    @property
    def nu(self):
        return frequencies(self.n)

    def stokes(self):
        return StokesSpectrum.from_density(self.bins, self.nu)


def est_cross_cov(u, v):
    """Biased cross-covariance ``R[tau] = (1/N) sum_t u[t + tau] v[t]``.

    Returns the values on lags ``-(N-1)..(N-1)``; lags beyond are zero.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape or u.ndim != 1:
        raise ValueError(f"u and v must be 1-D of equal length, got {u.shape} and {v.shape}")
    n = len(u)
    if n == 0:
        raise ValueError("empty sequences")
    # np.correlate(u, v, 'full')[m] = sum_t u[t + m - (n-1)] v[t]
    return np.correlate(u, v, mode="full") / n


def cov_lags(n):
    return np.arange(-(n - 1), n)


def est_quaternion_autocov(x):
    """``R_uu + R_vv + (R_uu - R_vv) j + 2 R_vu k`` from biased estimates.

    The k term takes the u/v cross-covariance at reversed lag,
    ``R_vu[tau] = R_uv[-tau]``: with the QFT kernel on the right this is the
    ordering whose transform equals :func:`polarization_periodogram`.
    """
    x = check_signal(x)
    u, v = x.real, x.imag
    ruu = est_cross_cov(u, u)
    rvv = est_cross_cov(v, v)
    rvu = est_cross_cov(v, u)
    return QuaternionCovariance(cov_lags(len(x)), Q.quat(ruu + rvv, 0.0, ruu - rvv, 2.0 * rvu))


def est_quaternion_cross_cov(x, y):
    """Quaternion cross-covariance whose QFT is the cross-periodogram.

    ``R_uxuy + R_vyvx + (R_vxuy - R_vyux) i + (R_uxuy - R_vyvx) j
    + (R_vxuy + R_vyux) k``, where ``R_ab[tau] = (1/N) sum_t a[t + tau] b[t]``.
    Reduces to :func:`est_quaternion_autocov` when ``y = x``.
    """
    x = check_signal(x)
    y = check_signal(y)
    if x.shape != y.shape:
        raise ValueError(f"signals must have equal length, got {len(x)} and {len(y)}")
    ux, vx, uy, vy = x.real, x.imag, y.real, y.imag
    r_uxuy = est_cross_cov(ux, uy)
    r_vyvx = est_cross_cov(vy, vx)
    r_vxuy = est_cross_cov(vx, uy)
    r_vyux = est_cross_cov(vy, ux)
    values = Q.quat(r_uxuy + r_vyvx, r_vxuy - r_vyux, r_uxuy - r_vyvx, r_vxuy + r_vyux)
    return QuaternionCovariance(cov_lags(len(x)), values)


def covariance_to_density(cov, n):
    """QFT of a lag sequence evaluated at the bins ``k / n``.

    Lags are folded modulo ``n`` before the length-``n`` transform, which is
    exact at those frequencies.
    """
    folded = np.zeros((n, 4))
    np.add.at(folded, cov.lags % n, cov.values)
    return qft_forward(folded)


def _quaternion_square(F):
    """``|F|^2 + polarmod_j(F) j`` per bin.

    With ``F = F1 + i F2`` (``F1, F2`` in the (1, j) plane) this is
    ``|F1|^2 + |F2|^2 - 2 Im(conj(F1) F2) i + (|F1|^2 - |F2|^2) j
    + 2 Re(conj(F1) F2) k``, evaluated without generic quaternion products.
    """
    F1, F2 = Q.symplectic_split(F)
    p1 = F1.real**2 + F1.imag**2
    p2 = F2.real**2 + F2.imag**2
    z = np.conj(F1) * F2
    return Q.quat(p1 + p2, -2.0 * z.imag, p1 - p2, 2.0 * z.real)


def cross_periodogram(x, y):
    """``(F_x conj(F_y) + F_x conj_involution(F_y, j) j) / N``."""
    x = check_signal(x, allow_batch=True)
    y = check_signal(y, allow_batch=True)
    if x.shape != y.shape:
        raise ValueError(f"signals must have equal shape, got {x.shape} and {y.shape}")
    Fx, Fy = qft_forward(x), qft_forward(y)
    G = Q.multiply(Fx, Q.conj(Fy)) + Q.multiply(Q.multiply(Fx, Q.conj_involution(Fy, "j")), Q.J)
    return G / x.shape[-1]


def polarization_periodogram(x):
    """Polarization periodogram ``(|F|^2 + polarmod_j(F) j) / N`` with ``F = QFT(x)``.

    ``x`` may be a batch ``(M, N)``; the result then has shape ``(M, N, 4)``.
    """
    x = check_signal(x, allow_batch=True)
    return _quaternion_square(qft_forward(x)) / x.shape[-1]


def direct_estimate(x, taper):
    """Tapered direct estimator; normalization comes from ``sum(taper**2) = 1``."""
    x = check_signal(x, allow_batch=True)
    taper = np.asarray(taper, dtype=float)
    if taper.shape[-1] != x.shape[-1]:
        raise ValueError(f"taper length {taper.shape[-1]} does not match signal length {x.shape[-1]}")
    return _quaternion_square(qft_forward(taper * x))


def multitaper_estimate(x, tapers):
    """Average of the K single-taper direct estimates.

    ``tapers`` is a :class:`TaperSet` or an array of shape ``(K, N)``.
    Eigenspectra are summed in taper order so the result is reproducible.
    """
    h = tapers.tapers if isinstance(tapers, TaperSet) else np.atleast_2d(np.asarray(tapers, dtype=float))
    x = check_signal(x, allow_batch=True)
    if h.shape[1] != x.shape[-1]:
        raise ValueError(f"taper length {h.shape[1]} does not match signal length {x.shape[-1]}")
    total = np.zeros(x.shape + (4,))
    for taper in h:
        total += direct_estimate(x, taper)
    return total / h.shape[0]


def rectangular_taper(n):
    return np.full((1, n), 1.0 / np.sqrt(n))


def dpss_concentration_matrix(n, bandwidth):
    """Dense sinc matrix whose quadratic form is the in-band energy fraction."""
    w = bandwidth / n
    d = np.arange(n)[:, None] - np.arange(n)[None, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        A = np.sin(2 * np.pi * w * d) / (np.pi * d)
    A[d == 0] = 2 * w
    return A


def slepian_tapers(n, bandwidth=4.0, n_tapers=5):
    """First ``n_tapers`` discrete prolate spheroidal sequences.

    Solves the symmetric tridiagonal problem that commutes with the sinc
    concentration matrix (diagonal ``((N-1-2t)/2)^2 cos(2 pi W)``,
    off-diagonal ``t (N - t) / 2``, ``W = NW / N``).  Sign convention: even
    tapers have a non-negative sum, odd tapers start increasing
    (``h[1] >= h[0]``).

    Parameters
    ----------
    n : int
        Taper length.
    bandwidth : float
        Time-bandwidth product NW.
    n_tapers : int
        Number of tapers K, at most ``n``.
    """
    if n_tapers < 1:
        raise ValueError("need at least one taper")
    if n_tapers > n:
        raise ValueError(f"cannot build {n_tapers} tapers of length {n}")
    if not 0 < bandwidth < n / 2:
        raise ValueError(f"bandwidth NW must lie in (0, N/2), got {bandwidth}")
    w = bandwidth / n
    t = np.arange(n)
    diag = ((n - 1 - 2 * t) / 2.0) ** 2 * np.cos(2 * np.pi * w)
    off = t[1:] * (n - t[1:]) / 2.0
    _, vecs = eigh_tridiagonal(diag, off, select="i", select_range=(n - n_tapers, n - 1))
    h = vecs[:, ::-1].T.copy()
    for k in range(n_tapers):
        if k % 2 == 0:
            flip = h[k].sum() < 0
        else:
            flip = n > 1 and h[k, 1] - h[k, 0] < 0
        if flip:
            h[k] = -h[k]
    A = dpss_concentration_matrix(n, bandwidth)
    concentrations = np.einsum("kt,ts,ks->k", h, A, h)
    return TaperSet(tapers=h, bandwidth=float(bandwidth), concentrations=concentrations)


def fejer_kernel(nu, n):
    """``sin^2(pi N nu) / (N sin^2(pi nu))``, equal to N at integer ``nu``."""
    nu = np.asarray(nu, dtype=float)
    s = np.sin(np.pi * nu)
    near = np.abs(s) < 1e-12
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.sin(np.pi * n * nu) ** 2 / (n * s**2)
    return np.where(near, float(n), out)


def expected_periodogram(density, n, oversample=1):
    """Fejer-smoothed density: the mean of the length-``n`` periodogram.

    ``density`` is sampled on a grid of ``oversample * n`` equispaced
    frequencies in ``[0, 1)``; the circular convolution is done on that grid.
    With ``oversample = 1`` the kernel vanishes at every nonzero bin offset
    and the density is returned unchanged.
    """
    density = Q.as_quat(density)
    m = n * oversample
    if density.shape[-2] != m:
        raise ValueError(f"density must have {m} samples, got {density.shape[-2]}")
    kernel = fejer_kernel(np.arange(m) / m, n) / m
    spec = np.fft.fft(kernel)
    return np.real(np.fft.ifft(np.fft.fft(density, axis=-2) * spec[:, None], axis=-2))
