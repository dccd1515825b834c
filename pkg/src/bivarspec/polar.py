"""Polarization attributes of quaternion spectral densities.

A density value ``G = S0 + i S3 + j S1 + k S2`` carries the four Stokes
parameters of one frequency bin.  Quantities that do not exist for a bin
(degree of polarization at zero power, angles of an unpolarized bin) are
returned masked (``numpy.ma.masked``) rather than as NaN.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import quaternion as Q

CLAMP_TOL = 1e-9


class RotarySpectrum(NamedTuple):
    cw: np.ndarray
    ccw: np.ndarray
    complementary: np.ndarray


@dataclass(frozen=True)
class UPDecomposition:
    unpolarized: np.ndarray
    polarized: np.ndarray

    def reconstruct(self):
        out = self.polarized.copy()
        out[..., 0] += self.unpolarized
        return out


@dataclass(frozen=True)
class StokesSpectrum:
    """Per-bin Stokes parameters and derived attributes.

    ``s1, s2, s3, phi`` are masked where ``S0 == 0``; ``theta, chi`` are
    additionally masked where ``phi == 0``.
    """

    nu: np.ndarray
    S0: np.ndarray
    S1: np.ndarray
    S2: np.ndarray
    S3: np.ndarray
    s1: np.ma.MaskedArray
    s2: np.ma.MaskedArray
    s3: np.ma.MaskedArray
    phi: np.ma.MaskedArray
    theta: np.ma.MaskedArray
    chi: np.ma.MaskedArray
    n_clamped: int = 0

    @classmethod
    def from_density(cls, G, nu=None):
        G = Q.as_quat(G)
        S0, S1, S2, S3 = quaternion_to_stokes(G)
        phi, n_clamped = _dop(G)
        defined = ~np.ma.getmaskarray(phi)
        safe = np.where(defined, S0, 1.0)
        s1, s2, s3 = (np.ma.masked_array(S / safe, mask=~defined) for S in (S1, S2, S3))
        theta, chi = poincare_angles(G)
        if nu is None:
            nu = np.arange(G.shape[-2]) / G.shape[-2]
        return cls(np.asarray(nu), S0, S1, S2, S3, s1, s2, s3, phi, theta, chi, n_clamped)


def quaternion_to_stokes(G):
    """``(S0, S1, S2, S3)`` from ``G = S0 + i S3 + j S1 + k S2``."""
    G = Q.as_quat(G)
    return G[..., 0], G[..., 2], G[..., 3], G[..., 1]


def stokes_to_quaternion(S0, S1, S2, S3):
    return Q.quat(S0, S3, S1, S2)


def _unwrap(x):
    return x[()] if np.ndim(x) == 0 else x


def _dop(G):
    G = Q.as_quat(G)
    S0 = G[..., 0]
    V = Q.norm(Q.vector_part(G))
    defined = S0 > 0
    phi = np.where(defined, V / np.where(defined, S0, 1.0), 0.0)
    over = defined & (phi > 1.0) & (phi <= 1.0 + CLAMP_TOL)
    n_clamped = int(np.count_nonzero(over))
    phi = np.where(over, 1.0, phi)
    return np.ma.masked_array(phi, mask=~defined), n_clamped


def degree_of_polarization(G):
    """``|V(G)| / S(G)``; masked where the scalar part is not positive."""
    return _unwrap(_dop(G)[0])


def poincare_angles(G):
    """Orientation ``theta`` in ``[-pi/2, pi/2)`` and ellipticity ``chi``.

    ``(2 theta, 2 chi)`` are the azimuth and elevation of ``(S1, S2, S3)``
    on the Poincare sphere.  ``theta`` and ``theta + pi`` describe the same
    ellipse; the half-open range picks one.
    """
    G = Q.as_quat(G)
    S0, S1, S2, S3 = quaternion_to_stokes(G)
    V = Q.norm(Q.vector_part(G))
    defined = (S0 > 0) & (V > 0)
    theta = 0.5 * np.arctan2(S2, S1)
    theta = np.where(theta >= np.pi / 2, -np.pi / 2, theta)
    chi = 0.5 * np.arcsin(np.clip(S3 / np.where(defined, V, 1.0), -1.0, 1.0))
    mask = ~defined
    return _unwrap(np.ma.masked_array(theta, mask=mask)), _unwrap(np.ma.masked_array(chi, mask=mask))


def up_decompose(G):
    """Split ``G`` into an unpolarized scalar and a fully polarized part.

    Raises
    ------
    ValueError
        If some bin has a degree of polarization above ``1 + CLAMP_TOL``
        or negative power.
    """
    G = Q.as_quat(G)
    S0 = G[..., 0]
    V = Q.norm(Q.vector_part(G))
    if np.any(S0 < 0):
        raise ValueError("negative total power is not a valid density")
    if np.any(V > S0 * (1.0 + CLAMP_TOL) + 1e-300):
        raise ValueError("degree of polarization exceeds 1: not a valid density")
    polarized_power = np.minimum(V, S0)
    polarized = G.copy()
    polarized[..., 0] = polarized_power
    return UPDecomposition(unpolarized=S0 - polarized_power, polarized=polarized)


def to_rotary(G):
    """Rotary spectra of one bin and its mirror.

    ``cw = S0 + S3`` is the rotary spectrum at ``nu``, ``ccw = S0 - S3`` the
    one at ``-nu``, and ``complementary = S1 + 1j S2`` the complementary
    spectral density.  Positive ``S3`` therefore adds to the clockwise side.
    """
    S0, S1, S2, S3 = quaternion_to_stokes(G)
    return RotarySpectrum(S0 + S3, S0 - S3, S1 + 1j * S2)


def from_rotary(cw, ccw, complementary):
    complementary = np.asarray(complementary, dtype=complex)
    cw = np.asarray(cw, dtype=float)
    ccw = np.asarray(ccw, dtype=float)
    return stokes_to_quaternion(0.5 * (cw + ccw), complementary.real, complementary.imag, 0.5 * (cw - ccw))


def rotate_frame(G, alpha):
    """Express ``G`` in axes rotated by ``alpha``: ``e^{i a} G e^{-i a}``."""
    r = Q.exp_pure(Q.I, alpha)
    return Q.multiply(Q.multiply(r, G), Q.conj(r))


def properness_test(G, threshold):
    """Flag bins whose linear polarization ``sqrt(s1^2 + s2^2)`` exceeds ``threshold``.

    A proper signal has ``S1 = S2 = 0`` at every frequency, so flags mark
    evidence of improperness.  Bins without power are never flagged.
    """
    G = Q.as_quat(G)
    S0, S1, S2, _ = quaternion_to_stokes(G)
    defined = S0 > 0
    linear = np.hypot(S1, S2) / np.where(defined, S0, 1.0)
    return defined & (linear > threshold)
