"""Quaternion arithmetic on numpy arrays.

A quaternion ``a + b i + c j + d k`` is stored as the last axis of a float
array of shape ``(..., 4)`` holding ``(a, b, c, d)``.  Every function here is
vectorized over the leading axes and never mutates its inputs.
"""

from typing import NamedTuple

import numpy as np

EQ_TOL = 1e-10

ONE = np.array([1.0, 0.0, 0.0, 0.0])
I = np.array([0.0, 1.0, 0.0, 0.0])
J = np.array([0.0, 0.0, 1.0, 0.0])
K = np.array([0.0, 0.0, 0.0, 1.0])

_AXES = {"i": I, "j": J, "k": K}


class EulerPolarForm(NamedTuple):
    """Polar form ``modulus * exp(i theta) exp(-k chi) exp(j phi)``."""

    modulus: float
    theta: float
    chi: float
    phi: float


def quat(a=0.0, b=0.0, c=0.0, d=0.0):
    """Build a quaternion array from its four components (broadcasting)."""
    a, b, c, d = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (a, b, c, d)))
    return np.stack([a, b, c, d], axis=-1)


def as_quat(q):
    q = np.asarray(q, dtype=float)
    if q.shape[-1:] != (4,):
        raise ValueError(f"quaternion arrays need a trailing axis of length 4, got shape {q.shape}")
    return q


def scalar_part(q):
    return as_quat(q)[..., 0]


def vector_part(q):
    q = as_quat(q).copy()
    q[..., 0] = 0.0
    return q


def norm2(q):
    q = as_quat(q)
    return np.sum(q * q, axis=-1)


def norm(q):
    # hypot avoids the underflow of squaring tiny components
    q = as_quat(q)
    return np.hypot(np.hypot(q[..., 0], q[..., 1]), np.hypot(q[..., 2], q[..., 3]))


def multiply(p, q):
    """Hamilton product ``p q`` with ``i^2 = j^2 = k^2 = ijk = -1``."""
    p = as_quat(p)
    q = as_quat(q)
    a1, b1, c1, d1 = np.moveaxis(p, -1, 0)
    a2, b2, c2, d2 = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ],
        axis=-1,
    )


def conj(q):
    q = as_quat(q)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def inverse(q):
    n2 = norm2(q)
    if np.any(n2 == 0):
        raise ZeroDivisionError("zero quaternion has no inverse")
    return conj(q) / n2[..., None]


def _axis(axis):
    try:
        return _AXES[axis]
    except KeyError:
        raise ValueError(f"axis must be one of 'i', 'j', 'k', got {axis!r}") from None


def involution(q, axis):
    """Involution ``-mu q mu`` about the basis axis ``mu``.

    It keeps the scalar part and the ``mu`` component and flips the two
    other imaginary components.
    """
    mu = _axis(axis)
    return -multiply(multiply(mu, as_quat(q)), mu)


def conj_involution(q, axis):
    """Conjugate of the involution about ``axis``.

    Flips only the ``axis`` component, e.g. ``a + bi - cj + dk`` for axis j.
    """
    return conj(involution(q, axis))


def polarmod_j(q):
    """Return ``q * conj_involution(q, 'j')``."""
    return multiply(q, conj_involution(q, "j"))


def exp_pure(mu, theta):
    """``exp(mu theta) = cos(theta) + mu sin(theta)`` for a pure unit ``mu``."""
    mu = as_quat(mu)
    if np.any(np.abs(mu[..., 0]) > EQ_TOL):
        raise ValueError("exp_pure needs a pure quaternion (zero scalar part)")
    if np.any(np.abs(norm(mu) - 1.0) > EQ_TOL):
        raise ValueError("exp_pure needs a unit quaternion")
    theta = np.asarray(theta, dtype=float)
    out = mu * np.sin(theta)[..., None]
    out[..., 0] = np.cos(theta)
    return out


def from_polar(modulus, theta, chi, phi):
    """Rebuild ``modulus * exp(i theta) exp(-k chi) exp(j phi)``."""
    q = multiply(multiply(exp_pure(I, theta), exp_pure(K, -np.asarray(chi, dtype=float))), exp_pure(J, phi))
    return np.asarray(modulus, dtype=float)[..., None] * q


def to_polar(q):
    """Euler polar form of a nonzero quaternion.

    The angles are recovered from ``p = polarmod_j(q) / |q|^2``, which equals
    ``cos 2chi exp(2 i theta) - k sin 2chi`` and does not depend on ``phi``:
    ``chi`` comes from the k component, ``theta`` from the (1, i) plane, and
    ``phi`` from what is left once the first two factors are divided out.

    Branch cuts: ``theta`` lies in ``(-pi/2, pi/2]`` and ``phi`` in
    ``(-pi, pi]``.  When ``|chi| = pi/4`` the orientation is degenerate and
    ``theta`` is set to 0.
    """
    q = as_quat(q)
    modulus = norm(q)
    if np.any(modulus == 0):
        raise ValueError("polar form is undefined for the zero quaternion")
    unit = q / modulus[..., None]
    p = polarmod_j(unit)
    chi = -0.5 * np.arcsin(np.clip(p[..., 3], -1.0, 1.0))
    degenerate = np.hypot(p[..., 0], p[..., 1]) < EQ_TOL
    theta = np.where(degenerate, 0.0, 0.5 * np.arctan2(p[..., 1], p[..., 0]))
    rest = multiply(multiply(exp_pure(K, chi), exp_pure(I, -theta)), unit)
    phi = np.arctan2(rest[..., 2], rest[..., 0])
    if q.ndim == 1:
        return EulerPolarForm(float(modulus), float(theta), float(chi), float(phi))
    return EulerPolarForm(modulus, theta, chi, phi)


def symplectic_split(q):
    """Split ``q = q1 + i q2`` with ``q1, q2`` in the (1, j) plane.

    The two parts are returned as ordinary complex numbers, the imaginary
    unit standing for ``j``.
    """
    q = as_quat(q)
    return q[..., 0] + 1j * q[..., 2], q[..., 1] + 1j * q[..., 3]


def symplectic_compose(q1, q2):
    """Inverse of :func:`symplectic_split`."""
    q1 = np.asarray(q1, dtype=complex)
    q2 = np.asarray(q2, dtype=complex)
    return quat(q1.real, q2.real, q1.imag, q2.imag)
