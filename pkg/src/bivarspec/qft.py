"""Discrete quaternion Fourier transform of axis j.

``X_k = sum_t x[t] exp(-j 2 pi k t / N)`` with the kernel on the right.
Writing ``x = x1 + i x2`` with ``x1, x2`` in the (1, j) plane splits the
transform into two ordinary complex FFTs, which is how it is computed here.
"""

import numpy as np

from . import quaternion as Q
from ._validation import check_signal


def signal_to_quat(x):
    """Embed a complex signal ``u + 1j v`` as quaternions ``u + i v``."""
    x = np.asarray(x)
    return Q.quat(x.real, x.imag, 0.0, 0.0)


def quat_to_signal(q):
    """Back to ``u + 1j v``; the j and k components are dropped."""
    q = Q.as_quat(q)
    return q[..., 0] + 1j * q[..., 1]


def _as_quat_sequence(x):
    x = np.asarray(x)
    if np.iscomplexobj(x) or x.ndim == 1:
        x = signal_to_quat(check_signal(x, allow_batch=True))
    else:
        x = Q.as_quat(x)
        if not np.all(np.isfinite(x)):
            raise ValueError("signal contains non-finite samples")
    if x.shape[-2] == 0:
        raise ValueError("cannot transform an empty signal")
    return x


def qft_forward(x):
    """Forward QFT along the time axis.

    Parameters
    ----------
    x : array_like
        Either a complex signal ``u + 1j v`` of shape ``(..., N)`` or a
        quaternion sequence of shape ``(..., N, 4)``.

    Returns
    -------
    ndarray, shape (..., N, 4)
        Quaternion spectrum at the bins ``k / N``, ``k = 0..N-1``.
    """
    x = _as_quat_sequence(x)
    x1, x2 = Q.symplectic_split(x)
    return Q.symplectic_compose(np.fft.fft(x1, axis=-1), np.fft.fft(x2, axis=-1))


def qft_inverse(X):
    """Inverse QFT with the 1/N normalization."""
    X = Q.as_quat(X)
    X1, X2 = Q.symplectic_split(X)
    return Q.symplectic_compose(np.fft.ifft(X1, axis=-1), np.fft.ifft(X2, axis=-1))


def qft_direct(x):
    """O(N^2) reference QFT built from explicit quaternion products."""
    x = _as_quat_sequence(x)
    n = x.shape[-2]
    t = np.arange(n)
    angle = -2.0 * np.pi * np.outer(t, t) / n
    kernel = Q.quat(np.cos(angle), 0.0, np.sin(angle), 0.0)  # (k, t, 4)
    return Q.multiply(x[..., None, :, :], kernel).sum(axis=-2)


def frequencies(n):
    """Bin frequencies ``k / n`` in FFT order."""
    return np.arange(n) / n


def signed_frequencies(n):
    """Bin frequencies folded into ``[-1/2, 1/2)``."""
    return np.fft.fftfreq(n)


def positive_bins(n):
    """Indices ``0..n//2`` of the non-negative frequencies."""
    return np.arange(n // 2 + 1)


def mirror_index(n):
    """Index of ``-nu_k`` for every bin ``k``."""
    return (-np.arange(n)) % n


def check_i_hermitian(X):
    """Largest violation of ``X(-nu) = -i X(nu) i`` over the bins.

    The relation holds for the QFT of any signal with values in the (1, i)
    plane, i.e. for every bivariate signal ``u + i v``.
    """
    X = Q.as_quat(X)
    if X.shape[-2] == 0:
        return 0.0
    mirrored = X[..., mirror_index(X.shape[-2]), :]
    return float(np.max(Q.norm(mirrored - Q.involution(X, "i"))))
