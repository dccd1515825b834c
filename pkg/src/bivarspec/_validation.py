"""Input checks shared by the estimators and generators."""

import numpy as np
from sklearn.utils import check_array


def check_signal(x, allow_batch=False):
    """Return a finite complex signal array.

    Accepts a complex vector ``u + 1j v``, a real vector (``v = 0``), or a
    real array of shape ``(N, 2)`` holding ``(u, v)`` columns.  With
    ``allow_batch`` a 2-D complex array is read as ``(n_signals, N)``.
    """
    x = np.asarray(x)
    if x.ndim == 0:
        raise ValueError("expected a signal, got a scalar")
    if not np.iscomplexobj(x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 2 and x.shape[1] == 2 and not allow_batch:
            x = x[:, 0] + 1j * x[:, 1]
    x = np.asarray(x, dtype=complex)
    if x.ndim > 2 or (x.ndim == 2 and not allow_batch):
        raise ValueError(f"signal has unsupported shape {x.shape}")
    if x.shape[-1] == 0:
        raise ValueError("signal is empty")
    if not np.all(np.isfinite(x)):
        raise ValueError("signal contains NaN or infinite samples")
    return x


def check_signal_batch(X):
    """Coerce to a 2-D complex array of shape ``(n_signals, N)``.

    A single 1-D signal becomes a batch of one; an ``(N, 2)`` real array is
    read as one signal with ``(u, v)`` columns.
    """
    X = np.asarray(X)
    if not np.iscomplexobj(X):
        X = check_array(X, ensure_2d=False, dtype=float)
        if X.ndim == 2 and X.shape[1] == 2:
            X = X[:, 0] + 1j * X[:, 1]
    X = np.asarray(X, dtype=complex)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise ValueError(f"expected signals of shape (n_signals, N), got {X.shape}")
    if X.shape[1] == 0:
        raise ValueError("signals are empty")
    if not np.all(np.isfinite(X)):
        raise ValueError("signals contain NaN or infinite samples")
    return X


def check_probability(value, name):
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return float(value)
