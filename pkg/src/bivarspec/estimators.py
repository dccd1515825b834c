"""Scikit-learn style wrappers around the spectral estimators.

``fit`` takes one signal or a batch of independent realizations of the
same length and stores the realization-averaged density.  ``transform``
maps each signal to a flat feature row of Stokes parameters on the
positive-frequency bins, so the estimators can sit in a ``Pipeline`` in
front of any tabular model.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_signal_batch
from .polar import StokesSpectrum
from .qft import frequencies, positive_bins
from .specest import multitaper_estimate, polarization_periodogram, slepian_tapers


def _stokes_features(G):
    # (M, N, 4) -> (M, 4 * n_pos) ordered S0 block, S1 block, S2 block, S3 block
    n = G.shape[-2]
    bins = positive_bins(n)
    S = G[:, bins][..., [0, 2, 3, 1]]
    return np.ascontiguousarray(np.swapaxes(S, 1, 2)).reshape(G.shape[0], -1)


class _SpectrumBase(TransformerMixin, BaseEstimator):
    def _estimate(self, x):
        raise NotImplementedError

    def _prepare(self, n):
        pass

    def fit(self, X, y=None):
        """Average the per-signal estimates of ``X``.

        Parameters
        ----------
        X : array-like
            Complex signal ``(N,)``, batch ``(M, N)``, or real ``(N, 2)``.
        y : ignored

        Returns
        -------
        self
        """
        x = check_signal_batch(X)
        self.n_realizations_, self.n_samples_ = x.shape
        self._prepare(self.n_samples_)
        G = self._estimate(x)
        self.density_ = G.mean(axis=0)
        self.frequencies_ = frequencies(self.n_samples_)
        # components are averaged before phi is formed, never phi itself
        self.stokes_ = StokesSpectrum.from_density(self.density_, self.frequencies_)
        self.degree_of_polarization_ = self.stokes_.phi
        return self

    def estimate(self, X):
        """Per-signal quaternion estimates, shape ``(M, N, 4)``."""
        check_is_fitted(self, "density_")
        x = check_signal_batch(X)
        if x.shape[1] != self.n_samples_:
            raise ValueError(f"fitted on signals of length {self.n_samples_}, got {x.shape[1]}")
        return self._estimate(x)

    def transform(self, X):
        """Stokes features ``(M, 4 * (N // 2 + 1))``: S0, S1, S2, S3 blocks."""
        return _stokes_features(self.estimate(X))

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "density_")
        bins = positive_bins(self.n_samples_)
        return np.array([f"S{c}_{k}" for c in range(4) for k in bins], dtype=object)


class PolarizationPeriodogram(_SpectrumBase):
    """Polarization periodogram, averaged over the realizations seen in ``fit``.

    Attributes
    ----------
    density_ : ndarray (N, 4)
        Mean quaternion periodogram.
    stokes_ : StokesSpectrum
        Stokes parameters and derived attributes of ``density_``.
    degree_of_polarization_ : masked array (N,)
        Degree of polarization from the averaged components.
    frequencies_ : ndarray (N,)
    n_samples_, n_realizations_ : int
    """

    def _estimate(self, x):
        return polarization_periodogram(x)


class MultitaperSpectrum(_SpectrumBase):
    """Slepian multitaper estimate.

    Parameters
    ----------
    n_tapers : int, default 5
        Number of tapers K.
    bandwidth : float, default 4.0
        Time-bandwidth product NW.

    Attributes
    ----------
    tapers_ : TaperSet
        Tapers built for the fitted signal length.
    density_, stokes_, degree_of_polarization_, frequencies_ :
        As for :class:`PolarizationPeriodogram`.
    """

    def __init__(self, n_tapers=5, bandwidth=4.0):
        self.n_tapers = n_tapers
        self.bandwidth = bandwidth

    def _prepare(self, n):
        self.tapers_ = slepian_tapers(n, self.bandwidth, self.n_tapers)

    def _estimate(self, x):
        return multitaper_estimate(x, self.tapers_)
