"""Monte-Carlo experiments on polarization estimation.

Two studies live here: the bias of the M-averaged degree-of-polarization
estimator on white noise, and the tone-in-noise validation run comparing
averaged periodograms and multitaper estimates against theory.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import quaternion as Q
from ._validation import check_probability
from .polar import StokesSpectrum
from .qft import frequencies
from .sigmodel import (
    MonochromaticSpec,
    WhiteNoiseSpec,
    derive_rng,
    gen_tone_plus_noise,
    oracle_tone_plus_noise,
    white_noise_from_rng,
)
from .specest import multitaper_estimate, polarization_periodogram, slepian_tapers

BIAS_PHI_GRID = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)
BIAS_M_VALUES = (1, 2, 5, 10, 20, 50, 500)

SECTION5_N = 1024
SECTION5_TONE = MonochromaticSpec(a=1.0, theta=-np.pi / 3, chi=np.pi / 8, nu0=128 / SECTION5_N)
SECTION5_NOISE = dict(s0=10.0, phi=0.2, theta=np.pi / 8)


def averaged_dop_estimate(estimates, bin=None):
    """Degree of polarization from M spectral estimates.

    ``|sum_m V(G_m)| / sum_m S(G_m)``: the vector parts are summed before
    taking the norm.  ``estimates`` is an array ``(M, N, 4)`` or a sequence
    of estimates with a ``bins`` attribute.  Returns the value at ``bin`` or,
    when ``bin`` is None, a masked array over all bins (masked where the
    total power is zero).
    """
    if not isinstance(estimates, np.ndarray):
        estimates = [getattr(e, "bins", e) for e in estimates]
        if len({np.shape(e) for e in estimates}) > 1:
            raise ValueError("all estimates must have the same number of bins")
        estimates = np.stack(estimates)
    G = Q.as_quat(estimates)
    if G.ndim < 3 or G.shape[0] < 1:
        raise ValueError("need an array of shape (M, N, 4) with M >= 1")
    total = G.sum(axis=0)
    if bin is not None:
        total = total[bin]
    S = total[..., 0]
    V = Q.norm(Q.vector_part(total))
    defined = S > 0
    phi = np.ma.masked_array(V / np.where(defined, S, 1.0), mask=~defined)
    return phi[()] if phi.ndim == 0 else phi


@dataclass(frozen=True)
class BiasStudyConfig:
    phi_grid: tuple = BIAS_PHI_GRID
    m_values: tuple = BIAS_M_VALUES
    n: int = 128
    replicates_per_cell: int = 100
    seed: int = 0

    def __post_init__(self):
        for phi in self.phi_grid:
            check_probability(phi, "phi")
        if any(m < 1 for m in self.m_values):
            raise ValueError("every M must be at least 1")
        if self.n < 4:
            raise ValueError("n must be at least 4 to have interior bins")
        if self.replicates_per_cell < 1:
            raise ValueError("replicates_per_cell must be at least 1")


@dataclass(frozen=True)
class BiasTable:
    phi_true: np.ndarray
    m_values: np.ndarray
    bias: np.ndarray
    stderr: np.ndarray
    config: BiasStudyConfig = field(default=None, compare=False)

    def rows(self):
        for i, phi in enumerate(self.phi_true):
            for j, m in enumerate(self.m_values):
                yield float(phi), int(m), float(self.bias[i, j]), float(self.stderr[i, j])


def _bias_cell(cfg, iphi, im, rep):
    phi = cfg.phi_grid[iphi]
    m = cfg.m_values[im]
    rng = derive_rng(cfg.seed, iphi, im, rep)
    spec = WhiteNoiseSpec(s0=1.0, phi=phi, theta=0.0, seed=cfg.seed)
    w = white_noise_from_rng(spec, cfg.n, rng, size=m)
    interior = slice(1, cfg.n // 2)
    G = polarization_periodogram(w)[:, interior]
    return float(np.mean(averaged_dop_estimate(G)))


def run_bias_study(cfg, n_jobs=None):
    """Bias of the M-averaged degree-of-polarization estimate on white noise.

    For each ``(phi, M)`` cell and each repetition, M independent unit-power
    Gaussian white-noise signals with degree ``phi`` are drawn from the
    stream ``(seed, i_phi, i_M, repetition)``, their periodograms are
    combined per bin, and the estimate is averaged over the interior
    positive-frequency bins ``1..N/2-1``.  The table is identical for any
    ``n_jobs``.
    """
    cells = [
        (iphi, im, rep)
        for iphi in range(len(cfg.phi_grid))
        for im in range(len(cfg.m_values))
        for rep in range(cfg.replicates_per_cell)
    ]
    if n_jobs == 1:
        values = [_bias_cell(cfg, *c) for c in cells]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs or os.cpu_count()) as pool:
            values = list(pool.map(lambda c: _bias_cell(cfg, *c), cells))
    values = np.array(values).reshape(len(cfg.phi_grid), len(cfg.m_values), cfg.replicates_per_cell)
    phi_true = np.asarray(cfg.phi_grid, dtype=float)
    bias = values.mean(axis=-1) - phi_true[:, None]
    r = cfg.replicates_per_cell
    stderr = values.std(axis=-1, ddof=1) / np.sqrt(r) if r > 1 else np.zeros_like(bias)
    return BiasTable(phi_true, np.asarray(cfg.m_values), bias, stderr, cfg)


@dataclass(frozen=True)
class Section5Report:
    """Per-realization estimates and theory for the tone-in-noise run."""

    nu: np.ndarray
    theory: np.ndarray
    periodograms: np.ndarray
    multitapers: np.ndarray
    seed: int
    n_tapers: int
    bandwidth: float

    @property
    def tone_bin(self):
        return int(round(SECTION5_TONE.nu0 * len(self.nu)))

    @property
    def mean_periodogram(self):
        return self.periodograms.mean(axis=0)

    @property
    def mean_multitaper(self):
        return self.multitapers.mean(axis=0)

    def stokes(self, which):
        G = {"theory": self.theory, "periodogram": self.mean_periodogram, "multitaper": self.mean_multitaper}[which]
        return StokesSpectrum.from_density(G, self.nu)


def section5_specs(seed, n=SECTION5_N):
    if not float(SECTION5_TONE.nu0 * n).is_integer():
        raise ValueError(f"n = {n} does not put the tone on a frequency bin")
    return SECTION5_TONE, WhiteNoiseSpec(seed=seed, **SECTION5_NOISE)


def run_section5_experiment(seed=0, m=20, n_tapers=5, n=SECTION5_N, bandwidth=4.0):
    """Tone plus polarized white noise, M realizations, two estimators.

    Realization ``r`` draws its noise from the stream ``(seed, r)``, the same
    stream ``gen_tone_plus_noise(..., replicate=r)`` uses.
    """
    tone, noise = section5_specs(seed, n)
    y = np.stack([gen_tone_plus_noise(tone, noise, n, replicate=r) for r in range(m)])
    tapers = slepian_tapers(n, bandwidth, n_tapers)
    theory = oracle_tone_plus_noise(tone, noise, n).per_bin()
    return Section5Report(
        nu=frequencies(n),
        theory=theory,
        periodograms=polarization_periodogram(y),
        multitapers=multitaper_estimate(y, tapers),
        seed=seed,
        n_tapers=n_tapers,
        bandwidth=bandwidth,
    )
