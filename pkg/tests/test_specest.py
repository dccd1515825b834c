import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.signal.windows import dpss

from bivarspec import quaternion as Q
from bivarspec.polar import degree_of_polarization, quaternion_to_stokes
from bivarspec.qft import mirror_index, qft_forward
from bivarspec.sigmodel import MonochromaticSpec, WhiteNoiseSpec, gen_monochromatic, gen_white_noise, white_noise_density
from bivarspec.specest import (
    SpectralDensityEstimate,
    covariance_to_density,
    cross_periodogram,
    direct_estimate,
    dpss_concentration_matrix,
    est_cross_cov,
    est_quaternion_autocov,
    est_quaternion_cross_cov,
    expected_periodogram,
    fejer_kernel,
    multitaper_estimate,
    polarization_periodogram,
    rectangular_taper,
    slepian_tapers,
)

signals = arrays(
    np.complex128,
    st.integers(1, 48),
    elements=st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False),
)


def random_signal(rng, n):
    return rng.normal(size=n) + 1j * rng.normal(size=n)


def loop_cross_cov(u, v, tau):
    n = len(u)
    return sum(u[t + tau] * v[t] for t in range(n) if 0 <= t + tau < n) / n


# covariances


def test_cross_cov_examples():
    r = est_cross_cov(np.full(4, 3.0), np.full(4, 3.0))
    assert r[3] == 9.0
    cov = est_quaternion_autocov(np.arange(4.0))
    np.testing.assert_array_equal(cov.at(4), np.zeros(4))
    np.testing.assert_array_equal(cov.at(-7), np.zeros(4))


def test_cross_cov_matches_double_loop(rng):
    u, v = rng.normal(size=(2, 23))
    r = est_cross_cov(u, v)
    expected = [loop_cross_cov(u, v, tau) for tau in range(-22, 23)]
    np.testing.assert_allclose(r, expected, rtol=1e-13, atol=1e-15)
    # negative lags mirror the swapped pair
    np.testing.assert_allclose(r[::-1], est_cross_cov(v, u), rtol=1e-13, atol=1e-15)


def test_cross_cov_length_mismatch():
    with pytest.raises(ValueError):
        est_cross_cov(np.ones(3), np.ones(4))
    with pytest.raises(ValueError):
        est_quaternion_cross_cov(np.ones(3), np.ones(4))


def test_autocov_of_real_and_imaginary_signals(rng):
    u = rng.normal(size=30)
    ruu = est_cross_cov(u, u)
    np.testing.assert_allclose(est_quaternion_autocov(u).values, Q.quat(ruu, 0.0, ruu, 0.0), atol=1e-15)
    np.testing.assert_allclose(est_quaternion_autocov(1j * u).values, Q.quat(ruu, 0.0, -ruu, 0.0), atol=1e-15)


@given(signals)
def test_autocov_structure(x):
    cov = est_quaternion_autocov(x)
    assert np.all(cov.values[:, 1] == 0)
    scalar = cov.values[:, 0]
    assert np.all(np.abs(scalar) <= cov.at(0)[0] * (1 + 1e-12) + 1e-300)


def test_two_path_identity_50_signals(rng):
    for _ in range(50):
        n = int(rng.integers(1, 129))
        x = random_signal(rng, n)
        G = polarization_periodogram(x)
        H = covariance_to_density(est_quaternion_autocov(x), n)
        assert np.max(np.abs(H - G)) <= 1e-8 * np.max(np.abs(G))


def test_cross_cov_reduces_to_autocov(rng):
    x = random_signal(rng, 40)
    np.testing.assert_allclose(est_quaternion_cross_cov(x, x).values, est_quaternion_autocov(x).values, atol=1e-14)


def test_cross_cov_transform_is_cross_periodogram(rng):
    x, y = random_signal(rng, 37), random_signal(rng, 37)
    H = covariance_to_density(est_quaternion_cross_cov(x, y), 37)
    np.testing.assert_allclose(H, cross_periodogram(x, y), atol=1e-12)
    np.testing.assert_allclose(cross_periodogram(x, x), polarization_periodogram(x), atol=1e-12)


def shifted_pair(z, n, lag):
    # x[t] = y[t - lag]
    if lag >= 0:
        return z[:n], z[lag : lag + n]
    return z[-lag : -lag + n], z[:n]


@pytest.mark.parametrize("lag", [0, 3, 17, -5])
def test_cross_cov_peaks_at_shift_for_real_signals(rng, lag):
    n = 128
    x, y = shifted_pair(rng.normal(size=n + abs(lag)), n, lag)
    cov = est_quaternion_cross_cov(x, y)
    assert cov.lags[np.argmax(cov.values[:, 0])] == lag


@pytest.mark.parametrize("lag", [3, -5])
def test_cross_cov_v_part_enters_at_reversed_lag(rng, lag):
    # the scalar part is R_uxuy[tau] + R_vyvx[tau]; for v-only signals the peak sits at -lag
    n = 128
    x, y = shifted_pair(1j * rng.normal(size=n + abs(lag)), n, lag)
    cov = est_quaternion_cross_cov(x, y)
    assert cov.lags[np.argmax(cov.values[:, 0])] == -lag


def test_cross_cov_peaks_at_shift_for_a_tone():
    n, lag = 256, 3
    z = np.cos(2 * np.pi * 0.05 * np.arange(n + lag))
    cov = est_quaternion_cross_cov(*shifted_pair(z, n, lag))
    assert cov.lags[np.argmax(cov.values[:, 0])] == lag


def test_cross_cov_of_independent_noise_is_null():
    m, n = 300, 64
    spec = WhiteNoiseSpec(s0=1.0, phi=0.5, theta=0.2, seed=31)
    x = gen_white_noise(spec, n, replicate=0, size=m)
    y = gen_white_noise(spec, n, replicate=1, size=m)
    lags = [0, 1, 5, -7]
    vals = np.array([[est_quaternion_cross_cov(a, b).at(tau) for tau in lags] for a, b in zip(x, y)])
    mean = vals.mean(axis=0)
    se = vals.std(axis=0, ddof=1) / np.sqrt(m)
    assert np.all(np.abs(mean) < 3 * se)


def test_lag_weighted_sums_match_increment_moments():
    # ensemble mean of the transformed covariance vs the increment moments at the same bins
    m, n = 500, 128
    spec = WhiteNoiseSpec(s0=2.0, phi=0.4, theta=-0.6, seed=41)
    w = gen_white_noise(spec, n, replicate=0, size=m)
    from_cov = np.array([covariance_to_density(est_quaternion_autocov(x), n) for x in w])
    X = qft_forward(w)
    from_increments = (Q.multiply(X, Q.conj(X)) + Q.multiply(Q.polarmod_j(X), Q.J)) / n
    np.testing.assert_allclose(from_cov.mean(0), from_increments.mean(0), atol=1e-10)
    se = from_increments.std(0, ddof=1) / np.sqrt(m)
    target = white_noise_density(spec)
    live = se > 0
    z = np.abs(from_cov.mean(0) - target)[live] / se[live]
    assert np.mean(z > 3) < 0.01


# periodogram


def test_periodogram_of_reference_tone():
    tone = MonochromaticSpec(a=1.0, theta=-np.pi / 3, chi=np.pi / 8, nu0=0.125)
    G = polarization_periodogram(gen_monochromatic(tone, 1024))[128]
    S0, S1, S2, S3 = quaternion_to_stokes(G)
    assert S1 / S0 == pytest.approx(-0.354, abs=5e-4)
    assert S2 / S0 == pytest.approx(-0.612, abs=5e-4)
    assert S3 / S0 == pytest.approx(0.707, abs=5e-4)
    assert degree_of_polarization(G) == pytest.approx(1.0, abs=1e-12)


def test_periodogram_of_zero_signal():
    np.testing.assert_array_equal(polarization_periodogram(np.zeros(16, complex)), np.zeros((16, 4)))


def test_periodogram_scalar_is_rotary_power(rng):
    x = random_signal(rng, 50)
    U, V = np.fft.fft(x.real), np.fft.fft(x.imag)
    np.testing.assert_allclose(polarization_periodogram(x)[:, 0], (np.abs(U) ** 2 + np.abs(V) ** 2) / 50, rtol=1e-12)


def test_periodogram_closed_form_matches_products(rng):
    x = random_signal(rng, 64)
    F = qft_forward(x)
    direct = (Q.multiply(F, Q.conj(F)) + Q.multiply(Q.polarmod_j(F), Q.J)) / 64
    np.testing.assert_allclose(polarization_periodogram(x), direct, atol=1e-12)


@given(signals)
def test_periodogram_valid_density(x):
    G = polarization_periodogram(x)
    assert np.all(G[:, 0] >= 0)
    V = Q.norm(Q.vector_part(G))
    assert np.all(V <= G[:, 0] * (1 + 1e-12) + 1e-300)


@given(signals)
def test_single_periodogram_fully_polarized(x):
    G = polarization_periodogram(x)
    scale = np.abs(x).max() ** 2 * len(x)
    live = G[:, 0] > 1e-9 * scale
    np.testing.assert_allclose(degree_of_polarization(G[live]), 1.0, atol=1e-6)


@given(signals)
def test_estimates_have_i_symmetry(x):
    n = len(x)
    for G in (polarization_periodogram(x), multitaper_estimate(x, slepian_tapers(n, min(2.0, n / 2 - 0.01), 1)) if n > 2 else None):
        if G is None:
            continue
        err = np.abs(G[mirror_index(n)] - Q.conj_involution(G, "i")).max()
        assert err <= 1e-9 * (1 + np.abs(G).max())


def test_time_origin_does_not_matter(rng):
    # starting the sum at t = 1 multiplies F by a unit phase on the right
    n = 40
    x = random_signal(rng, n)
    F = qft_forward(x)
    shifted = Q.multiply(F, Q.exp_pure(Q.J, -2 * np.pi * np.arange(n) / n))
    again = (Q.multiply(shifted, Q.conj(shifted)) + Q.multiply(Q.polarmod_j(shifted), Q.J)) / n
    np.testing.assert_allclose(again, polarization_periodogram(x), atol=1e-12)


def test_batch_matches_single(rng):
    x = random_signal(rng, 3 * 32).reshape(3, 32)
    G = polarization_periodogram(x)
    for m in range(3):
        np.testing.assert_array_equal(G[m], polarization_periodogram(x[m]))


# expected periodogram


def test_fejer_kernel_values():
    n = 16
    k = np.arange(n)
    np.testing.assert_allclose(fejer_kernel(k / n, n), np.where(k == 0, n, 0.0), atol=1e-12)
    assert fejer_kernel(0.0, n) == n
    fine = np.arange(8 * n) / (8 * n)
    assert fejer_kernel(fine, n).sum() / (8 * n) == pytest.approx(1.0, abs=1e-10)
    assert fejer_kernel(k / n, n).sum() / n == pytest.approx(1.0, abs=1e-10)


def test_expected_periodogram_constant_and_line():
    n = 32
    const = np.tile(white_noise_density(WhiteNoiseSpec(s0=3.0, phi=0.4, theta=0.2)), (n, 1))
    np.testing.assert_allclose(expected_periodogram(const, n), const, atol=1e-12)
    line = np.zeros((n, 4))
    line[5] = [n, 0.3 * n, 0.1, -0.2]
    np.testing.assert_allclose(expected_periodogram(line, n), line, atol=1e-10)


def test_expected_periodogram_oversampled_line_is_fejer_shaped():
    n, os_ = 16, 4
    m = n * os_
    dens = np.zeros((m, 4))
    dens[10, 0] = m
    out = expected_periodogram(dens, n, oversample=os_)
    np.testing.assert_allclose(out[:, 0], fejer_kernel((np.arange(m) - 10) / m, n), atol=1e-10)
    const = np.tile([2.0, 0.0, 0.5, 0.5], (m, 1))
    np.testing.assert_allclose(expected_periodogram(const, n, oversample=os_), const, atol=1e-12)


def test_expected_periodogram_matches_monte_carlo():
    # MA(1) noise x[t] = e[t] + b e[t-1] has density |1 + b e^{-2 pi i nu}|^2
    n, m, b = 32, 4000, 0.9
    rng = np.random.default_rng(5)
    e = (rng.standard_normal((m, n + 1)) + 1j * rng.standard_normal((m, n + 1))) / np.sqrt(2)
    x = e[:, 1:] + b * e[:, :-1]
    os_ = 16
    nu = np.arange(n * os_) / (n * os_)
    dens = np.zeros((n * os_, 4))
    # circular noise: S3 carries the rotary asymmetry, here zero because b is real and e is circular
    dens[:, 0] = np.abs(1 + b * np.exp(-2j * np.pi * nu)) ** 2
    expected = expected_periodogram(dens, n, oversample=os_)[::os_]
    G = polarization_periodogram(x)
    mean, se = G.mean(0)[:, 0], G.std(0, ddof=1)[:, 0] / np.sqrt(m)
    assert np.mean(np.abs(mean - expected[:, 0]) > 3 * se) < 0.1


def test_expected_periodogram_shape_check():
    with pytest.raises(ValueError):
        expected_periodogram(np.zeros((10, 4)), 4, oversample=2)


# tapers


@pytest.mark.parametrize("n, nw, k", [(64, 2, 3), (256, 4, 5), (1024, 4, 5)])
def test_slepian_orthonormal(n, nw, k):
    h = slepian_tapers(n, nw, k).tapers
    assert h.shape == (k, n)
    np.testing.assert_allclose(h @ h.T, np.eye(k), atol=1e-10)


@pytest.mark.parametrize("n, nw, k", [(64, 2, 3), (256, 4, 5), (65, 3.5, 6)])
def test_slepian_structure_and_signs(n, nw, k):
    h = slepian_tapers(n, nw, k).tapers
    assert np.all(h[0] > 0)
    np.testing.assert_allclose(h[0], h[0, ::-1], atol=1e-12)
    for i in range(k):
        # even tapers symmetric, odd tapers antisymmetric
        np.testing.assert_allclose(h[i], (-1) ** i * h[i, ::-1], atol=1e-10)
        if i % 2 == 0:
            assert h[i].sum() >= 0
        else:
            assert h[i, 1] - h[i, 0] >= 0


def test_slepian_against_dense_eigensolver():
    n, nw, k = 64, 3.0, 5
    ts = slepian_tapers(n, nw, k)
    A = dpss_concentration_matrix(n, nw)
    vals, vecs = np.linalg.eigh(A)
    vals, vecs = vals[::-1][:k], vecs[:, ::-1][:, :k].T
    np.testing.assert_allclose(ts.concentrations, vals, atol=1e-10)
    assert np.all(np.diff(ts.concentrations) < 0)
    for mine, ref in zip(ts.tapers, vecs):
        assert min(np.abs(mine - ref).max(), np.abs(mine + ref).max()) < 1e-8


def test_concentration_is_in_band_energy():
    n, nw = 128, 4.0
    ts = slepian_tapers(n, nw, 3)
    m = 64 * n
    nu = np.fft.fftfreq(m)
    band = np.abs(nu) <= nw / n
    for h, lam in zip(ts.tapers, ts.concentrations):
        P = np.abs(np.fft.fft(h, m)) ** 2
        assert P[band].sum() / P.sum() == pytest.approx(lam, abs=2e-3)


def test_slepian_against_scipy():
    n, nw, k = 256, 4.0, 5
    ref = dpss(n, nw, k)
    ours = slepian_tapers(n, nw, k).tapers
    for mine, r in zip(ours, ref):
        assert min(np.abs(mine - r).max(), np.abs(mine + r).max()) < 1e-8


@pytest.mark.parametrize("n, nw, k", [(8, 2, 9), (8, 2, 0), (8, 4, 2), (8, 0, 1)])
def test_slepian_argument_errors(n, nw, k):
    with pytest.raises(ValueError):
        slepian_tapers(n, nw, k)


# multitaper


def test_rectangular_single_taper_is_periodogram(rng):
    x = random_signal(rng, 100)
    h = rectangular_taper(100)
    np.testing.assert_allclose(h @ h.T, [[1.0]], atol=1e-15)
    np.testing.assert_allclose(multitaper_estimate(x, h), polarization_periodogram(x), rtol=1e-12, atol=1e-13)


def test_multitaper_is_mean_of_direct_estimates(rng):
    x = random_signal(rng, 64)
    ts = slepian_tapers(64, 3.0, 4)
    expected = sum(direct_estimate(x, h) for h in ts.tapers) / 4
    np.testing.assert_allclose(multitaper_estimate(x, ts), expected, atol=1e-13)


def test_multitaper_batch_is_bitwise_reproducible(rng):
    x = random_signal(rng, 2 * 64).reshape(2, 64)
    ts = slepian_tapers(64, 3.0, 4)
    both = multitaper_estimate(x, ts)
    np.testing.assert_array_equal(both[1], multitaper_estimate(x[1], ts))
    np.testing.assert_array_equal(both, multitaper_estimate(x, ts))


def test_taper_length_mismatch(rng):
    with pytest.raises(ValueError):
        multitaper_estimate(random_signal(rng, 10), slepian_tapers(12, 2, 2))
    with pytest.raises(ValueError):
        direct_estimate(random_signal(rng, 10), np.ones(9))


def test_multitaper_white_noise_unbiased_and_less_variable():
    n, m = 128, 200
    spec = WhiteNoiseSpec(s0=1.0, phi=0.3, theta=0.5, seed=17)
    w = gen_white_noise(spec, n, replicate=0, size=m)
    mt = multitaper_estimate(w, slepian_tapers(n, 4.0, 5))
    p = polarization_periodogram(w)
    bins = np.arange(10, 55)
    assert np.median(mt[:, bins, 0].var(0) / p[:, bins, 0].var(0)) < 0.5
    mean = mt[:, bins, 0].mean()
    assert abs(mean - 1.0) < 0.05


def test_spectral_density_estimate_wrapper(rng):
    x = random_signal(rng, 16)
    est = SpectralDensityEstimate(polarization_periodogram(x), "periodogram")
    assert est.n == 16
    np.testing.assert_array_equal(est.nu, np.arange(16) / 16)
    st_ = est.stokes()
    np.testing.assert_allclose(st_.S0, est.bins[:, 0])
