import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from bivarspec import quaternion as Q
from bivarspec.qft import (
    check_i_hermitian,
    frequencies,
    mirror_index,
    positive_bins,
    qft_direct,
    qft_forward,
    qft_inverse,
    signal_to_quat,
    signed_frequencies,
)
from bivarspec.sigmodel import MonochromaticSpec, WhiteNoiseSpec, gen_tone_plus_noise

from conftest import expand_product, finite


def loop_qft(x):
    # plain double loop with the kernel on the right
    n = len(x)
    out = np.zeros((n, 4))
    for k in range(n):
        for t in range(n):
            a = -2 * np.pi * k * t / n
            out[k] += expand_product(x[t], np.array([np.cos(a), 0.0, np.sin(a), 0.0]))
    return out


def test_matches_loop_oracle(rng):
    x = rng.normal(size=(16, 4))
    np.testing.assert_allclose(qft_forward(x), loop_qft(x), atol=1e-12)


def test_kernel_is_on_the_right(rng):
    # a left kernel gives a different answer for non-commuting samples
    x = rng.normal(size=(8, 4))
    n = len(x)
    left = np.zeros((n, 4))
    for k in range(n):
        for t in range(n):
            a = -2 * np.pi * k * t / n
            left[k] += expand_product(np.array([np.cos(a), 0.0, np.sin(a), 0.0]), x[t])
    assert np.max(np.abs(qft_forward(x) - left)) > 1e-3


def test_constant_signal():
    X = qft_forward(np.ones(8))
    expected = np.zeros((8, 4))
    expected[0, 0] = 8
    np.testing.assert_allclose(X, expected, atol=1e-12)


def test_kernel_eigenfunction():
    t = np.arange(8)
    x = Q.exp_pure(Q.J, 2 * np.pi * t * 3 / 8)
    X = qft_forward(x)
    np.testing.assert_allclose(Q.norm(X), np.where(t == 3, 8.0, 0.0), atol=1e-12)
    np.testing.assert_allclose(X[3], [8, 0, 0, 0], atol=1e-12)


def test_direct_oracle_50_signals(rng):
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 129))
        x = rng.normal(size=(n, 4))
        worst = max(worst, np.max(np.abs(qft_forward(x) - qft_direct(x))))
    assert worst < 1e-9


def test_direct_oracle_random_n64(rng):
    x = rng.normal(size=(64, 4))
    assert np.max(np.abs(qft_forward(x) - qft_direct(x))) < 1e-9


def test_inverse_examples():
    X = np.zeros((8, 4))
    X[0, 0] = 8
    np.testing.assert_allclose(qft_inverse(X), np.tile(Q.ONE, (8, 1)), atol=1e-15)
    np.testing.assert_array_equal(qft_inverse(np.zeros((5, 4))), np.zeros((5, 4)))


def test_round_trip_tone_in_noise():
    tone = MonochromaticSpec(a=1.0, theta=-np.pi / 3, chi=np.pi / 8, nu0=0.125)
    y = gen_tone_plus_noise(tone, WhiteNoiseSpec(s0=10.0, phi=0.2, theta=np.pi / 8, seed=3), 1024)
    back = qft_inverse(qft_forward(y))
    assert np.max(np.abs(back - signal_to_quat(y))) < 1e-9


@given(arrays(np.float64, st.tuples(st.integers(1, 40), st.just(4)), elements=finite))
def test_round_trip_property(x):
    np.testing.assert_allclose(qft_inverse(qft_forward(x)), x, atol=1e-10 * (1 + np.abs(x).max()))


@given(arrays(np.float64, st.tuples(st.integers(1, 40), st.just(4)), elements=finite))
def test_parseval(x):
    X = qft_forward(x)
    lhs = Q.norm2(X).sum() / len(x)
    rhs = Q.norm2(x).sum()
    assert abs(lhs - rhs) <= 1e-9 * max(rhs, 1e-300) + 1e-12


def test_left_linearity(rng):
    x = rng.normal(size=(32, 4))
    lam = rng.normal(size=4)
    np.testing.assert_allclose(qft_forward(Q.multiply(lam, x)), Q.multiply(lam, qft_forward(x)), atol=1e-10)


def test_cj_signal_reduces_to_complex_dft(rng):
    a, c = rng.normal(size=(2, 33))
    X = qft_forward(Q.quat(a, 0.0, c, 0.0))
    F = np.fft.fft(a + 1j * c)
    np.testing.assert_allclose(X[:, 0], F.real, atol=1e-12)
    np.testing.assert_allclose(X[:, 2], F.imag, atol=1e-12)
    np.testing.assert_allclose(X[:, [1, 3]], 0, atol=0)


@given(arrays(np.complex128, st.integers(1, 64), elements=st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False)))
def test_i_hermitian_for_bivariate_signals(x):
    assert check_i_hermitian(qft_forward(x)) < 1e-10 * (1 + np.abs(x).sum())


def test_i_hermitian_zero_and_violation(rng):
    assert check_i_hermitian(np.zeros((8, 4))) == 0
    x = signal_to_quat(rng.normal(size=16) + 1j * rng.normal(size=16))
    x[:, 2] = rng.normal(size=16)
    assert check_i_hermitian(qft_forward(x)) > 1e-3


def test_frequency_helpers():
    np.testing.assert_array_equal(frequencies(4), [0, 0.25, 0.5, 0.75])
    np.testing.assert_array_equal(signed_frequencies(4), [0, 0.25, -0.5, -0.25])
    np.testing.assert_array_equal(positive_bins(5), [0, 1, 2])
    np.testing.assert_array_equal(mirror_index(4), [0, 3, 2, 1])


@pytest.mark.parametrize("bad", [np.array([]), np.zeros((0, 4)), np.array([1.0, np.nan])])
def test_rejects_empty_or_nan(bad):
    with pytest.raises(ValueError):
        qft_forward(bad)


def test_batched_signals(rng):
    x = rng.normal(size=(3, 16)) + 1j * rng.normal(size=(3, 16))
    X = qft_forward(x)
    for m in range(3):
        np.testing.assert_allclose(X[m], qft_forward(x[m]), atol=1e-12)
