import numpy as np
import pytest
from scipy import stats
from scipy.special import gamma as gamma_fn, ndtr

from combwalk import (
    brownian_path,
    default_jump_cut,
    empirical_char_fn,
    ks_distance,
    levy_symbol,
    sample_positive_stable,
    sample_stable,
    stable_cdf_interp,
    stable_path,
    stable_sigma,
    subordinator_level,
    subordinator_path,
)


# ---------------------------------------------------------------------------
# the limit symbol


def test_levy_symbol_gaussian_and_cauchy_points():
    u = np.array([-2.0, -0.5, 0.0, 0.5, 2.0])
    # default scale at alpha = 2 gives exactly -u^2/2 (unit variance)
    assert np.allclose(levy_symbol(2.0, 0.0, u), -0.5 * u ** 2)
    # alpha = 1, beta = 0: symmetric Cauchy of scale pi/2
    assert np.allclose(levy_symbol(1.0, 0.0, u), -(np.pi / 2) * np.abs(u))
    sym = levy_symbol(1.0, 0.7, u)
    assert np.allclose(sym[:2], np.conj(sym[:2][::-1] * 0 + sym[-2:][::-1]))
    assert sym[2] == 0.0


def test_levy_symbol_tan_form_and_custom_scale():
    u = np.array([0.3, 1.7])
    a, b = 1.4, -0.6
    expect = -(2.0 ** a) * u ** a * (1 - 1j * b * np.tan(np.pi * a / 2))
    assert np.allclose(levy_symbol(a, b, u, scale=2.0), expect)
    assert np.allclose(levy_symbol(a, b, -u, scale=2.0), np.conj(expect))


def test_char_fn_of_samples_matches_symbol():
    u = np.array([-2.0, -1.0, -0.5, -0.25, 0.25, 0.5, 1.0, 2.0])
    for alpha in (0.5, 1.0, 1.5, 2.0):
        beta = 0.0 if alpha == 2.0 else 0.5
        x = sample_stable(alpha, beta, 100000, np.random.default_rng(8))
        phi, se = empirical_char_fn(x, u)
        dev = np.abs(phi - np.exp(levy_symbol(alpha, beta, u))) / se
        assert dev.max() < 3.0, f"alpha={alpha}: {dev.max():.2f} SEs"


# ---------------------------------------------------------------------------
# samplers against scipy


@pytest.mark.parametrize("alpha,beta,bound", [
    (1.0, 0.5, 0.006),
    (1.5, 0.5, 0.006),
    (1.2, -0.3, 0.006),
])
def test_sampler_matches_scipy_reference(alpha, beta, bound):
    sig = stable_sigma(alpha)
    x = sample_stable(alpha, beta, 100000, np.random.default_rng(4), scale=sig)
    ks = ks_distance(x, stable_cdf_interp(alpha, beta, sig))
    assert ks < bound


def test_alpha_two_is_gaussian():
    x = sample_stable(2.0, 0.0, 200000, np.random.default_rng(6), scale=np.sqrt(0.5))
    assert abs(x.mean()) < 0.01
    assert x.var() == pytest.approx(1.0, abs=0.01)
    assert ks_distance(x, ndtr) < 0.004


def test_cauchy_closed_form():
    x = sample_stable(1.0, 0.0, 200000, np.random.default_rng(7), scale=np.pi / 2)

    def cdf(v):
        return 0.5 + np.arctan(v / (np.pi / 2)) / np.pi

    assert ks_distance(x, cdf) < 0.004


def test_sampler_validation():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        sample_stable(0.0, 0.0, 10, rng)
    with pytest.raises(ValueError):
        sample_stable(2.2, 0.0, 10, rng)
    with pytest.raises(ValueError):
        sample_stable(1.5, 1.2, 10, rng)


# ---------------------------------------------------------------------------
# one-sided stable and the subordinator


def test_positive_stable_laplace_transform():
    z = sample_positive_stable(0.6, 50000, np.random.default_rng(12))
    assert z.min() > 0
    for lam in (0.5, 1.0, 2.0, 4.0):
        vals = np.exp(-lam * z)
        se = vals.std() / np.sqrt(len(z))
        assert abs(vals.mean() - np.exp(-lam ** 0.6)) < 5 * se


def test_positive_stable_validation():
    rng = np.random.default_rng(0)
    for bad in (0.0, 1.0, 1.5):
        with pytest.raises(ValueError):
            sample_positive_stable(bad, 10, rng)


def test_subordinator_path_structure():
    rng = np.random.default_rng(15)
    s, J, drift = subordinator_path(0.5, 4.0, rng, eps=1e-4)
    assert np.all(np.diff(s) >= 0)
    assert s.min() >= 0 and s.max() <= 4.0
    assert np.all(J >= 1e-4)
    assert drift == pytest.approx(0.5 * 1e-4 ** 0.5 / 0.5)
    lam = 4.0 * 1e-4 ** -0.5
    assert abs(len(s) - lam) < 5 * np.sqrt(lam)


def test_subordinator_jump_sizes_are_pareto():
    rng = np.random.default_rng(16)
    _, J, _ = subordinator_path(0.7, 3.0, rng, eps=0.01)
    # P(J > x) = (x/eps)^-alpha above the cut
    for x in (0.02, 0.1, 1.0):
        p = (x / 0.01) ** -0.7
        emp = np.mean(J > x)
        assert abs(emp - p) < 5 * np.sqrt(p * (1 - p) / len(J))


def test_subordinator_level_law():
    # T(1) is Gamma(1-a)^(1/a) times a standard positive stable variable
    draws = np.array([subordinator_level(0.5, 1.0, np.random.default_rng(100000 + i))
                      for i in range(20000)])
    ref = gamma_fn(0.5) ** 2 * sample_positive_stable(0.5, 20000,
                                                      np.random.default_rng(13))
    assert ks_distance(draws, ref) < 0.02


def test_subordinator_validation_and_cap():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        subordinator_path(1.2, 1.0, rng)
    with pytest.raises(ValueError):
        subordinator_path(0.5, 1.0, rng, eps=1e-18)
    assert default_jump_cut(0.5, 4.0) == pytest.approx(1e-6 * 16.0)


# ---------------------------------------------------------------------------
# paths


def test_brownian_path_increments():
    times = np.array([0.5, 1.0, 3.0])
    paths = np.array([brownian_path(times, np.random.default_rng(3000 + i))
                      for i in range(4000)])
    inc = np.diff(np.concatenate([np.zeros((4000, 1)), paths], axis=1), axis=1)
    dt = np.array([0.5, 0.5, 2.0])
    assert np.allclose(inc.mean(axis=0), 0.0, atol=5 * np.sqrt(dt / 4000))
    assert np.allclose(inc.var(axis=0), dt, rtol=0.12)
    with pytest.raises(ValueError):
        brownian_path([1.0, 0.5], np.random.default_rng(0))


def test_stable_path_composes_increments():
    times = np.array([0.5, 1.0, 2.5])
    path = stable_path(1.5, 0.3, times, np.random.default_rng(9))
    inc = sample_stable(1.5, 0.3, 3, np.random.default_rng(9), scale=1.0)
    dt = np.array([0.5, 0.5, 1.5])
    manual = np.cumsum(inc * stable_sigma(1.5) * dt ** (1 / 1.5))
    assert np.allclose(path, manual)
    with pytest.raises(ValueError):
        stable_path(1.5, 0.3, [1.0, 0.5], np.random.default_rng(0))


def test_stable_path_alpha_one_marginal():
    # skewed alpha = 1: increments need the log-location correction or the
    # two-piece path marginal misses the one-shot law
    xs = np.array([stable_path(1.0, 0.7, [0.3, 1.0],
                               np.random.default_rng(200000 + i))[-1]
                   for i in range(20000)])
    cdf = stable_cdf_interp(1.0, 0.7, np.pi / 2)
    assert ks_distance(xs, cdf) < 0.012


# ---------------------------------------------------------------------------
# the gridded reference CDF


def test_cdf_interp_grid_quality():
    cdf = stable_cdf_interp(1.0, 0.5, np.pi / 2)
    assert np.all(np.diff(cdf.values) >= 0)
    assert cdf.values[0] < 1e-3 and cdf.values[-1] > 1 - 1e-3
    assert float(cdf(-1e9)) == 0.0 and float(cdf(1e9)) == 1.0
    # tangent warping must keep tail mass beyond the grid negligible
    assert cdf.grid[-1] > 1e3
    dist = stats.levy_stable(1.0, 0.5, loc=0.0, scale=np.pi / 2)
    for x in (-30.0, -2.0, 0.0, 3.0, 55.0):
        assert float(cdf(x)) == pytest.approx(dist.cdf(x), abs=5e-4)
