import math

import numpy as np
import pytest

from oracles import loop_mae, loop_psnr
from proxsplit.core import DimensionError, DomainError, UnsupportedConfigError
from proxsplit.operators import ConvOperator, IdentityOperator, gaussian_psf
from proxsplit.simulation import NoiseSpec, degrade, mae, poisson_rescale, psnr

SHAPE = (100, 100)  # 10^4 draws


def test_gaussian_zero_sigma_is_exact(rng):
    x = rng.random((16, 16))
    h = ConvOperator(gaussian_psf((16, 16), 1.0))
    assert np.array_equal(degrade(x, h, NoiseSpec("gaussian", sigma=0.0)), h.apply(x))


def test_gaussian_moments():
    y = degrade(np.zeros(SHAPE), IdentityOperator(SHAPE), NoiseSpec("gaussian", sigma=2.0, seed=9))
    n = y.size
    assert abs(y.mean()) <= 3 * 2.0 / math.sqrt(n)
    # var of the sample variance for a normal is 2 sigma^4 / (n - 1)
    assert abs(y.var(ddof=1) - 4.0) <= 3 * math.sqrt(2 * 16.0 / (n - 1))


def test_poisson_moments():
    x = np.full(SHAPE, 4.0)
    y = degrade(x, IdentityOperator(SHAPE), NoiseSpec("poisson", peak=4.0, seed=11))
    n = y.size
    assert np.all(y == np.round(y)) and np.all(y >= 0)
    assert abs(y.mean() - 4.0) <= 3 * math.sqrt(4.0 / n)
    # var of the sample variance for Poisson(l): (l + 2 l^2 (n/(n-1))) / n, approximately
    lam = 4.0
    sd_var = math.sqrt((lam + 2 * lam**2) / n)
    assert abs(y.var(ddof=1) - lam) <= 3 * sd_var


def test_poisson_small_and_large_means():
    for lam, seed in ((0.3, 1), (150.0, 2)):
        y = degrade(np.full(SHAPE, lam), IdentityOperator(SHAPE), NoiseSpec("poisson", peak=lam, seed=seed))
        assert abs(y.mean() - lam) <= 3 * math.sqrt(lam / y.size)


def test_gamma_moments():
    m = 10
    y = degrade(np.ones(SHAPE), IdentityOperator(SHAPE), NoiseSpec("multiplicative", looks=m, seed=13))
    n = y.size
    assert abs(y.mean() - 1.0) <= 3 * math.sqrt(0.1 / n)
    assert abs(y.var(ddof=1) - 0.1) <= 0.1 * 0.1
    # Gamma(M, 1/M) fourth central moment: 3/M^2 + 6/M^3
    mu4 = 3 / m**2 + 6 / m**3
    assert abs(y.var(ddof=1) - 0.1) <= 3 * math.sqrt((mu4 - 0.01) / n)


def test_poisson_rescale_sets_peak(rng):
    x = rng.random((32, 32))
    h = ConvOperator(gaussian_psf((32, 32), 1.5))
    s = poisson_rescale(x, h, 30.0)
    assert np.max(h.apply(x * s)) == pytest.approx(30.0)


def test_poisson_mean_matches_rescaled_blur():
    from proxsplit import images

    x = images.sky((64, 64))
    h = ConvOperator(gaussian_psf((64, 64), 1.0))
    y = degrade(x, h, NoiseSpec("poisson", peak=30.0, seed=1))
    lam = h.apply(x * poisson_rescale(x, h, 30.0))
    assert abs(y.mean() - lam.mean()) <= 3 * math.sqrt(lam.sum()) / lam.size


def test_determinism(rng):
    x = rng.random((16, 16)) + 0.1
    for spec in (NoiseSpec("gaussian", sigma=1.0, seed=3), NoiseSpec("poisson", seed=3),
                 NoiseSpec("multiplicative", looks=4, seed=3)):
        a = degrade(x, IdentityOperator(x.shape), spec)
        b = degrade(x, IdentityOperator(x.shape), spec)
        assert a.tobytes() == b.tobytes()
    c = degrade(x, IdentityOperator(x.shape), NoiseSpec("gaussian", sigma=1.0, seed=4))
    assert not np.array_equal(a, c)


def test_errors():
    h = ConvOperator(gaussian_psf((8, 8), 1.0))
    with pytest.raises(UnsupportedConfigError):
        degrade(np.ones((8, 8)), h, NoiseSpec("multiplicative", looks=2))
    with pytest.raises(DomainError):
        degrade(-np.ones((8, 8)), IdentityOperator((8, 8)), NoiseSpec("poisson"))
    with pytest.raises(DomainError):
        degrade(np.zeros((8, 8)), IdentityOperator((8, 8)), NoiseSpec("multiplicative", looks=2))
    with pytest.raises(ValueError):
        NoiseSpec("gaussian", sigma=-1.0)
    with pytest.raises(ValueError):
        NoiseSpec("speckle")


def test_mae_psnr_against_loops(rng):
    a = rng.random((16, 16)) * 255
    b = rng.random((16, 16)) * 255
    assert mae(a, b) == pytest.approx(loop_mae(a, b), rel=1e-12)
    assert psnr(a, b, 255.0) == pytest.approx(loop_psnr(a, b, 255.0), rel=1e-12)


def test_metric_examples(rng):
    a = rng.random((8, 8))
    assert mae(a, a) == 0.0
    assert psnr(a, a, 1.0) == math.inf
    assert mae(a + 2.0, a) == pytest.approx(2.0)
    assert psnr(a + 1.0, a, 1.0) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(DimensionError):
        mae(a, np.zeros((4, 4)))
