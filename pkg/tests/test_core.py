import numpy as np
import pytest

from oracles import loop_dot
from proxsplit.core import (
    Composite,
    DimensionError,
    Identity,
    LinearMap,
    ProductPoint,
    dot,
    power_iteration,
)
from proxsplit.operators import ConvOperator, IdentityOperator, MaskOperator, gaussian_psf, random_mask
from proxsplit.transforms import Dictionary


class Diagonal(LinearMap):
    def __init__(self, d):
        self.d = np.asarray(d, dtype=float)
        self.in_shape = self.out_shape = self.d.shape

    def apply(self, x):
        return self.d * x

    def adjoint(self, y):
        return self.d * y


def test_dot_examples(rng):
    assert dot([1, 2], [3, 4]) == 11
    u = rng.standard_normal(64)
    assert dot(u, np.zeros(64)) == 0
    v = rng.standard_normal(64)
    assert dot(u, v) == pytest.approx(loop_dot(u, v), abs=1e-12)


def test_dot_length_mismatch():
    with pytest.raises(DimensionError):
        dot([1.0, 2.0], [1.0])


def test_power_iteration_diagonal():
    assert power_iteration(Diagonal([1.0, 2.0, 3.0]), iters=200, seed=1) == pytest.approx(3.0, abs=1e-8)


def test_power_iteration_identity():
    assert power_iteration(Identity((16,)), iters=50, seed=3) == pytest.approx(1.0, abs=1e-10)


def test_power_iteration_zero_operator():
    assert power_iteration(Diagonal(np.zeros(5))) == 0.0


def test_power_iteration_convolution_matches_fft_peak(rng):
    psf = rng.random((16, 16))
    op = ConvOperator(psf)
    expected = np.max(np.abs(np.fft.fft2(psf)))
    assert power_iteration(op, iters=2000, seed=0, rtol=1e-14) == pytest.approx(expected, abs=1e-6)


def test_power_iteration_nondecreasing():
    op = Diagonal(np.linspace(0.1, 5.0, 30))
    est = [power_iteration(op, iters=k, seed=4, rtol=0.0) for k in (1, 2, 5, 10, 40)]
    assert all(b >= a - 1e-12 for a, b in zip(est, est[1:]))


def _operators():
    rng = np.random.default_rng(5)
    shape = (16, 16)
    conv = ConvOperator(gaussian_psf(shape, 1.3))
    mask = MaskOperator(random_mask(shape, 0.3, 9))
    ortho = Dictionary("orthobasis-haar", shape, 3)
    undec = Dictionary("undecimated-haar", shape, 2)
    return {
        "identity": IdentityOperator(shape),
        "conv": conv,
        "conv-random-psf": ConvOperator(rng.standard_normal(shape)),
        "mask": mask,
        "orthobasis": ortho,
        "undecimated": undec,
        "H-Phi": Composite(conv, undec),
    }


@pytest.mark.parametrize("name,op", list(_operators().items()))
def test_adjoint_identity(name, op, rng):
    for _ in range(100):
        u = rng.standard_normal(op.in_shape)
        v = rng.standard_normal(op.out_shape)
        au = op.apply(u)
        lhs = dot(au, v)
        rhs = dot(u, op.adjoint(v))
        assert abs(lhs - rhs) <= 1e-10 * (np.linalg.norm(au) * np.linalg.norm(v) + 1)


@pytest.mark.parametrize("name,op", list(_operators().items()))
def test_linearity(name, op, rng):
    u = rng.standard_normal(op.in_shape)
    v = rng.standard_normal(op.in_shape)
    a, b = rng.standard_normal(2)
    lhs = op.apply(a * u + b * v)
    rhs = a * op.apply(u) + b * op.apply(v)
    scale = np.linalg.norm(op.apply(u)) + np.linalg.norm(op.apply(v)) + 1
    assert np.linalg.norm(lhs - rhs) <= 1e-10 * scale


def test_composite_shape_check():
    with pytest.raises(DimensionError):
        Composite(IdentityOperator((4, 4)), IdentityOperator((8, 8)))


def test_product_point_arithmetic(rng):
    p = ProductPoint(rng.standard_normal((2, 2)), rng.standard_normal((2, 2)), rng.standard_normal(4))
    q = p.copy()
    assert (p - q).norm() == 0
    r = 2.0 * p + p * -1.0
    assert np.allclose(r.x1, p.x1) and np.allclose(r.alpha, p.alpha)
    assert p.inner(p) == pytest.approx(p.norm() ** 2)
