"""Sparse restoration of images under Gaussian, Poisson and speckle noise with
primal (product-space) and primal-dual proximal splitting."""
from .core import (
    ConfigError,
    DimensionError,
    DomainError,
    LinearMap,
    ProductPoint,
    UnsupportedConfigError,
    dot,
    power_iteration,
)
from .operators import ConvOperator, IdentityOperator, MaskOperator, gaussian_psf, random_mask
from .prox import (
    BoxConstraint,
    GaussianNoise,
    GenericPenalty,
    KernelProjectorL1,
    KernelProjectorL2,
    L1Penalty,
    MultiplicativeNoise,
    PoissonNoise,
    lambert_w0,
    project_box,
    prox_gaussian,
    prox_multiplicative,
    prox_penalty,
    prox_poisson,
)
from .simulation import NoiseSpec, degrade, mae, psnr
from .solvers import (
    PrimalConfig,
    PrimalDualConfig,
    Problem,
    SolveTrace,
    objective,
    solve_primal,
    solve_primal_dual,
)
from .transforms import Dictionary

__version__ = "0.1.0"
