"""Primal (product-space) and primal-dual proximal splitting solvers.

Both minimise

    J(α) = f1(H Φ α) + γ Ψ(α) + ι_C(Φ α)

over the coefficients α of a tight-frame dictionary Φ.
"""
from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .core import ConfigError, DimensionError, LinearMap, ProductPoint
from .prox import (
    BoxConstraint,
    KernelProjectorL1,
    KernelProjectorL2,
    L1Penalty,
    NoiseModel,
    PenaltySpec,
    project_box,
)
from .transforms import Dictionary

__all__ = [
    "Problem",
    "PrimalConfig",
    "PrimalDualConfig",
    "TraceRecord",
    "SolveTrace",
    "SolveResult",
    "objective",
    "solve_primal",
    "solve_primal_dual",
    "step_bound",
    "l1_kkt_residual",
]

TRACE_HEADER = ("iter", "seconds", "objective", "fidelity", "penalty", "violation", "rel_change")


@dataclass
class Problem:
    """``min_α f1(HΦα) + γΨ(α) + ι_C(Φα)``."""

    h: LinearMap
    dictionary: Dictionary
    noise: NoiseModel
    penalty: PenaltySpec = field(default_factory=L1Penalty)
    box: BoxConstraint = field(default_factory=BoxConstraint)

    def __post_init__(self):
        if tuple(self.h.in_shape) != tuple(self.dictionary.out_shape):
            raise DimensionError(
                f"operator domain {self.h.in_shape} does not match dictionary "
                f"image shape {self.dictionary.out_shape}"
            )
        if tuple(self.h.out_shape) != tuple(self.noise.y.shape):
            raise DimensionError(
                f"operator range {self.h.out_shape} does not match observation "
                f"shape {self.noise.y.shape}"
            )

    @property
    def n_coefs(self) -> int:
        return self.dictionary.n_coefs


@dataclass
class PrimalConfig:
    mu: float = 10.0
    theta: float = 1.5
    n_iter: int = 500
    tol: float = 0.0
    trace_stride: int = 1

    def __post_init__(self):
        if not self.mu > 0:
            raise ConfigError("mu must be positive")
        if not 0 < self.theta < 2:
            raise ConfigError("theta must lie in (0, 2)")
        _check_common(self)


@dataclass
class PrimalDualConfig:
    """Step sizes for the primal-dual scheme.

    Leave `tau` and/or `sigma` as ``None`` to derive them from the problem:
    both unset gives ``tau = sigma = 0.99 / sqrt(zeta)``; one set gives the
    other as ``0.99 / (zeta * given)``.
    """

    tau: float | None = None
    sigma: float | None = None
    n_iter: int = 500
    tol: float = 0.0
    trace_stride: int = 1

    def __post_init__(self):
        for name in ("tau", "sigma"):
            val = getattr(self, name)
            if val is not None and not val > 0:
                raise ConfigError(f"{name} must be positive")
        _check_common(self)

    def resolve(self, zeta: float) -> tuple[float, float]:
        tau, sigma = self.tau, self.sigma
        if tau is None and sigma is None:
            tau = sigma = 0.99 / np.sqrt(zeta)
        elif tau is None:
            tau = 0.99 / (zeta * sigma)
        elif sigma is None:
            sigma = 0.99 / (zeta * tau)
        if not sigma * tau * zeta < 1:
            raise ConfigError(
                f"step sizes violate sigma*tau*zeta < 1 "
                f"(sigma={sigma:g}, tau={tau:g}, zeta={zeta:g})"
            )
        return float(tau), float(sigma)


def _check_common(cfg):
    if int(cfg.n_iter) != cfg.n_iter or cfg.n_iter < 1:
        raise ConfigError("n_iter must be a positive integer")
    if cfg.tol < 0:
        raise ConfigError("tol must be nonnegative")
    if int(cfg.trace_stride) != cfg.trace_stride or cfg.trace_stride < 1:
        raise ConfigError("trace_stride must be a positive integer")


def step_bound(prob: Problem) -> float:
    """``zeta = ||Φ||² (1 + ||H||²)``, bounding ``||[HΦ; Φ]||²``."""
    return prob.dictionary.frame_constant * (1.0 + prob.h.norm() ** 2)


# -- traces ----------------------------------------------------------------------


class TraceRecord(NamedTuple):
    iter: int
    seconds: float
    objective: float
    fidelity: float
    penalty: float
    violation: float
    rel_change: float


@dataclass
class SolveTrace:
    records: list = field(default_factory=list)
    stop_reason: str = ""

    def __len__(self):
        return len(self.records)

    def append(self, rec: TraceRecord):
        if self.records and rec.iter <= self.records[-1].iter:
            raise ValueError("trace iterations must increase")
        self.records.append(rec)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records], dtype=np.float64)

    @property
    def final_objective(self) -> float:
        return self.records[-1].objective

    def iterations_to_within(self, rel: float = 0.01) -> int:
        """First recorded iteration from which the objective stays within
        ``rel * |final|`` of the final objective."""
        obj = self.column("objective")
        final = obj[-1]
        ok = np.abs(obj - final) <= rel * abs(final)
        bad = np.flatnonzero(~ok)
        idx = 0 if bad.size == 0 else bad[-1] + 1
        return int(self.records[idx].iter)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(TRACE_HEADER)
            for r in self.records:
                writer.writerow([str(r.iter)] + [_fmt(v) for v in r[1:]])

    @classmethod
    def from_csv(cls, path) -> "SolveTrace":
        trace = cls()
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = tuple(next(reader))
            if header != TRACE_HEADER:
                raise ValueError(f"unexpected trace header {header}")
            for row in reader:
                trace.append(TraceRecord(int(row[0]), *(float(v) for v in row[1:])))
        return trace


def _fmt(v: float) -> str:
    if np.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.17g}"


class SolveResult(NamedTuple):
    alpha: np.ndarray
    x_star: np.ndarray
    trace: SolveTrace


# -- objective -------------------------------------------------------------------


def objective(prob: Problem, alpha, x=None) -> tuple[float, float, float, float]:
    """Return ``(objective, fidelity, penalty, violation)`` at `alpha`.

    The constraint enters only through ``violation = ||Φα - P_C(Φα)||``;
    ``objective = fidelity + penalty`` and is ``inf`` whenever the fidelity is.
    `x` may carry a precomputed ``Φα``.
    """
    alpha = np.asarray(alpha, dtype=np.float64)
    if alpha.shape != (prob.n_coefs,):
        raise DimensionError(f"expected {prob.n_coefs} coefficients, got {alpha.shape}")
    if x is None:
        x = prob.dictionary.apply(alpha)
    fid = prob.noise.value(prob.h.apply(x))
    pen = prob.penalty.value(alpha)
    viol = prob.box.distance(x) if prob.box.is_active else 0.0
    return fid + pen, fid, pen, viol


# -- product-space splitting -----------------------------------------------------


def solve_primal(prob: Problem, cfg: PrimalConfig | None = None) -> SolveResult:
    """Parallel proximal splitting on ``(x1, x2, α)``.

    The three functions are ``G(x1, x2, α) = ι_C(x1) + f1(x2) + γΨ(α)``
    and the indicators of ``{x1 = Φα}`` and ``{x2 = H x1}``. Each iteration
    evaluates their proxes in parallel (G at scale μ/3), averages them and
    applies the relaxed reflection update with parameter θ.
    """
    cfg = cfg or PrimalConfig()
    dic, h = prob.dictionary, prob.h
    proj1 = KernelProjectorL1(dic)
    proj2 = KernelProjectorL2(h)
    mu, theta = cfg.mu, cfg.theta

    z = ProductPoint.zeros(dic.out_shape, h.out_shape, dic.n_coefs)
    p = [z.copy(), z.copy(), z.copy()]
    trace = SolveTrace()
    t0 = time.perf_counter()
    stop = "n_iter"

    for it in range(1, cfg.n_iter + 1):
        xi1 = ProductPoint(
            project_box(p[0].x1, prob.box),
            prob.noise.prox(p[0].x2, mu / 3.0),
            prob.penalty.prox(p[0].alpha, mu / 3.0),
        )
        xi = [xi1, proj1(p[1]), proj2(p[2])]
        avg = (xi[0] + xi[1] + xi[2]) * (1.0 / 3.0)
        for i in range(3):
            p[i] = p[i] + theta * (2.0 * avg - z - xi[i])
        z_new = z + theta * (avg - z)
        rel = (z_new - z).norm() / max(z.norm(), 1e-300)
        z = z_new

        last = it == cfg.n_iter or rel < cfg.tol
        if it % cfg.trace_stride == 0 or last:
            x_alpha = dic.apply(z.alpha)
            obj, fid, pen, viol = objective(prob, z.alpha, x_alpha)
            viol += float(np.linalg.norm(z.x1 - x_alpha))
            viol += float(np.linalg.norm(z.x2 - h.apply(z.x1)))
            trace.append(
                TraceRecord(it, time.perf_counter() - t0, obj, fid, pen, viol, rel)
            )
        if rel < cfg.tol:
            stop = "tol"
            break

    trace.stop_reason = stop
    return SolveResult(z.alpha.copy(), z.x1.copy(), trace)


# -- primal-dual -------------------------------------------------------------------


def solve_primal_dual(prob: Problem, cfg: PrimalDualConfig | None = None) -> SolveResult:
    """First-order primal-dual scheme on ``F(K α) + γΨ(α)`` with ``K = [HΦ; Φ]``.

    Dual variables ``ξ`` (fidelity branch) and ``η`` (constraint branch) take
    ascent steps through the conjugate proxes, computed with the Moreau
    identity; the primal step is the penalty prox followed by extrapolation
    ``ᾱ = 2α_new - α``.

    Raises
    ------
    ConfigError
        If ``sigma * tau * zeta >= 1``.
    """
    cfg = cfg or PrimalDualConfig()
    dic, h, box = prob.dictionary, prob.h, prob.box
    tau, sigma = cfg.resolve(step_bound(prob))

    alpha = np.zeros(dic.n_coefs)
    x = np.zeros(dic.out_shape)          # Φα
    x_bar = np.zeros(dic.out_shape)      # Φᾱ
    xi = np.zeros(h.out_shape)
    eta = np.zeros(dic.out_shape)
    trace = SolveTrace()
    t0 = time.perf_counter()
    stop = "n_iter"

    for it in range(1, cfg.n_iter + 1):
        xi = prob.noise.prox_conjugate(xi + sigma * h.apply(x_bar), sigma)
        back = h.adjoint(xi)
        if box.is_active:
            u = eta + sigma * x_bar
            eta = u - sigma * project_box(u / sigma, box)
            back = back + eta
        alpha_new = prob.penalty.prox(alpha - tau * dic.adjoint(back), tau)
        x_new = dic.apply(alpha_new)
        x_bar = 2.0 * x_new - x

        rel = float(np.linalg.norm(alpha_new - alpha)) / max(float(np.linalg.norm(alpha)), 1e-300)
        alpha, x = alpha_new, x_new

        last = it == cfg.n_iter or rel < cfg.tol
        if it % cfg.trace_stride == 0 or last:
            obj, fid, pen, viol = objective(prob, alpha, x)
            trace.append(
                TraceRecord(it, time.perf_counter() - t0, obj, fid, pen, viol, rel)
            )
        if rel < cfg.tol:
            stop = "tol"
            break

    trace.stop_reason = stop
    return SolveResult(alpha.copy(), x.copy(), trace)


# -- optimality certificate ------------------------------------------------------


def l1_kkt_residual(prob: Problem, alpha, zero_tol: float = 0.0) -> float:
    """Worst violation of the ℓ1 subgradient conditions, relative to γ.

    Valid for Gaussian noise, an ℓ1 penalty and an inactive constraint.
    With ``g = ΦᵀHᵀ(HΦα - y) / σ²``: on the support ``|g + γ sign α|``
    must vanish, off it ``|g| <= γ``. Coefficients with
    ``|α| <= zero_tol * max|α|`` count as zero. Returns the largest
    violation divided by γ.
    """
    noise = prob.noise
    if getattr(noise, "kind", None) != "gaussian":
        raise ConfigError("KKT certificate needs gaussian noise")
    if not isinstance(prob.penalty, L1Penalty):
        raise ConfigError("KKT certificate needs an l1 penalty")
    gamma = prob.penalty.gamma
    alpha = np.asarray(alpha, dtype=np.float64)
    resid_img = prob.h.apply(prob.dictionary.apply(alpha)) - noise.y
    g = prob.dictionary.adjoint(prob.h.adjoint(resid_img)) / noise.sigma2
    amax = float(np.max(np.abs(alpha), initial=0.0))
    support = np.abs(alpha) > zero_tol * amax
    on = np.abs(g[support] + gamma * np.sign(alpha[support]))
    off = np.maximum(np.abs(g[~support]) - gamma, 0.0)
    worst = max(float(np.max(on, initial=0.0)), float(np.max(off, initial=0.0)))
    return worst / gamma
