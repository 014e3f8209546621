"""Command-line front end.

::

    proxsplit degrade  <config>
    proxsplit solve    <config>
    proxsplit compare  <config>
    proxsplit metrics  <restored> <reference> --peak <v>
    proxsplit run      <config>          # degrade, then compare
    proxsplit recipes                    # list bundled configs

``<config>`` is a TOML file or ``recipe:<name>`` for a bundled recipe.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import images
from .config import ExperimentConfig, load_config, recipe_names
from .core import ConfigError, DimensionError, DomainError
from .imageio import load_image, save_image
from .operators import ConvOperator, IdentityOperator, MaskOperator, gaussian_psf, random_mask
from .prox import BoxConstraint, GaussianNoise, L1Penalty, MultiplicativeNoise, PoissonNoise
from .simulation import NoiseSpec, degrade, mae, poisson_rescale, psnr
from .solvers import (
    PrimalConfig,
    PrimalDualConfig,
    Problem,
    solve_primal,
    solve_primal_dual,
    step_bound,
)
from .transforms import Dictionary

__all__ = ["main", "build_problem", "load_truth"]


class CLIError(Exception):
    pass


# -- experiment assembly ---------------------------------------------------------


def load_truth(cfg: ExperimentConfig) -> np.ndarray:
    if cfg.input.startswith("builtin:"):
        try:
            return images.builtin(cfg.input[len("builtin:"):], cfg.size)
        except KeyError as exc:
            raise CLIError(f"config field 'input': {exc.args[0]}") from None
    return load_image(_existing(cfg.input, "input"))


def _existing(path, what) -> Path:
    p = Path(path)
    if not p.is_file():
        raise CLIError(f"{what} file not found: {p}")
    return p


def _noise_spec(cfg: ExperimentConfig) -> NoiseSpec:
    n = cfg.noise
    return NoiseSpec(
        kind=n["kind"],
        sigma=float(n.get("sigma", 0.0)),
        peak=float(n.get("peak", 30.0)),
        looks=int(n.get("looks", 1)),
        seed=int(n.get("seed", 0)),
    )


def _operator(cfg: ExperimentConfig, shape, mask=None):
    op = cfg.operator
    if op["kind"] == "identity":
        return IdentityOperator(shape)
    if op["kind"] == "convolution":
        if "psf" in op:
            psf = load_image(_existing(op["psf"], "psf"))
            if psf.shape != tuple(shape):
                raise CLIError(f"psf shape {psf.shape} does not match image shape {tuple(shape)}")
        else:
            psf = gaussian_psf(shape, float(op["psf_width"]))
        return ConvOperator(psf)
    if mask is None:
        mask = load_image(_existing(op["mask"], "mask"))
    if mask.shape != tuple(shape):
        raise CLIError(f"mask shape {mask.shape} does not match image shape {tuple(shape)}")
    return MaskOperator(mask)


def build_problem(cfg: ExperimentConfig, y: np.ndarray, h=None) -> Problem:
    """Assemble the optimisation problem for observation `y`."""
    h = h if h is not None else _operator(cfg, y.shape)
    kind = cfg.noise["kind"]
    if kind == "gaussian":
        noise = GaussianNoise(y, float(cfg.noise["sigma"]) ** 2)
    elif kind == "poisson":
        noise = PoissonNoise(y)
    else:
        noise = MultiplicativeNoise(y, int(cfg.noise["looks"]))
    d = cfg.dictionary
    dictionary = Dictionary(d["kind"], y.shape, d.get("levels"))
    lo, hi = cfg.box_bounds
    return Problem(h, dictionary, noise, L1Penalty(cfg.gamma), BoxConstraint(lo, hi))


def _solver_configs(cfg: ExperimentConfig):
    s = cfg.solver
    stride = int(s.get("trace_stride", 1))
    primal = PrimalConfig(
        mu=float(s.get("mu", 10.0)),
        theta=float(s.get("theta", 1.5)),
        n_iter=cfg.n_iter,
        tol=cfg.tol,
        trace_stride=stride,
    )
    dual = PrimalDualConfig(
        tau=s.get("tau"),
        sigma=s.get("sigma"),
        n_iter=cfg.n_iter,
        tol=cfg.tol,
        trace_stride=stride,
    )
    return primal, dual


def _suffixed(path: Path, tag: str) -> Path:
    return path.with_name(f"{path.stem}_{tag}{path.suffix}")


# -- commands --------------------------------------------------------------------


def cmd_degrade(cfg: ExperimentConfig) -> int:
    x = load_truth(cfg)
    spec = _noise_spec(cfg)
    mask = None
    if cfg.operator["kind"] == "mask":
        frac = float(cfg.operator.get("missing_fraction", 0.34))
        mask = random_mask(x.shape, frac, int(cfg.operator.get("seed", 0)))
    h = _operator(cfg, x.shape, mask=mask)

    if spec.kind == "poisson":
        reference = x * poisson_rescale(x, h, spec.peak)
        y = degrade(x, h, spec)
    elif spec.kind == "multiplicative":
        floor = float(cfg.noise.get("floor", 1e-3 * spec.peak))
        reference = np.maximum(x * (spec.peak / x.max()), floor)
        y = degrade(reference, h, spec)
    else:
        reference = x
        y = degrade(x, h, spec)

    cfg.observation.parent.mkdir(parents=True, exist_ok=True)
    save_image(cfg.observation, y)
    if cfg.reference is not None:
        save_image(cfg.reference, reference)
    if mask is not None:
        save_image(cfg.operator["mask"], mask)

    params = {"gaussian": f"sigma={spec.sigma:g}", "poisson": f"peak={spec.peak:g}",
              "multiplicative": f"looks={spec.looks}"}[spec.kind]
    print(f"noise={spec.kind} {params} seed={spec.seed}")
    print(f"wrote {cfg.observation} ({y.shape[1]}x{y.shape[0]})")
    return 0


def _run_solvers(cfg: ExperimentConfig, algorithms):
    y = load_image(_existing(cfg.observation, "observation"))
    prob = build_problem(cfg, y)
    primal_cfg, dual_cfg = _solver_configs(cfg)
    if "primal-dual" in algorithms:
        # fail before iterating if the steps are inadmissible
        dual_cfg.resolve(step_bound(prob))
    results = {}
    for alg in algorithms:
        if alg == "primal":
            results[alg] = solve_primal(prob, primal_cfg)
        else:
            results[alg] = solve_primal_dual(prob, dual_cfg)
    return prob, results


def _restored(cfg, res) -> np.ndarray:
    if cfg.noise["kind"] == "multiplicative":
        return np.exp(res.x_star)
    return res.x_star


def _write_results(cfg, results):
    both = len(results) > 1
    reference = None
    if cfg.reference is not None and cfg.reference.is_file():
        reference = load_image(cfg.reference)
    images_out = {alg: _restored(cfg, res) for alg, res in results.items()}
    cfg.output.parent.mkdir(parents=True, exist_ok=True)
    for alg, res in results.items():
        out = _suffixed(cfg.output, alg) if both else cfg.output
        save_image(out, images_out[alg])
        if cfg.trace is not None:
            tr = _suffixed(cfg.trace, alg) if both else cfg.trace
            res.trace.to_csv(tr)
        line = f"{alg}: objective={res.trace.final_objective:.10g} iterations={res.trace.records[-1].iter}"
        if reference is not None:
            line += (f" mae={mae(images_out[alg], reference):.6g}"
                     f" psnr={_fmt_db(psnr(images_out[alg], reference, cfg.peak))}")
        print(line)
    return images_out


def _fmt_db(v: float) -> str:
    return "inf" if np.isinf(v) else f"{v:.6g}"


def cmd_solve(cfg: ExperimentConfig) -> int:
    algs = ["primal", "primal-dual"] if cfg.algorithm == "both" else [cfg.algorithm]
    _, results = _run_solvers(cfg, algs)
    _write_results(cfg, results)
    if len(results) == 2:
        j1 = results["primal"].trace.final_objective
        j2 = results["primal-dual"].trace.final_objective
        print(f"relative objective gap: {abs(j1 - j2) / max(abs(j2), 1e-300):.3e}")
    return 0


def cmd_compare(cfg: ExperimentConfig) -> int:
    _, results = _run_solvers(cfg, ["primal", "primal-dual"])
    _write_results(cfg, results)
    print(f"{'algorithm':<12} {'final objective':>20} {'iters to 1%':>12} {'seconds':>9}")
    for alg, res in results.items():
        tr = res.trace
        print(f"{alg:<12} {tr.final_objective:>20.10g} {tr.iterations_to_within(0.01):>12d} "
              f"{tr.records[-1].seconds:>9.2f}")
    j1 = results["primal"].trace.final_objective
    j2 = results["primal-dual"].trace.final_objective
    print(f"relative objective gap: {abs(j1 - j2) / max(abs(j2), 1e-300):.3e}")
    return 0


def cmd_metrics(restored, reference, peak: float) -> int:
    a = load_image(_existing(restored, "restored"))
    b = load_image(_existing(reference, "reference"))
    if a.shape != b.shape:
        raise CLIError(f"shape mismatch: {a.shape} vs {b.shape}")
    print(f"MAE {mae(a, b):.6g}")
    print(f"PSNR {_fmt_db(psnr(a, b, peak))}")
    return 0


def cmd_run(cfg: ExperimentConfig) -> int:
    cmd_degrade(cfg)
    return cmd_compare(cfg)


# -- entry point -----------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="proxsplit", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("degrade", "simulate an observation"),
        ("solve", "restore an observation with the configured algorithm(s)"),
        ("compare", "run both algorithms and tabulate convergence"),
        ("run", "degrade then compare"),
    ):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("config", help="TOML config path or recipe:<name>")
    sp = sub.add_parser("metrics", help="MAE and PSNR of a restored image")
    sp.add_argument("restored")
    sp.add_argument("reference")
    sp.add_argument("--peak", type=float, required=True)
    sub.add_parser("recipes", help="list bundled recipes")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "recipes":
            for name in recipe_names():
                print(name)
            return 0
        if args.command == "metrics":
            return cmd_metrics(args.restored, args.reference, args.peak)
        cfg = load_config(args.config)
        return {"degrade": cmd_degrade, "solve": cmd_solve, "compare": cmd_compare,
                "run": cmd_run}[args.command](cfg)
    except (CLIError, ConfigError, DimensionError, DomainError, FileNotFoundError, ValueError) as exc:
        msg = " ".join(str(exc).split())
        print(f"proxsplit: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
