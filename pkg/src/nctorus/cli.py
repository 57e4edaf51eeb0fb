"""Batch command line front end: validate | ym | make-projection | optimize.

One JSON config per run, reports as JSON on stdout and optionally under an
output directory.  Identical config and seed produce byte-identical reports.

Exit codes: 0 success, 1 numerical failure (residuals or convergence),
2 config error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .connections import (
    Connection,
    check_compatibility,
    curvature,
    free_module,
    module_new,
    phi_map,
    ym_dynamical,
)
from .descent import DescentParams, minimize_ym, ym_gradient, gradient_norm
from .forms import CrossCheckError, dixmier_constant, ym_spectral_report
from .matrices import TorusMatrix, idempotent_to_projection, is_projection, mat_l1_norm
from .sampling import random_skew_potentials
from .torus import (
    ConvergenceFailure,
    DeformationMatrix,
    TorusAlgebra,
    TruncationPolicy,
)

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_CONFIG = 2


class ConfigError(ValueError):
    """Malformed or schema-violating job configuration."""


class NumericalFailure(RuntimeError):
    """A residual or convergence contract failed at run time."""


def _require(cond: bool, message: str):
    if not cond:
        raise ConfigError(message)


class JobConfig:
    """Parsed job description; see README for the schema."""

    def __init__(self, raw: dict):
        _require(isinstance(raw, dict), "config must be a JSON object")
        _require("n" in raw, "config needs the dimension field 'n'")
        _require("theta" in raw, "config needs the deformation matrix 'theta'")
        self.raw = raw
        n = raw["n"]
        _require(isinstance(n, int) and n >= 2, "'n' must be an integer >= 2")
        self.n = n

        trunc = raw.get("truncation", {})
        _require(isinstance(trunc, dict), "'truncation' must be an object")
        try:
            self.policy = TruncationPolicy(
                r_max=int(trunc.get("r_max", 4)),
                mode=str(trunc.get("mode", "lossy")),
                eps_drop=float(trunc.get("eps_drop", 1e-300)),
            )
        except ValueError as exc:
            raise ConfigError(f"bad truncation policy: {exc}") from exc

        theta = raw["theta"]
        _require(
            isinstance(theta, list) and len(theta) == n,
            f"'theta' must be a row-major {n} x {n} array",
        )
        try:
            self.theta = DeformationMatrix(theta, tol=1e-12)
        except Exception as exc:
            raise ConfigError(f"bad deformation matrix: {exc}") from exc
        self.algebra = TorusAlgebra(self.theta, self.policy)

        tols = raw.get("tolerances", {})
        _require(isinstance(tols, dict), "'tolerances' must be an object")
        self.tol_projection = float(tols.get("projection", 1e-8))
        self.tol_newton = float(tols.get("newton", 1e-10))
        self.tol_theorem = float(tols.get("theorem", 1e-9))

    def module(self):
        spec = self.raw.get("module")
        _require(spec is not None, "config needs a 'module' section for this command")
        _require(isinstance(spec, dict) and "q" in spec, "'module' needs field 'q'")
        q = spec["q"]
        _require(isinstance(q, int) and q >= 1, "'module.q' must be a positive integer")
        p_spec = spec.get("p", "free")
        if p_spec == "free":
            return free_module(self.algebra, q)
        try:
            p = TorusMatrix.from_obj(self.algebra, p_spec)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad projection matrix: {exc}") from exc
        _require(p.q == q, f"projection size {p.q} != module.q = {q}")
        try:
            return module_new(p, self.tol_projection)
        except ValueError as exc:
            raise NumericalFailure(str(exc)) from exc

    def connection(self, module=None):
        spec = self.raw.get("connection")
        _require(spec is not None, "config needs a 'connection' section for this command")
        _require(
            isinstance(spec, dict) and "convention" in spec and "potentials" in spec,
            "'connection' needs 'convention' and 'potentials'",
        )
        if module is None:
            module = self.module()
        pots = spec["potentials"]
        _require(
            isinstance(pots, list) and len(pots) == self.n,
            f"'connection.potentials' must list {self.n} matrices",
        )
        try:
            mats = tuple(TorusMatrix.from_obj(self.algebra, p) for p in pots)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad potential matrix: {exc}") from exc
        try:
            return Connection(module, spec["convention"], mats)
        except ValueError as exc:
            raise NumericalFailure(str(exc)) from exc

    def idempotent(self):
        spec = self.raw.get("idempotent")
        _require(spec is not None, "config needs an 'idempotent' matrix for this command")
        try:
            return TorusMatrix.from_obj(self.algebra, spec)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad idempotent matrix: {exc}") from exc


def theta_rationality_warning(theta: DeformationMatrix, max_den: int = 64) -> str | None:
    """Report-only check: a (near-)rational deformation matrix may not have a
    unique invariant trace, so tau(a) = a_0 is a convention there."""
    for k in range(theta.n):
        for m in range(k):
            x = theta.rows[k][m]
            if abs(x - Fraction(x).limit_denominator(max_den)) >= 1e-9:
                return None
    return (
        "all deformation angles are within 1e-9 of rationals with denominator "
        f"<= {max_den}; trace uniqueness is not guaranteed and tau(a) = a_0 is "
        "used by convention"
    )


def _base_report(cfg: JobConfig, command: str) -> dict:
    return {
        "tool": {"name": "nctorus", "version": __version__},
        "command": command,
        "n": cfg.n,
        "theta": cfg.theta.to_obj(),
        "truncation": {
            "r_max": cfg.policy.r_max,
            "mode": cfg.policy.mode,
            "eps_drop": cfg.policy.eps_drop,
        },
        "theta_warning": theta_rationality_warning(cfg.theta),
    }


def cmd_validate(cfg: JobConfig, tol: float | None) -> tuple[dict, int]:
    threshold = tol if tol is not None else cfg.tol_projection
    report = _base_report(cfg, "validate")
    checks = {}
    ok = True
    loss = 0.0

    module = None
    if "module" in cfg.raw:
        try:
            module = cfg.module()
            loss = max(loss, module.p.truncation_loss_max())
            checks["projection"] = {
                "idempotent_residual": module.idempotent_residual,
                "self_adjoint_residual": module.self_adjoint_residual,
                "pass": True,
            }
        except NumericalFailure as exc:
            p = TorusMatrix.from_obj(cfg.algebra, cfg.raw["module"]["p"])
            res = is_projection(p, threshold)
            checks["projection"] = {
                "idempotent_residual": res.idempotent_residual,
                "self_adjoint_residual": res.self_adjoint_residual,
                "pass": False,
                "error": str(exc),
            }
            ok = False

    if "connection" in cfg.raw and module is None:
        raise ConfigError("a 'connection' section requires a 'module' section")
    if "connection" in cfg.raw:
        samples = int(cfg.raw.get("validate", {}).get("samples", 8))
        try:
            conn = cfg.connection(module)
            loss = max(loss, *(a.truncation_loss_max() for a in conn.potentials))
            resid = check_compatibility(conn, samples=samples)
            passed = resid <= max(threshold, 1e-10)
            checks["compatibility"] = {"residual": resid, "samples": samples, "pass": passed}
            ok = ok and passed
        except NumericalFailure as exc:
            checks["compatibility"] = {"pass": False, "error": str(exc)}
            ok = False

    report["checks"] = checks
    report["pass"] = ok
    report["truncation_loss_max"] = loss
    return report, EXIT_OK if ok else EXIT_NUMERICAL


def cmd_ym(cfg: JobConfig, tol: float | None) -> tuple[dict, int]:
    threshold = tol if tol is not None else cfg.tol_theorem
    report = _base_report(cfg, "ym")
    conn = cfg.connection()
    if conn.convention != "dynamical":
        raise ConfigError("'ym' needs a dynamical-convention connection")
    module = conn.module

    ym_d = ym_dynamical(conn)
    f_dyn = curvature(conn)
    skew = max(
        mat_l1_norm(f_dyn.components[jk].adjoint() + f_dyn.components[jk])
        for jk in f_dyn.pairs()
    )
    spec_rep = ym_spectral_report(phi_map(conn))
    ym_s = spec_rep["value"]
    c_n = dixmier_constant(cfg.n)

    flat = max(abs(ym_d), abs(ym_s)) <= 1e-18
    ratio = None if flat else ym_s / ym_d
    ratio_dev = None if flat else abs(ratio - c_n) / c_n
    theorem_dev = abs(ym_s - c_n * ym_d) / max(1.0, ym_d)

    loss = max(
        [a.truncation_loss_max() for a in conn.potentials]
        + [f_dyn.components[jk].truncation_loss_max() for jk in f_dyn.pairs()]
        + [module.p.truncation_loss_max()]
    )
    report.update(
        {
            "q": module.q,
            "ym_dynamical": ym_d,
            "ym_spectral": ym_s,
            "constant_c": c_n,
            "ratio": ratio,
            "ratio_rel_deviation": ratio_dev,
            "flat": flat,
            "theorem_deviation": theorem_dev,
            "residuals": {
                "projection_idempotent": module.idempotent_residual,
                "projection_self_adjoint": module.self_adjoint_residual,
                "curvature_skew": skew,
                "spectral_cross_check_rel": spec_rep["cross_check_rel"],
            },
            "truncation_loss_max": loss,
        }
    )
    code = EXIT_OK if theorem_dev <= threshold else EXIT_NUMERICAL
    return report, code


def cmd_make_projection(cfg: JobConfig, tol: float | None) -> tuple[dict, int]:
    threshold = tol if tol is not None else cfg.tol_newton
    report = _base_report(cfg, "make-projection")
    p = cfg.idempotent()
    try:
        z, z_inv, p_tilde = idempotent_to_projection(p, tol=threshold)
    except (ValueError, ConvergenceFailure) as exc:
        raise NumericalFailure(str(exc)) from exc
    check = is_projection(p_tilde, 10.0 * threshold)
    similarity = mat_l1_norm(z @ p - p_tilde @ z)
    report.update(
        {
            "residuals": {
                "input_idempotent": mat_l1_norm(p @ p - p),
                "p_tilde_idempotent": check.idempotent_residual,
                "p_tilde_self_adjoint": check.self_adjoint_residual,
                "similarity": similarity,
            },
            "p_tilde": p_tilde.to_obj(),
            "z": z.to_obj(),
            "z_inv": z_inv.to_obj(),
            "truncation_loss_max": max(
                p_tilde.truncation_loss_max(), z.truncation_loss_max(), z_inv.truncation_loss_max()
            ),
        }
    )
    ok = check.is_projection and similarity <= 10.0 * threshold
    return report, EXIT_OK if ok else EXIT_NUMERICAL


def cmd_optimize(cfg: JobConfig, tol: float | None, seed: int | None) -> tuple[dict, int]:
    report = _base_report(cfg, "optimize")
    opts = cfg.raw.get("optimize", {})
    _require(isinstance(opts, dict), "'optimize' must be an object")
    try:
        params = DescentParams(
            max_iter=int(opts.get("max_iter", 200)),
            grad_tol=float(tol if tol is not None else opts.get("grad_tol", 1e-6)),
            armijo_c=float(opts.get("armijo_c", 1e-4)),
            step_init=float(opts.get("step_init", 0.5)),
            step_shrink=float(opts.get("step_shrink", 0.5)),
            seed=int(seed if seed is not None else opts.get("seed", 0)),
        )
    except ValueError as exc:
        raise ConfigError(f"bad descent parameters: {exc}") from exc

    init = opts.get("init", "config")
    if init == "config":
        conn = cfg.connection()
        if conn.convention != "dynamical":
            raise ConfigError("'optimize' needs a dynamical-convention connection")
    elif init == "random":
        import numpy as np

        module = cfg.module()
        rng = np.random.default_rng(params.seed)
        pots = random_skew_potentials(
            module,
            rng,
            radius=int(opts.get("random_radius", 1)),
            scale=float(opts.get("random_scale", 0.3)),
        )
        try:
            conn = Connection(module, "dynamical", pots)
        except ValueError as exc:
            raise NumericalFailure(str(exc)) from exc
    else:
        raise ConfigError(f"optimize.init must be 'config' or 'random', got {init!r}")

    trace = minimize_ym(conn, params)
    final_grad = gradient_norm(ym_gradient(trace.final))
    loss = max(a.truncation_loss_max() for a in trace.final.potentials)
    report.update(
        {
            "truncation_loss_max": loss,
            "params": {
                "max_iter": params.max_iter,
                "grad_tol": params.grad_tol,
                "armijo_c": params.armijo_c,
                "step_init": params.step_init,
                "step_shrink": params.step_shrink,
                "seed": params.seed,
                "init": init,
            },
            "iterations": len(trace.steps) - 1,
            "ym_initial": trace.steps[0]["ym"],
            "ym_final": trace.steps[-1]["ym"],
            "grad_norm_final": final_grad,
            "converged": trace.converged,
            "line_search_failed": trace.line_search_failed,
            "trace": trace.steps,
            "final_connection": trace.final.to_obj(),
        }
    )
    return report, EXIT_OK if not trace.line_search_failed else EXIT_NUMERICAL


def render_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_outputs(report: dict, out_dir: str):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    command = report["command"].replace("-", "_")
    (out / f"{command}_report.json").write_text(render_report(report))
    if report["command"] == "optimize":
        lines = "".join(
            json.dumps(step, sort_keys=True, allow_nan=False) + "\n"
            for step in report["trace"]
        )
        (out / "descent_trace.jsonl").write_text(lines)
        (out / "final_connection.json").write_text(
            json.dumps(report["final_connection"], indent=2, sort_keys=True) + "\n"
        )
    if report["command"] == "make-projection":
        payload = {k: report[k] for k in ("p_tilde", "z", "z_inv")}
        (out / "projection.json").write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n"
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nctorus",
        description="Yang-Mills computations on the noncommutative n-torus",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("validate", "check theta, projection, and connection compatibility"),
        ("ym", "compute both Yang-Mills values and their ratio"),
        ("make-projection", "convert an idempotent into a projection"),
        ("optimize", "run Yang-Mills gradient descent"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", required=True, help="path to the JSON job config")
        p.add_argument("--out", default=None, help="directory for report files")
        p.add_argument("--tol", type=float, default=None, help="override the command's primary tolerance")
        p.add_argument("--seed", type=int, default=None, help="override the random seed")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        try:
            raw = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        cfg = JobConfig(raw)
        if args.command == "validate":
            report, code = cmd_validate(cfg, args.tol)
        elif args.command == "ym":
            report, code = cmd_ym(cfg, args.tol)
        elif args.command == "make-projection":
            report, code = cmd_make_projection(cfg, args.tol)
        else:
            report, code = cmd_optimize(cfg, args.tol, args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailure, ConvergenceFailure, CrossCheckError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    sys.stdout.write(render_report(report))
    if args.out:
        write_outputs(report, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
