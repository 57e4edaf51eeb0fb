#!/usr/bin/env python3
"""Run Yang-Mills gradient descent from a seeded random start and print the
trace, together with the spectral value of the final connection.

Example:
    python scripts/descent_demo.py --q 2 --seed 3 --max-iter 40
"""

from __future__ import annotations

import argparse

import numpy as np

from nctorus import (
    DeformationMatrix,
    DescentParams,
    TorusAlgebra,
    TruncationPolicy,
    dixmier_constant,
    free_module,
    minimize_ym,
    phi_map,
    ym_spectral,
)
from nctorus.sampling import diag_module, random_connection


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--theta", type=float, default=0.31, help="deformation angle theta_21")
    parser.add_argument("--q", type=int, default=1)
    parser.add_argument("--module", choices=["free", "diag"], default="free")
    parser.add_argument("--scale", type=float, default=0.5)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--max-iter", type=int, default=50)
    parser.add_argument("--grad-tol", type=float, default=1e-7)
    parser.add_argument("--r-max", type=int, default=6)
    args = parser.parse_args()

    theta = DeformationMatrix([[0.0, -args.theta], [args.theta, 0.0]])
    alg = TorusAlgebra(theta, TruncationPolicy(r_max=args.r_max))
    if args.module == "free":
        module = free_module(alg, args.q)
    else:
        module = diag_module(alg, [1] + [0] * (args.q - 1))

    rng = np.random.default_rng(args.seed)
    conn = random_connection(module, rng, radius=1, scale=args.scale)
    trace = minimize_ym(
        conn, DescentParams(max_iter=args.max_iter, grad_tol=args.grad_tol, seed=args.seed)
    )

    for step in trace.steps:
        step_str = "-" if step["step"] is None else f"{step['step']:.3g}"
        print(
            f"iter {step['iter']:3d}  ym = {step['ym']:.10e}  "
            f"|grad| = {step['grad_norm']:.3e}  step = {step_str}"
        )
    print(f"converged: {trace.converged}  line_search_failed: {trace.line_search_failed}")

    final_spec = ym_spectral(phi_map(trace.final))
    ym_final = trace.steps[-1]["ym"]
    print(f"final ym_dynamical = {ym_final:.6e}")
    print(f"final ym_spectral  = {final_spec:.6e} (= c(2) * ym_dynamical, c(2) = {dixmier_constant(2):.6f})")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
