"""Gradient descent for the Yang-Mills functional over dynamical connections.

The functional is quartic in the potentials.  The gradient with respect to the
real inner product (H, H') -> sum_j Re tau_q(H_j^* H'_j) on the tangent space
of skew-adjoint, p-compressed potentials is

    G_l = 2 sum_{m != l} ( delta_tilde_m(F_lm) + [A_m, F_lm] ),

compressed back to p M_q p, where F_lm = -F_ml below the diagonal.  Descent
uses Armijo backtracking; every iterate is re-projected onto the tangent
space, so the connection invariants hold along the whole trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .connections import (
    DYNAMICAL,
    Connection,
    ConventionError,
    ProjectiveModule,
    _curvature_components,
    curvature,
)
from .matrices import TorusMatrix, tau_q
from .torus import delta_tilde


@dataclass(frozen=True)
class DescentParams:
    max_iter: int = 200
    grad_tol: float = 1e-8
    armijo_c: float = 1e-4
    step_init: float = 0.5
    step_shrink: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.armijo_c < 1.0:
            raise ValueError(f"armijo_c must be in (0, 1), got {self.armijo_c}")
        if not 0.0 < self.step_shrink < 1.0:
            raise ValueError(f"step_shrink must be in (0, 1), got {self.step_shrink}")


@dataclass
class DescentTrace:
    steps: list = field(default_factory=list)
    final: Connection | None = None
    converged: bool = False
    line_search_failed: bool = False

    def record(self, iteration: int, ym: float, grad_norm: float, step):
        self.steps.append(
            {"iter": iteration, "ym": ym, "grad_norm": grad_norm, "step": step}
        )

    def ym_values(self):
        return [s["ym"] for s in self.steps]


def _tangent_project(module: ProjectiveModule, m: TorusMatrix) -> TorusMatrix:
    return module.compress((m - m.adjoint()) * 0.5)


def ym_gradient(conn: Connection) -> tuple:
    """Riesz representative of the Yang-Mills derivative in the tangent space."""
    if conn.convention != DYNAMICAL:
        raise ConventionError("ym_gradient needs a dynamical-convention connection")
    f = curvature(conn)
    n = conn.n
    module = conn.module
    grads = []
    for l in range(1, n + 1):
        acc = TorusMatrix.zeros(conn.algebra, module.q)
        for m in range(1, n + 1):
            if m == l:
                continue
            flm = f.component(l, m)
            am = conn.potentials[m - 1]
            acc = acc + flm.delta_tilde(m) + (am @ flm - flm @ am)
        grads.append(_tangent_project(module, acc * 2.0))
    return tuple(grads)


def gradient_norm(grads) -> float:
    return math.sqrt(
        max(0.0, math.fsum(tau_q(g.adjoint() @ g).real for g in grads))
    )


def gradient_inner(grads, dirs) -> float:
    """Real pairing sum_j Re tau_q(G_j^* H_j)."""
    return math.fsum(tau_q(g.adjoint() @ h).real for g, h in zip(grads, dirs))


def ym_of_potentials(module: ProjectiveModule, potentials) -> float:
    """Yang-Mills value of raw potential matrices, with no invariant checks.

    Evaluates the same curvature assembly as a validated connection would;
    exists so finite differences can step off the tangent space.
    """
    comps = _curvature_components(module, tuple(potentials), delta_tilde)
    return math.fsum(tau_q(m.adjoint() @ m).real for m in comps.values())


def fd_directional(module: ProjectiveModule, potentials, direction, h: float = 1e-5) -> float:
    """Central finite difference of the raw Yang-Mills value along a direction."""
    plus = [a + h * d for a, d in zip(potentials, direction)]
    minus = [a - h * d for a, d in zip(potentials, direction)]
    return (ym_of_potentials(module, plus) - ym_of_potentials(module, minus)) / (2.0 * h)


def minimize_ym(c0: Connection, params: DescentParams) -> DescentTrace:
    """Projected gradient descent with Armijo backtracking.

    Stops when the gradient norm reaches grad_tol or after max_iter steps;
    a step-size underflow during backtracking sets line_search_failed instead
    of raising.  The recorded Yang-Mills values are nonincreasing.
    """
    if c0.convention != DYNAMICAL:
        raise ConventionError("minimize_ym needs a dynamical-convention connection")
    from .connections import ym_dynamical

    trace = DescentTrace()
    conn = c0
    value = ym_dynamical(conn)
    grads = ym_gradient(conn)
    gnorm = gradient_norm(grads)
    trace.record(0, value, gnorm, None)

    for it in range(1, params.max_iter + 1):
        if gnorm <= params.grad_tol:
            break
        step = params.step_init
        gsq = gnorm * gnorm
        accepted = None
        while step > 1e-18:
            candidate = tuple(
                _tangent_project(conn.module, a - step * g)
                for a, g in zip(conn.potentials, grads)
            )
            try:
                cand_conn = Connection(conn.module, DYNAMICAL, candidate)
            except ValueError:
                # truncation pushed the candidate off the tangent space;
                # a smaller step shrinks the defect proportionally
                step *= params.step_shrink
                continue
            cand_value = ym_dynamical(cand_conn)
            if cand_value <= value - params.armijo_c * step * gsq:
                accepted = (cand_conn, cand_value, step)
                break
            step *= params.step_shrink
        if accepted is None:
            trace.line_search_failed = True
            break
        conn, value, used = accepted
        grads = ym_gradient(conn)
        gnorm = gradient_norm(grads)
        trace.record(it, value, gnorm, used)

    trace.final = conn
    trace.converged = gnorm <= params.grad_tol
    return trace
