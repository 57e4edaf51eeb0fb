"""Seeded random generators for elements, modules, connections, idempotents.

Everything takes a numpy Generator so CLI runs and tests are reproducible
bit for bit from a single integer seed.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .connections import Connection, ProjectiveModule, module_new
from .matrices import ModuleVector, TorusMatrix
from .torus import TorusAlgebra, TorusElement, adjoint, mul


def box_exponents(n: int, radius: int):
    return list(itertools.product(range(-radius, radius + 1), repeat=n))


def random_element(
    algebra: TorusAlgebra,
    rng: np.random.Generator,
    radius: int = 1,
    scale: float = 1.0,
    density: float = 1.0,
) -> TorusElement:
    """Element with complex-gaussian coefficients on the radius box.

    density < 1 keeps each exponent with that probability, for sparser
    samples.
    """
    coeffs = {}
    for r in box_exponents(algebra.n, radius):
        if density < 1.0 and rng.random() >= density:
            continue
        coeffs[r] = scale * complex(rng.standard_normal(), rng.standard_normal())
    return algebra.element(coeffs)


def random_matrix(
    algebra: TorusAlgebra,
    q: int,
    rng: np.random.Generator,
    radius: int = 1,
    scale: float = 1.0,
    density: float = 1.0,
) -> TorusMatrix:
    return TorusMatrix(
        [
            [random_element(algebra, rng, radius, scale, density) for _ in range(q)]
            for _ in range(q)
        ]
    )


def random_vector(
    algebra: TorusAlgebra,
    q: int,
    rng: np.random.Generator,
    radius: int = 1,
    scale: float = 1.0,
) -> ModuleVector:
    return ModuleVector(
        tuple(random_element(algebra, rng, radius, scale) for _ in range(q))
    )


def diag_module(algebra: TorusAlgebra, pattern) -> ProjectiveModule:
    """Module for the diagonal projection with the given 0/1 pattern."""
    one, zero = algebra.one(), algebra.zero()
    return module_new(TorusMatrix.diag([one if b else zero for b in pattern]))


def rotated_module(algebra: TorusAlgebra, angle: float, axis: int = 1) -> ProjectiveModule:
    """Rank-one submodule of A^2 cut out by a U_axis-twisted rotation.

    p = v diag(1, 0) v^* for the unitary v = [[c, -s U], [s U^*, c]]; the
    entries are exactly unitary, so p is a projection up to rounding only.
    """
    c, s = math.cos(angle), math.sin(angle)
    u = algebra.u(axis)
    one = algebra.one()
    p = TorusMatrix(
        [
            [one * (c * c), (c * s) * u],
            [(c * s) * adjoint(u), one * (s * s)],
        ]
    )
    return module_new(p)


def constant_rotation_module(algebra: TorusAlgebra, angle: float) -> ProjectiveModule:
    """Rank-one submodule of A^2 from a constant (scalar-entry) rotation."""
    c, s = math.cos(angle), math.sin(angle)
    one = algebra.one()
    p = TorusMatrix(
        [
            [one * (c * c), one * (c * s)],
            [one * (c * s), one * (s * s)],
        ]
    )
    return module_new(p)


def random_skew_potentials(
    module: ProjectiveModule,
    rng: np.random.Generator,
    radius: int = 1,
    scale: float = 0.5,
) -> tuple:
    """Tangent-space potentials: p-compressed skew parts of random matrices."""
    alg = module.algebra
    out = []
    for _ in range(alg.n):
        x = random_matrix(alg, module.q, rng, radius, scale)
        out.append(module.compress((x - x.adjoint()) * 0.5))
    return tuple(out)


def random_connection(
    module: ProjectiveModule,
    rng: np.random.Generator,
    radius: int = 1,
    scale: float = 0.5,
) -> Connection:
    return Connection(
        module, "dynamical", random_skew_potentials(module, rng, radius, scale)
    )


def random_idempotent(
    algebra: TorusAlgebra,
    rng: np.random.Generator,
    radius: int = 1,
    scale: float = 0.15,
    scalar_witness: bool = False,
) -> TorusMatrix:
    """Idempotent p = v w in M_2 with w v = 1 exactly.

    v = (1 - d b, b)^t and w = (1, d); scalar_witness draws d as a constant,
    which keeps the support radius of p at `radius` instead of 2 * radius.
    """
    b = random_element(algebra, rng, radius, scale)
    if scalar_witness:
        d = algebra.one() * (scale * complex(rng.standard_normal(), rng.standard_normal()))
    else:
        d = random_element(algebra, rng, radius, scale)
    one = algebra.one()
    a11 = one - mul(d, b)
    return TorusMatrix([[a11, mul(a11, d)], [b, mul(b, d)]])
