"""Shared fixtures, hypothesis strategies, and independent oracles."""

from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from nctorus import (
    DeformationMatrix,
    TorusAlgebra,
    TruncationPolicy,
)

# algebra fixtures are immutable values, so sharing them across generated
# examples is sound
settings.register_profile(
    "nctorus",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("nctorus")


THETA2 = DeformationMatrix([[0.0, -0.31], [0.31, 0.0]])
THETA3 = DeformationMatrix(
    [
        [0.0, -0.23, 0.11],
        [0.23, 0.0, -0.37],
        [-0.11, 0.37, 0.0],
    ]
)


@pytest.fixture
def alg2():
    return TorusAlgebra(THETA2, TruncationPolicy(r_max=6))


@pytest.fixture
def alg2_small():
    return TorusAlgebra(THETA2, TruncationPolicy(r_max=4))


@pytest.fixture
def alg3():
    return TorusAlgebra(THETA3, TruncationPolicy(r_max=4))


@pytest.fixture
def alg2_strict():
    return TorusAlgebra(THETA2, TruncationPolicy(r_max=6, mode="strict"))


def normal_order_oracle(letters, theta: DeformationMatrix) -> complex:
    """Phase from bubble-sorting a generator word into normal order.

    letters is a list of (generator_index_0based, +-1).  Each adjacent swap
    moving U_k^a left of U_m^b with k > m multiplies in
    exp(2 pi i T[k][m] a b), straight from the generator relation.  Completely
    independent of the closed-form phase.
    """
    arr = list(letters)
    phase = 1.0 + 0.0j
    changed = True
    while changed:
        changed = False
        for i in range(len(arr) - 1):
            (k, a), (m, b) = arr[i], arr[i + 1]
            if k > m:
                t = 2.0 * math.pi * theta.rows[k][m] * a * b
                phase *= complex(math.cos(t), math.sin(t))
                arr[i], arr[i + 1] = arr[i + 1], arr[i]
                changed = True
    return phase


def exponent_letters(r) -> list:
    """Expand an exponent vector into normal-ordered generator letters."""
    out = []
    for j, rj in enumerate(r):
        out.extend([(j, 1 if rj > 0 else -1)] * abs(rj))
    return out


def word_phase_oracle(r, s, theta: DeformationMatrix) -> complex:
    """Brute-force phase of U^r U^s via elementary swaps."""
    return normal_order_oracle(exponent_letters(r) + exponent_letters(s), theta)


def adjoint_phase_oracle(r, theta: DeformationMatrix) -> complex:
    """Brute-force normal-ordering phase of (U^r)* = U_n^{-r_n} ... U_1^{-r_1}."""
    letters = []
    for j in range(theta.n - 1, -1, -1):
        rj = r[j]
        letters.extend([(j, -1 if rj > 0 else 1)] * abs(rj))
    return normal_order_oracle(letters, theta)


def exponents_strategy(n: int, radius: int = 2):
    return st.tuples(*([st.integers(-radius, radius)] * n))


def coeff_strategy(max_mag: float = 2.0):
    parts = st.floats(-max_mag, max_mag, allow_nan=False, allow_infinity=False, width=32)
    return st.builds(complex, parts, parts)


def element_strategy(algebra: TorusAlgebra, radius: int = 2, max_terms: int = 5):
    def build(pairs):
        coeffs = {}
        for r, c in pairs:
            coeffs[r] = coeffs.get(r, 0.0) + c
        return algebra.element(coeffs)

    return st.builds(
        build,
        st.lists(
            st.tuples(exponents_strategy(algebra.n, radius), coeff_strategy()),
            min_size=0,
            max_size=max_terms,
        ),
    )


def all_box_exponents(n, radius):
    return list(itertools.product(range(-radius, radius + 1), repeat=n))


def random_dense_element(algebra, rng: np.random.Generator, radius=1, scale=1.0):
    coeffs = {
        r: scale * complex(rng.standard_normal(), rng.standard_normal())
        for r in all_box_exponents(algebra.n, radius)
    }
    return algebra.element(coeffs)
