"""Gamma matrices for the spin representation used by the Dirac-form calculus.

The construction is the standard iterated tensor product of 2x2 Pauli-type
generators, fixed once and for all so that serialized output is reproducible:
for n = 2m the generators are

    gamma_{2j-1} = sz^{(j-1)} (x) sx (x) 1^{(m-j)}
    gamma_{2j}   = sz^{(j-1)} (x) sy (x) 1^{(m-j)}

and odd n appends gamma_n = sz^{(m)} at the same representation size.  All
entries lie in {0, +-1, +-i}, so the anticommutation relations hold exactly in
floating point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_SX = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_SY = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
_SZ = np.array([[1, 0], [0, -1]], dtype=np.complex128)


@dataclass(frozen=True)
class CliffordRep:
    """n gamma matrices of size N = 2^floor(n/2), self-adjoint, pairwise anticommuting."""

    n: int
    N: int
    gammas: tuple  # tuple of n complex (N, N) arrays; gammas[j-1] is gamma_j

    def gamma(self, j: int) -> np.ndarray:
        """gamma_j, 1-based."""
        if not 1 <= j <= self.n:
            raise ValueError(f"gamma index {j} out of range 1..{self.n}")
        return self.gammas[j - 1]


def _kron_chain(factors) -> np.ndarray:
    out = factors[0]
    for f in factors[1:]:
        out = np.kron(out, f)
    return out


def gamma_generate(n: int) -> CliffordRep:
    """Deterministic representation of the n-generator anticommutation relations."""
    if n < 2:
        raise ValueError(f"need n >= 2 generators, got {n}")
    m = n // 2
    N = 2 ** m
    eye = np.eye(2, dtype=np.complex128)
    gammas = []
    for j in range(1, m + 1):
        prefix = [_SZ] * (j - 1)
        suffix = [eye] * (m - j)
        gammas.append(_kron_chain(prefix + [_SX] + suffix))
        gammas.append(_kron_chain(prefix + [_SY] + suffix))
    if n % 2 == 1:
        gammas.append(_kron_chain([_SZ] * m))
    for g in gammas:
        g.setflags(write=False)
    return CliffordRep(n=n, N=N, gammas=tuple(gammas))


def mat_trace_normalized(mat: np.ndarray) -> complex:
    """Ordinary matrix trace divided by the matrix size."""
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"trace needs a square matrix, got shape {mat.shape}")
    return complex(np.trace(mat)) / mat.shape[0]
