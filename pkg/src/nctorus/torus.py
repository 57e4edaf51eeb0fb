"""Sparse twisted group algebra arithmetic for the smooth noncommutative n-torus.

Elements are finitely supported Fourier series a = sum_r a_r U^r with exponents
r in Z^n, stored as dicts keyed by exponent tuple.  The generators satisfy

    U_k U_m = exp(2 pi i T_{km}) U_m U_k

for a real skew-symmetric deformation matrix T.  Monomials are kept in the
normal-ordered form U^r = U_1^{r_1} ... U_n^{r_n}; all reordering phases are
derived from that convention.  Supports live inside a hard box
[-r_max, r_max]^n; products that would leave the box are either an error
(strict mode) or dropped with their l1 mass recorded (lossy mode).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


class TorusError(Exception):
    """Base class for algebra-level failures."""


class DimensionMismatch(TorusError):
    """Exponent or matrix dimensions do not match the ambient n."""


class AlgebraMismatch(TorusError):
    """Operands built over different deformation matrices or policies."""


class TruncationOverflow(TorusError):
    """A strict-mode operation produced support outside the truncation box."""


class ConvergenceFailure(TorusError):
    """An iterative solver did not reach its residual target."""


@dataclass(frozen=True)
class TruncationPolicy:
    """Hard support box [-r_max, r_max]^n plus the coefficient drop threshold.

    eps_drop defaults to 1e-300 so that only exact-zero cleanup happens;
    anything larger is an explicit opt-in to lossier arithmetic.
    """

    r_max: int = 4
    mode: str = "lossy"
    eps_drop: float = 1e-300

    def __post_init__(self):
        if self.r_max < 1:
            raise ValueError(f"r_max must be >= 1, got {self.r_max}")
        if self.mode not in ("lossy", "strict"):
            raise ValueError(f"mode must be 'lossy' or 'strict', got {self.mode!r}")
        if not self.eps_drop >= 0.0:
            raise ValueError(f"eps_drop must be >= 0, got {self.eps_drop}")


class DeformationMatrix:
    """Real skew-symmetric n x n matrix of deformation angles.

    Input is validated to be skew within `tol` and then exactly
    antisymmetrized, so stored entries satisfy T[k][m] == -T[m][k] bit for bit.
    """

    __slots__ = ("n", "rows", "_weights")

    def __init__(self, entries, tol: float = 1e-12):
        arr = np.asarray(entries, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionMismatch(f"deformation matrix must be square, got shape {arr.shape}")
        n = arr.shape[0]
        if n < 2:
            raise ValueError(f"dimension must be >= 2, got {n}")
        skew_defect = float(np.abs(arr + arr.T).max())
        if skew_defect > tol:
            raise ValueError(f"matrix is not skew-symmetric: max |T + T^t| = {skew_defect:.3e}")
        arr = (arr - arr.T) / 2.0
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "rows", tuple(tuple(float(x) for x in row) for row in arr))
        # weights[m, k] = T[k][m] for k > m: the phase of U^r U^s is
        # exp(2 pi i * sum_m (weights @ r)_m s_m).
        w = np.zeros((n, n))
        for m in range(n):
            for k in range(m + 1, n):
                w[m, k] = self.rows[k][m]
        object.__setattr__(self, "_weights", w)

    @property
    def phase_weights(self) -> np.ndarray:
        return self._weights

    def __getitem__(self, km):
        k, m = km
        return self.rows[k][m]

    def __eq__(self, other):
        return isinstance(other, DeformationMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"DeformationMatrix(n={self.n})"

    def to_obj(self):
        return [list(row) for row in self.rows]

    @classmethod
    def from_obj(cls, obj, tol: float = 1e-12) -> "DeformationMatrix":
        return cls(obj, tol=tol)


def weyl_phase(r, s, theta: DeformationMatrix) -> complex:
    """Scalar sigma(r, s) with U^r U^s = sigma(r, s) U^{r+s} in normal order.

    Closed form exp(2 pi i * sum_{k>m} T_{km} r_k s_m); unit modulus by
    construction since the exponent is purely imaginary.
    """
    n = theta.n
    if len(r) != n or len(s) != n:
        raise DimensionMismatch(f"exponents must have length {n}, got {len(r)} and {len(s)}")
    acc = 0.0
    for k in range(n):
        rk = r[k]
        if rk == 0:
            continue
        row = theta.rows[k]
        for m in range(k):
            acc += row[m] * rk * s[m]
    t = TWO_PI * acc
    return complex(math.cos(t), math.sin(t))


def _reorder_phase_of_adjoint(r, theta: DeformationMatrix) -> complex:
    """Phase picked up normal-ordering (U^r)* = U_n^{-r_n} ... U_1^{-r_1}.

    Equals exp(2 pi i * sum_{k>m} T_{km} r_k r_m), i.e. weyl_phase(r, r).
    """
    return weyl_phase(r, r, theta)


@dataclass(frozen=True)
class TorusAlgebra:
    """Bundle of deformation matrix and truncation policy with element factories."""

    theta: DeformationMatrix
    policy: TruncationPolicy = TruncationPolicy()

    @property
    def n(self) -> int:
        return self.theta.n

    def _check_exponent(self, r):
        if len(r) != self.n:
            raise DimensionMismatch(f"exponent length {len(r)} != n = {self.n}")
        return tuple(int(x) for x in r)

    def make(self, coeffs: dict, loss: float = 0.0) -> "TorusElement":
        """Canonicalize a raw coefficient map into an element of this algebra."""
        r_max = self.policy.r_max
        eps = self.policy.eps_drop
        out = {}
        new_loss = float(loss)
        for r in sorted(coeffs):
            c = complex(coeffs[r])
            mag = abs(c)
            if mag <= eps:
                new_loss += mag
                continue
            if any(abs(x) > r_max for x in r):
                if self.policy.mode == "strict":
                    raise TruncationOverflow(
                        f"exponent {r} outside box [-{r_max}, {r_max}]^{self.n} in strict mode"
                    )
                new_loss += mag
                continue
            out[r] = c
        return TorusElement(self, out, new_loss)

    def zero(self) -> "TorusElement":
        return TorusElement(self, {}, 0.0)

    def one(self) -> "TorusElement":
        return TorusElement(self, {(0,) * self.n: 1.0 + 0.0j}, 0.0)

    def monomial(self, r, coeff=1.0) -> "TorusElement":
        return self.make({self._check_exponent(r): complex(coeff)})

    def u(self, j: int) -> "TorusElement":
        """Generator U_j, 1-based."""
        if not 1 <= j <= self.n:
            raise DimensionMismatch(f"generator index {j} out of range 1..{self.n}")
        r = [0] * self.n
        r[j - 1] = 1
        return self.monomial(r)

    def element(self, coeffs: dict) -> "TorusElement":
        return self.make({self._check_exponent(r): complex(c) for r, c in coeffs.items()})

    def phase(self, r, s) -> complex:
        return weyl_phase(r, s, self.theta)


class TorusElement:
    """Immutable finitely supported element sum_r coeffs[r] * U^r.

    coeffs keys are kept in ascending lexicographic order so that every
    reduction over the support is deterministic.  truncation_loss carries the
    accumulated l1 mass dropped by box truncation and coefficient cleanup over
    the whole computation history of the value.
    """

    __slots__ = ("algebra", "coeffs", "truncation_loss")

    def __init__(self, algebra: TorusAlgebra, coeffs: dict, truncation_loss: float):
        object.__setattr__(self, "algebra", algebra)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "truncation_loss", truncation_loss)

    def __setattr__(self, *a):
        raise AttributeError("TorusElement is immutable")

    def is_zero(self) -> bool:
        return not self.coeffs

    def support_radius(self) -> int:
        if not self.coeffs:
            return 0
        return max(max(abs(x) for x in r) for r in self.coeffs)

    def __add__(self, other):
        if isinstance(other, TorusElement):
            return linear_combine([(1.0, self), (1.0, other)])
        if isinstance(other, (int, float, complex)):
            return linear_combine([(1.0, self), (complex(other), self.algebra.one())])
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return linear_combine([(-1.0, self)])

    def __sub__(self, other):
        if isinstance(other, TorusElement):
            return linear_combine([(1.0, self), (-1.0, other)])
        if isinstance(other, (int, float, complex)):
            return linear_combine([(1.0, self), (-complex(other), self.algebra.one())])
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TorusElement):
            return mul(self, other)
        if isinstance(other, (int, float, complex)):
            return linear_combine([(complex(other), self)])
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return linear_combine([(complex(other), self)])
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float, complex)):
            return linear_combine([(1.0 / complex(other), self)])
        return NotImplemented

    def adjoint(self) -> "TorusElement":
        return adjoint(self)

    def __eq__(self, other):
        return (
            isinstance(other, TorusElement)
            and self.algebra == other.algebra
            and self.coeffs == other.coeffs
        )

    __hash__ = None

    def __repr__(self):
        terms = ", ".join(f"{r}: {c:.6g}" for r, c in list(self.coeffs.items())[:6])
        more = "" if len(self.coeffs) <= 6 else f", ... ({len(self.coeffs)} terms)"
        return f"TorusElement({{{terms}{more}}})"

    def to_obj(self):
        """JSON form: list of {"exp": [...], "re": x, "im": y} records."""
        return [
            {"exp": list(r), "re": c.real, "im": c.imag} for r, c in self.coeffs.items()
        ]

    @classmethod
    def from_obj(cls, algebra: TorusAlgebra, obj) -> "TorusElement":
        coeffs = {}
        for rec in obj:
            r = algebra._check_exponent(rec["exp"])
            coeffs[r] = coeffs.get(r, 0.0) + complex(float(rec["re"]), float(rec["im"]))
        return algebra.make(coeffs)


def _require_same_algebra(a: TorusElement, b: TorusElement):
    if a.algebra.theta != b.algebra.theta:
        raise AlgebraMismatch("operands have different deformation matrices")
    if a.algebra.policy != b.algebra.policy:
        raise AlgebraMismatch("operands have different truncation policies")


def linear_combine(terms) -> TorusElement:
    """Coefficientwise sum_i scalar_i * element_i over a shared algebra."""
    terms = list(terms)
    if not terms:
        raise ValueError("linear_combine needs at least one term")
    alg = terms[0][1].algebra
    acc: dict = {}
    loss = 0.0
    for lam, el in terms:
        _require_same_algebra(terms[0][1], el)
        lam = complex(lam)
        loss += el.truncation_loss
        for r, c in el.coeffs.items():
            acc[r] = acc.get(r, 0.0 + 0.0j) + lam * c
    return alg.make(acc, loss)


def mul(a: TorusElement, b: TorusElement) -> TorusElement:
    """Product in the twisted algebra: coefficient of U^t is
    sum_{r+s=t} a_r b_s sigma(r, s).

    Contributions to each output exponent accumulate in ascending
    lexicographic order of r, so results are reproducible bit for bit.
    """
    _require_same_algebra(a, b)
    alg = a.algebra
    if not a.coeffs or not b.coeffs:
        return TorusElement(alg, {}, a.truncation_loss + b.truncation_loss)
    n = alg.n
    r_max = alg.policy.r_max
    side = 2 * r_max + 1
    shape = (side,) * n

    bgrid = np.zeros(shape, dtype=np.complex128)
    for s, c in b.coeffs.items():
        bgrid[tuple(x + r_max for x in s)] = c

    pad = 4 * r_max + 1
    acc = np.zeros((pad,) * n, dtype=np.complex128)
    supp = list(a.coeffs)  # already ascending
    avals = np.array([a.coeffs[r] for r in supp], dtype=np.complex128)
    arr = np.array(supp, dtype=np.int64)
    wmat = arr.astype(float) @ alg.theta.phase_weights.T  # (K, n)
    srange = np.arange(-r_max, r_max + 1, dtype=float)

    cells = bgrid.size
    chunk = max(1, 4_000_000 // cells)
    for start in range(0, len(supp), chunk):
        stop = min(start + chunk, len(supp))
        contrib = avals[start:stop].reshape((-1,) + (1,) * n)
        for m in range(n):
            pm = np.exp((2j * math.pi) * np.outer(wmat[start:stop, m], srange))
            contrib = contrib * pm.reshape((stop - start,) + tuple(side if ax == m else 1 for ax in range(n)))
        contrib = contrib * bgrid[None]
        for idx in range(start, stop):
            r = supp[idx]
            sl = tuple(slice(r[m] + r_max, r[m] + r_max + side) for m in range(n))
            acc[sl] += contrib[idx - start]

    inbox_sl = tuple(slice(r_max, 3 * r_max + 1) for _ in range(n))
    inbox = acc[inbox_sl].copy()
    acc[inbox_sl] = 0.0
    out_abs = np.abs(acc)
    eps = alg.policy.eps_drop
    if alg.policy.mode == "strict" and bool((out_abs > eps).any()):
        worst = float(out_abs.max())
        raise TruncationOverflow(
            f"product support leaves box [-{r_max}, {r_max}]^{n} in strict mode "
            f"(largest dropped coefficient {worst:.3e})"
        )
    loss = a.truncation_loss + b.truncation_loss + float(out_abs.sum())

    coeffs = {}
    nz = np.nonzero(inbox)
    for pos in zip(*nz):  # C order == ascending lexicographic
        c = complex(inbox[pos])
        mag = abs(c)
        if mag <= eps:
            loss += mag
            continue
        coeffs[tuple(int(p) - r_max for p in pos)] = c
    return TorusElement(alg, coeffs, loss)


def adjoint(a: TorusElement) -> TorusElement:
    """Involution: scalars conjugate, (U_j)* = U_j^{-1}, (xy)* = y* x*.

    Coefficient of U^{-r} in a* is conj(a_r) times the normal-ordering phase
    of (U^r)*, which is weyl_phase(r, r).
    """
    alg = a.algebra
    coeffs = {}
    for r, c in a.coeffs.items():
        phase = _reorder_phase_of_adjoint(r, alg.theta)
        coeffs[tuple(-x for x in r)] = c.conjugate() * phase
    return alg.make(coeffs, a.truncation_loss)


def trace_tau(a: TorusElement) -> complex:
    """Canonical trace: the coefficient at exponent zero."""
    return a.coeffs.get((0,) * a.algebra.n, 0.0 + 0.0j)


def delta_tilde(j: int, a: TorusElement) -> TorusElement:
    """Derivation of the torus action along axis j (1-based): a_r -> i r_j a_r."""
    n = a.algebra.n
    if not 1 <= j <= n:
        raise DimensionMismatch(f"axis {j} out of range 1..{n}")
    jj = j - 1
    return a.algebra.make({r: c * (1j * r[jj]) for r, c in a.coeffs.items()}, a.truncation_loss)


def delta(j: int, a: TorusElement) -> TorusElement:
    """Dirac-side derivation delta_j = (-i) delta_tilde_j: a_r -> r_j a_r."""
    n = a.algebra.n
    if not 1 <= j <= n:
        raise DimensionMismatch(f"axis {j} out of range 1..{n}")
    jj = j - 1
    return a.algebra.make({r: c * r[jj] for r, c in a.coeffs.items()}, a.truncation_loss)


def l1_norm(a: TorusElement) -> float:
    """sum_r |a_r|; an upper bound for the operator norm since each U^r is unitary."""
    if not a.coeffs:
        return 0.0
    return math.fsum(abs(c) for c in a.coeffs.values())
