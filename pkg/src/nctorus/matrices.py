"""q x q matrix algebra over the truncated torus algebra.

Provides the extended trace, the submultiplicative l1 operator-norm bound,
Newton-Schulz iterations for the inverse and the positive square root (the
computational stand-in for holomorphic functional calculus), conversion of
idempotents to self-adjoint projections, and normalization of Hermitian
structures on free modules.
"""

from __future__ import annotations

import math
from typing import Callable, NamedTuple

from .torus import (
    AlgebraMismatch,
    ConvergenceFailure,
    TorusAlgebra,
    TorusElement,
    adjoint,
    delta,
    delta_tilde,
    l1_norm,
    linear_combine,
    mul,
    trace_tau,
)


class TorusMatrix:
    """Immutable square matrix with TorusElement entries sharing one algebra."""

    __slots__ = ("algebra", "q", "rows")

    def __init__(self, rows):
        rows = tuple(tuple(row) for row in rows)
        q = len(rows)
        if q < 1 or any(len(row) != q for row in rows):
            raise ValueError("matrix must be square and non-empty")
        alg = rows[0][0].algebra
        for row in rows:
            for el in row:
                if el.algebra != alg:
                    raise AlgebraMismatch("matrix entries built over different algebras")
        object.__setattr__(self, "algebra", alg)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "rows", rows)

    def __setattr__(self, *a):
        raise AttributeError("TorusMatrix is immutable")

    @classmethod
    def identity(cls, algebra: TorusAlgebra, q: int) -> "TorusMatrix":
        one, zero = algebra.one(), algebra.zero()
        return cls([[one if i == j else zero for j in range(q)] for i in range(q)])

    @classmethod
    def zeros(cls, algebra: TorusAlgebra, q: int) -> "TorusMatrix":
        zero = algebra.zero()
        return cls([[zero for _ in range(q)] for _ in range(q)])

    @classmethod
    def diag(cls, entries) -> "TorusMatrix":
        entries = list(entries)
        alg = entries[0].algebra
        zero = alg.zero()
        q = len(entries)
        return cls([[entries[i] if i == j else zero for j in range(q)] for i in range(q)])

    @classmethod
    def scalar(cls, algebra: TorusAlgebra, q: int, value) -> "TorusMatrix":
        return cls.identity(algebra, q) * complex(value)

    def entry(self, i: int, j: int) -> TorusElement:
        return self.rows[i][j]

    def _check_shape(self, other: "TorusMatrix"):
        if self.q != other.q:
            raise ValueError(f"matrix sizes differ: {self.q} vs {other.q}")
        if self.algebra != other.algebra:
            raise AlgebraMismatch("matrices built over different algebras")

    def __add__(self, other):
        if not isinstance(other, TorusMatrix):
            return NotImplemented
        self._check_shape(other)
        return TorusMatrix(
            [[self.rows[i][j] + other.rows[i][j] for j in range(self.q)] for i in range(self.q)]
        )

    def __sub__(self, other):
        if not isinstance(other, TorusMatrix):
            return NotImplemented
        self._check_shape(other)
        return TorusMatrix(
            [[self.rows[i][j] - other.rows[i][j] for j in range(self.q)] for i in range(self.q)]
        )

    def __neg__(self):
        return self * (-1.0)

    def __mul__(self, scalar):
        if isinstance(scalar, (int, float, complex)):
            lam = complex(scalar)
            return TorusMatrix([[el * lam for el in row] for row in self.rows])
        return NotImplemented

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, TorusMatrix):
            self._check_shape(other)
            q = self.q
            out = []
            for i in range(q):
                row = []
                for j in range(q):
                    row.append(
                        linear_combine(
                            [(1.0, mul(self.rows[i][k], other.rows[k][j])) for k in range(q)]
                        )
                    )
                out.append(row)
            return TorusMatrix(out)
        if isinstance(other, ModuleVector):
            if other.q != self.q:
                raise ValueError(f"matrix size {self.q} vs vector size {other.q}")
            comps = []
            for i in range(self.q):
                comps.append(
                    linear_combine(
                        [(1.0, mul(self.rows[i][k], other.components[k])) for k in range(self.q)]
                    )
                )
            return ModuleVector(tuple(comps))
        return NotImplemented

    def adjoint(self) -> "TorusMatrix":
        """Conjugate transpose with the algebra involution on entries."""
        return TorusMatrix(
            [[adjoint(self.rows[j][i]) for j in range(self.q)] for i in range(self.q)]
        )

    def map_entries(self, f: Callable[[TorusElement], TorusElement]) -> "TorusMatrix":
        return TorusMatrix([[f(el) for el in row] for row in self.rows])

    def delta_tilde(self, j: int) -> "TorusMatrix":
        return self.map_entries(lambda el: delta_tilde(j, el))

    def delta(self, j: int) -> "TorusMatrix":
        return self.map_entries(lambda el: delta(j, el))

    def column(self, j: int) -> "ModuleVector":
        return ModuleVector(tuple(self.rows[i][j] for i in range(self.q)))

    @classmethod
    def from_columns(cls, columns) -> "TorusMatrix":
        columns = list(columns)
        q = len(columns)
        return cls([[columns[j].components[i] for j in range(q)] for i in range(q)])

    def support_radius(self) -> int:
        return max(el.support_radius() for row in self.rows for el in row)

    def truncation_loss_max(self) -> float:
        return max(el.truncation_loss for row in self.rows for el in row)

    def __eq__(self, other):
        return (
            isinstance(other, TorusMatrix)
            and self.q == other.q
            and self.rows == other.rows
        )

    __hash__ = None

    def __repr__(self):
        return f"TorusMatrix(q={self.q}, n={self.algebra.n})"

    def to_obj(self):
        """JSON form: {"q": q, "entries": row-major list of element records}."""
        return {"q": self.q, "entries": [el.to_obj() for row in self.rows for el in row]}

    @classmethod
    def from_obj(cls, algebra: TorusAlgebra, obj) -> "TorusMatrix":
        q = int(obj["q"])
        entries = obj["entries"]
        if len(entries) != q * q:
            raise ValueError(f"expected {q * q} entries, got {len(entries)}")
        it = iter(entries)
        return cls([[TorusElement.from_obj(algebra, next(it)) for _ in range(q)] for _ in range(q)])


class ModuleVector:
    """Column vector of q TorusElements: an element of the free module A^q."""

    __slots__ = ("algebra", "q", "components")

    def __init__(self, components):
        components = tuple(components)
        if not components:
            raise ValueError("vector needs at least one component")
        alg = components[0].algebra
        for el in components:
            if el.algebra != alg:
                raise AlgebraMismatch("vector components built over different algebras")
        object.__setattr__(self, "algebra", alg)
        object.__setattr__(self, "q", len(components))
        object.__setattr__(self, "components", components)

    def __setattr__(self, *a):
        raise AttributeError("ModuleVector is immutable")

    @classmethod
    def basis(cls, algebra: TorusAlgebra, q: int, k: int) -> "ModuleVector":
        """Standard basis column e_k, 0-based k."""
        return cls(tuple(algebra.one() if i == k else algebra.zero() for i in range(q)))

    def __add__(self, other):
        if not isinstance(other, ModuleVector):
            return NotImplemented
        if self.q != other.q:
            raise ValueError("vector sizes differ")
        return ModuleVector(tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other):
        if not isinstance(other, ModuleVector):
            return NotImplemented
        if self.q != other.q:
            raise ValueError("vector sizes differ")
        return ModuleVector(tuple(a - b for a, b in zip(self.components, other.components)))

    def __mul__(self, scalar):
        if isinstance(scalar, (int, float, complex)):
            return ModuleVector(tuple(c * complex(scalar) for c in self.components))
        return NotImplemented

    __rmul__ = __mul__

    def right_mul(self, a: TorusElement) -> "ModuleVector":
        """Module action xi . a, entrywise right multiplication."""
        return ModuleVector(tuple(mul(c, a) for c in self.components))

    def map_components(self, f) -> "ModuleVector":
        return ModuleVector(tuple(f(c) for c in self.components))

    def l1_norm(self) -> float:
        return math.fsum(l1_norm(c) for c in self.components)

    def __repr__(self):
        return f"ModuleVector(q={self.q}, n={self.algebra.n})"


def canonical_pairing(xi: ModuleVector, eta: ModuleVector) -> TorusElement:
    """<xi, eta> = sum_k xi_k^* eta_k, the canonical algebra-valued pairing."""
    if xi.q != eta.q:
        raise ValueError("vector sizes differ")
    return linear_combine(
        [(1.0, mul(adjoint(a), b)) for a, b in zip(xi.components, eta.components)]
    )


def tau_q(m: TorusMatrix) -> complex:
    """Extended trace sum_r tau(M_rr), unnormalized over the matrix size.

    The normalization is deliberately asymmetric: the trace is summed (not
    averaged) over the module size q but the Clifford factor elsewhere uses
    the normalized matrix trace.  That is the one combination under which the
    two Yang-Mills functionals agree with the documented constant.
    """
    return sum((trace_tau(m.rows[r][r]) for r in range(m.q)), 0.0 + 0.0j)


def mat_l1_norm(m: TorusMatrix) -> float:
    """Max row sum of entrywise l1 norms; submultiplicative upper bound."""
    return max(math.fsum(l1_norm(el) for el in row) for row in m.rows)


def _box_precheck(m: TorusMatrix, what: str):
    rad = m.support_radius()
    r_max = m.algebra.policy.r_max
    if r_max < 2 * rad:
        raise ValueError(
            f"{what} needs truncation box r_max >= 2 * support radius "
            f"({r_max} < 2 * {rad}); enlarge the box"
        )


def newton_inverse(
    m: TorusMatrix,
    tol: float = 1e-10,
    max_iter: int = 100,
    initial: TorusMatrix | None = None,
) -> TorusMatrix:
    """Inverse by the quadratically convergent iteration X <- X(2I - MX).

    The default initial guess I / ||M|| works for self-adjoint positive M;
    other callers should supply an initial guess with ||I - X0 M|| < 1.
    """
    _box_precheck(m, "newton_inverse")
    ident = TorusMatrix.identity(m.algebra, m.q)
    if initial is None:
        nrm = mat_l1_norm(m)
        if nrm == 0.0:
            raise ConvergenceFailure("cannot invert the zero matrix")
        x = ident * (1.0 / nrm)
    else:
        x = initial
    res = math.inf
    prev_left = math.inf
    for _ in range(max_iter):
        e = ident - m @ x
        res = mat_l1_norm(e)
        if res <= tol:
            left = mat_l1_norm(ident - x @ m)
            if left <= tol:
                return x
            if left > prev_left * 0.9:
                # the left residual sits on the truncation floor
                raise ConvergenceFailure(
                    f"newton_inverse left residual stalled at {left:.3e} > "
                    f"tol={tol:.1e}; truncation box too small for this operand"
                )
            prev_left = left
        x = x @ (ident + e)
    raise ConvergenceFailure(
        f"newton_inverse did not reach tol={tol:.1e} in {max_iter} iterations "
        f"(final residual {res:.3e})"
    )


def newton_sqrt(a: TorusMatrix, tol: float = 1e-10, max_iter: int = 100):
    """Coupled inverse-free Newton-Schulz square root.

    Returns (s, s_inv) with ||s @ s - a|| <= tol and ||s @ s_inv - I|| <= tol
    in mat_l1_norm.  Requires a self-adjoint positive input with spectrum
    bounded away from zero; failure to converge signals spectrum near zero or
    a truncation box too small for the iteration.
    """
    _box_precheck(a, "newton_sqrt")
    alpha = mat_l1_norm(a)
    if alpha == 0.0:
        raise ConvergenceFailure("newton_sqrt of the zero matrix")
    ident = TorusMatrix.identity(a.algebra, a.q)
    y = a * (1.0 / alpha)
    z = ident
    sqrt_alpha = math.sqrt(alpha)
    prev = math.inf
    stalled = 0
    for _ in range(max_iter):
        t = (ident * 3.0 - z @ y) * 0.5
        y = y @ t
        z = t @ z
        s = y * sqrt_alpha
        res = mat_l1_norm(s @ s - a)
        if res <= tol:
            s_inv = z * (1.0 / sqrt_alpha)
            for _ in range(5):
                inv_res = mat_l1_norm(s @ s_inv - ident)
                if inv_res <= tol:
                    return s, s_inv
                s_inv = s_inv @ (ident * 2.0 - s @ s_inv)
            raise ConvergenceFailure(
                f"newton_sqrt inverse residual {inv_res:.3e} exceeds tol={tol:.1e}"
            )
        # no further progress means we sit on the truncation floor
        stalled = stalled + 1 if res > prev * 0.9 else 0
        if stalled >= 4:
            raise ConvergenceFailure(
                f"newton_sqrt stalled at residual {res:.3e} > tol={tol:.1e}; "
                "spectrum near zero or truncation too aggressive"
            )
        prev = res
    raise ConvergenceFailure(
        f"newton_sqrt did not reach tol={tol:.1e} in {max_iter} iterations "
        f"(final residual {prev:.3e})"
    )


class ProjectionCheck(NamedTuple):
    is_projection: bool
    idempotent_residual: float
    self_adjoint_residual: float


def is_projection(p: TorusMatrix, tol: float = 1e-8) -> ProjectionCheck:
    """Check ||p^2 - p|| <= tol and ||p^* - p|| <= tol, returning both residuals."""
    idem = mat_l1_norm(p @ p - p)
    sa = mat_l1_norm(p.adjoint() - p)
    return ProjectionCheck(idem <= tol and sa <= tol, idem, sa)


def idempotent_to_projection(p: TorusMatrix, tol: float = 1e-10):
    """Similarity from an idempotent to a self-adjoint projection.

    z = ((2p^* - 1)(2p - 1) + 1)^{1/2} is invertible positive and
    p_tilde = z p z^{-1} is a projection similar to p.  Inputs failing the
    idempotency tolerance are rejected rather than repaired.

    Returns (z, z_inv, p_tilde).
    """
    idem = mat_l1_norm(p @ p - p)
    if idem > tol:
        raise ValueError(
            f"input is not idempotent to tolerance: ||p^2 - p|| = {idem:.3e} > {tol:.1e}"
        )
    ident = TorusMatrix.identity(p.algebra, p.q)
    v = p * 2.0 - ident
    u = v.adjoint() @ v + ident
    z, z_inv = newton_sqrt(u, tol=tol)
    p_tilde = z @ p @ z_inv
    return z, z_inv, p_tilde


def hermitian_normalize(t: TorusMatrix, tol: float = 1e-10):
    """Square root Psi of a positive-definite self-adjoint T.

    Psi transports the pairing <xi, eta>_T = xi^* T eta to the canonical one:
    <xi, eta>_T = <Psi xi, Psi eta>.  Returns (psi, psi_inv).
    """
    sa = mat_l1_norm(t.adjoint() - t)
    if sa > tol:
        raise ValueError(f"T is not self-adjoint to tolerance: residual {sa:.3e}")
    return newton_sqrt(t, tol=tol)
