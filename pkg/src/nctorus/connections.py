"""Projective modules, compatible connections, curvature, and the dynamical
Yang-Mills value.

A module is E = p A^q for a projection p; a connection is stored as the
Grassmannian connection plus a tuple of p-compressed potential matrices, one
per torus axis.  Two conventions coexist:

  dynamical  nabla_j = p delta_tilde_j + A_j  with skew-adjoint A_j,
  spectral   nabla_j = p delta_j       + A_j  with self-adjoint A_j,

linked by the affine map Phi scaling operators by -i, which on potentials is
A_j -> -i A_j.  Curvature components are the commutators [nabla_j, nabla_k],
assembled into matrices through their action on the module columns p e_k.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrices import (
    ModuleVector,
    TorusMatrix,
    canonical_pairing,
    is_projection,
    mat_l1_norm,
    tau_q,
)
from .torus import (
    DimensionMismatch,
    TorusAlgebra,
    TorusElement,
    delta,
    delta_tilde,
    l1_norm,
)

DYNAMICAL = "dynamical"
SPECTRAL = "spectral"

PROJECTION_TOL = 1e-8
POTENTIAL_TOL = 1e-10


class ConventionError(ValueError):
    """Operation applied to a connection of the wrong convention."""


@dataclass(frozen=True)
class ProjectiveModule:
    """E = p A^q with the Hermitian pairing induced from the canonical one."""

    p: TorusMatrix
    idempotent_residual: float
    self_adjoint_residual: float

    @property
    def q(self) -> int:
        return self.p.q

    @property
    def algebra(self) -> TorusAlgebra:
        return self.p.algebra

    def column(self, k: int) -> ModuleVector:
        """Module generator p e_k, 0-based column index."""
        return self.p.column(k)

    def columns(self):
        return [self.column(k) for k in range(self.q)]

    def project_vector(self, xi: ModuleVector) -> ModuleVector:
        return self.p @ xi

    def compress(self, m: TorusMatrix) -> TorusMatrix:
        return self.p @ m @ self.p

    def contains(self, xi: ModuleVector, tol: float = PROJECTION_TOL) -> bool:
        return (self.project_vector(xi) - xi).l1_norm() <= tol


def module_new(p: TorusMatrix, tol: float = PROJECTION_TOL) -> ProjectiveModule:
    """Wrap a projection matrix as a module; rejects non-projections.

    Callers holding a mere idempotent should run idempotent_to_projection
    first.
    """
    check = is_projection(p, tol)
    if not check.is_projection:
        raise ValueError(
            "p is not a projection to tolerance "
            f"{tol:.1e} (||p^2-p|| = {check.idempotent_residual:.3e}, "
            f"||p^*-p|| = {check.self_adjoint_residual:.3e})"
        )
    return ProjectiveModule(p, check.idempotent_residual, check.self_adjoint_residual)


def free_module(algebra: TorusAlgebra, q: int) -> ProjectiveModule:
    return module_new(TorusMatrix.identity(algebra, q))


def hermitian_pairing(
    module: ProjectiveModule,
    xi: ModuleVector,
    eta: ModuleVector,
    tol: float = PROJECTION_TOL,
) -> TorusElement:
    """<xi, eta> = sum_k xi_k^* eta_k for vectors in the range of p."""
    for name, v in (("xi", xi), ("eta", eta)):
        defect = (module.project_vector(v) - v).l1_norm()
        if defect > tol:
            raise ValueError(f"{name} is outside the module: ||p v - v|| = {defect:.3e}")
    return canonical_pairing(xi, eta)


@dataclass(frozen=True)
class Connection:
    """Compatible connection stored as Grassmannian plus potentials.

    Construction enforces the convention's tangent-space invariants: each
    potential is p-compressed, and skew-adjoint (dynamical) or self-adjoint
    (spectral) within POTENTIAL_TOL.
    """

    module: ProjectiveModule
    convention: str
    potentials: tuple

    def __post_init__(self):
        if self.convention not in (DYNAMICAL, SPECTRAL):
            raise ConventionError(f"unknown convention {self.convention!r}")
        n = self.module.algebra.n
        if len(self.potentials) != n:
            raise DimensionMismatch(
                f"need {n} potentials, got {len(self.potentials)}"
            )
        for j, a in enumerate(self.potentials, start=1):
            if a.q != self.module.q:
                raise DimensionMismatch(f"potential {j} has size {a.q} != q = {self.module.q}")
            comp = mat_l1_norm(self.module.compress(a) - a)
            if comp > POTENTIAL_TOL:
                raise ValueError(
                    f"potential {j} is not p-compressed: ||pAp - A|| = {comp:.3e}"
                )
            if self.convention == DYNAMICAL:
                defect = mat_l1_norm(a.adjoint() + a)
                kind = "skew-adjoint"
            else:
                defect = mat_l1_norm(a.adjoint() - a)
                kind = "self-adjoint"
            if defect > POTENTIAL_TOL:
                raise ValueError(
                    f"potential {j} is not {kind} (residual {defect:.3e}) "
                    f"as the {self.convention} convention requires"
                )

    @property
    def algebra(self) -> TorusAlgebra:
        return self.module.algebra

    @property
    def n(self) -> int:
        return self.module.algebra.n

    def derivative(self, j: int, el: TorusElement) -> TorusElement:
        """The convention's coefficient derivation along axis j (1-based)."""
        if self.convention == DYNAMICAL:
            return delta_tilde(j, el)
        return delta(j, el)

    def to_obj(self):
        return {
            "convention": self.convention,
            "module": {"q": self.module.q, "p": self.module.p.to_obj()},
            "potentials": [a.to_obj() for a in self.potentials],
        }

    @classmethod
    def from_obj(cls, algebra: TorusAlgebra, obj) -> "Connection":
        mod_obj = obj["module"]
        if mod_obj.get("p") == "free":
            module = free_module(algebra, int(mod_obj["q"]))
        else:
            module = module_new(TorusMatrix.from_obj(algebra, mod_obj["p"]))
        potentials = tuple(TorusMatrix.from_obj(algebra, a) for a in obj["potentials"])
        return cls(module, obj["convention"], potentials)


def grassmannian(module: ProjectiveModule, convention: str = DYNAMICAL) -> Connection:
    """The canonical compatible connection xi -> p (entrywise derivative of xi)."""
    zero = TorusMatrix.zeros(module.algebra, module.q)
    return Connection(module, convention, tuple(zero for _ in range(module.algebra.n)))


def connection_apply(conn: Connection, j: int, xi: ModuleVector) -> ModuleVector:
    """nabla_j xi = p (D_j xi) + A_j xi with D_j the convention's derivation."""
    n = conn.n
    if not 1 <= j <= n:
        raise DimensionMismatch(f"axis {j} out of range 1..{n}")
    dxi = xi.map_components(lambda el: conn.derivative(j, el))
    return (conn.module.p @ dxi) + (conn.potentials[j - 1] @ xi)


def _apply_raw(module, potentials, deriv, j: int, xi: ModuleVector) -> ModuleVector:
    """Connection application with arbitrary potential matrices, no validation."""
    dxi = xi.map_components(lambda el: deriv(j, el))
    return (module.p @ dxi) + (potentials[j - 1] @ xi)


def check_compatibility(
    conn: Connection,
    samples: int = 5,
    seed: int = 0,
    radius: int = 1,
    scale: float = 1.0,
) -> float:
    """Max residual of the convention's pairing identity on random module vectors.

    dynamical: <nabla_j xi, eta> + <xi, nabla_j eta> - delta_tilde_j(<xi, eta>)
    spectral:  <xi, nabla_j eta> - <nabla_j xi, eta> - delta_j(<xi, eta>)
    """
    rng = np.random.default_rng(seed)
    alg = conn.algebra
    q = conn.module.q
    worst = 0.0
    for _ in range(samples):
        raw = []
        for _ in range(2):
            comps = []
            for _ in range(q):
                coeffs = {}
                for r in _box_exponents(alg.n, radius):
                    coeffs[r] = scale * complex(rng.standard_normal(), rng.standard_normal())
                comps.append(alg.element(coeffs))
            raw.append(ModuleVector(tuple(comps)))
        xi = conn.module.project_vector(raw[0])
        eta = conn.module.project_vector(raw[1])
        pairing = canonical_pairing(xi, eta)
        for j in range(1, conn.n + 1):
            nxi = connection_apply(conn, j, xi)
            neta = connection_apply(conn, j, eta)
            if conn.convention == DYNAMICAL:
                res = (
                    canonical_pairing(nxi, eta)
                    + canonical_pairing(xi, neta)
                    - delta_tilde(j, pairing)
                )
            else:
                res = (
                    canonical_pairing(xi, neta)
                    - canonical_pairing(nxi, eta)
                    - delta(j, pairing)
                )
            worst = max(worst, l1_norm(res))
    return worst


def _box_exponents(n: int, radius: int):
    if n == 0:
        yield ()
        return
    for head in range(-radius, radius + 1):
        for tail in _box_exponents(n - 1, radius):
            yield (head,) + tail


@dataclass(frozen=True)
class CurvatureForm:
    """Skew-indexed family F_{jk} = [nabla_j, nabla_k], keys (j, k) with j < k."""

    components: dict

    def component(self, j: int, k: int) -> TorusMatrix:
        """F_{jk} for any j != k, using antisymmetry below the diagonal."""
        if j < k:
            return self.components[(j, k)]
        if j > k:
            return -self.components[(k, j)]
        raise KeyError("curvature component needs j != k")

    def pairs(self):
        return sorted(self.components)


def _commutator_columns(module, potentials, deriv, j: int, k: int):
    cols = []
    for col in module.columns():
        jk = _apply_raw(module, potentials, deriv, j, _apply_raw(module, potentials, deriv, k, col))
        kj = _apply_raw(module, potentials, deriv, k, _apply_raw(module, potentials, deriv, j, col))
        cols.append(jk - kj)
    return cols


def _curvature_components(module, potentials, deriv) -> dict:
    n = module.algebra.n
    out = {}
    for j in range(1, n + 1):
        for k in range(j + 1, n + 1):
            cols = _commutator_columns(module, potentials, deriv, j, k)
            out[(j, k)] = TorusMatrix.from_columns(cols)
    return out


def curvature(conn: Connection) -> CurvatureForm:
    """Matrix form of all commutators [nabla_j, nabla_k], j < k.

    Columns of F_{jk} are the commutator applied to the module generators
    p e_1, ..., p e_q, which identifies the endomorphism with an element of
    p M_q(A) p.
    """
    deriv = delta_tilde if conn.convention == DYNAMICAL else delta
    return CurvatureForm(_curvature_components(conn.module, conn.potentials, deriv))


def ym_dynamical(conn: Connection) -> float:
    """YM(nabla) = sum_{j<k} tau_q(F_{jk}^* F_{jk}), nonnegative real."""
    if conn.convention != DYNAMICAL:
        raise ConventionError("ym_dynamical needs a dynamical-convention connection")
    f = curvature(conn)
    total = 0.0
    for jk in f.pairs():
        m = f.components[jk]
        total += tau_q(m.adjoint() @ m).real
    return total


def phi_map(conn: Connection) -> Connection:
    """Affine bijection to the spectral convention: potentials scale by -i.

    The Grassmannian parts correspond automatically because
    -i p delta_tilde_j = p delta_j.
    """
    if conn.convention != DYNAMICAL:
        raise ConventionError("phi_map takes a dynamical connection")
    return Connection(conn.module, SPECTRAL, tuple(a * (-1j) for a in conn.potentials))


def phi_inverse(conn: Connection) -> Connection:
    """Inverse of phi_map: potentials scale by i, convention back to dynamical."""
    if conn.convention != SPECTRAL:
        raise ConventionError("phi_inverse takes a spectral connection")
    return Connection(conn.module, DYNAMICAL, tuple(a * 1j for a in conn.potentials))
