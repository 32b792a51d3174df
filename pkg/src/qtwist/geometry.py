"""Single-chart quaternionic manifolds, almost complex structures and Nijenhuis tensors.

Fields are plain callables taking a :class:`~qtwist.dual.Dual` point and
returning Dual arrays, so one evaluation yields a value together with a
directional derivative.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import dual as dn
from .config import TOL
from .errors import StructureError, TypeMismatch
from .parallel import pmap
from .quaternion import EmbeddingPoint


def lattice(lo, hi, resolution: int) -> np.ndarray:
    """Axis-aligned grid, first coordinate slowest."""
    axes = [np.linspace(a, b, resolution) for a, b in zip(lo, hi)]
    return np.array(list(itertools.product(*axes)))


@dataclass
class QuaternionicChart:
    n: int
    lo: np.ndarray
    hi: np.ndarray
    fields: Callable  # Dual point -> (I, J, K) Dual matrices
    name: str = ""
    validate: bool = True

    def __post_init__(self):
        self.lo = np.asarray(self.lo, dtype=float)
        self.hi = np.asarray(self.hi, dtype=float)
        if self.validate:
            worst = max(self.relation_residual(x) for x in lattice(self.lo, self.hi, 3))
            if worst > TOL.relations:
                raise StructureError(f"{self.name}: quaternion relations fail (residual {worst:.3e})")

    @property
    def dim_r(self) -> int:
        return 4 * self.n

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x) -> bool:
        x = np.asarray(x)
        return x.shape == (self.dim_r,) and bool(np.all(x >= self.lo - 1e-12) and np.all(x <= self.hi + 1e-12))

    def structure(self, x) -> np.ndarray:
        """Stacked (3, d, d) values of I, J, K at ``x``."""
        return np.array([dn.value(a) for a in self.fields(dn.Dual(np.asarray(x, dtype=float)))])

    def structure_jvp(self, x, v):
        out = self.fields(dn.Dual.variable(x, v))
        return np.array([dn.value(a) for a in out]), np.array([dn.derivative(a) for a in out])

    def structure_jacobian(self, x):
        """Values (3, d, d) and derivatives (d, 3, d, d), derivative index first."""
        d = self.dim_r
        ders = []
        vals = None
        for k in range(d):
            vals, der = self.structure_jvp(x, np.eye(d)[k])
            ders.append(der)
        return vals, np.array(ders)

    def relation_residual(self, x) -> float:
        i, j, k = self.structure(x)
        eye = np.eye(self.dim_r)
        terms = [i @ i + eye, j @ j + eye, k @ k + eye, i @ j - k, j @ i + k]
        return max(float(np.abs(t).max()) for t in terms)

    def lattice(self, resolution: int) -> np.ndarray:
        return lattice(self.lo, self.hi, resolution)


def fd_jacobian(f, x, h: float = TOL.fd_step) -> np.ndarray:
    """Central differences of a Dual-evaluable field, derivative index first."""
    x = np.asarray(x, dtype=float)
    out = []
    for k in range(len(x)):
        e = np.zeros_like(x)
        e[k] = h
        fp = _as_value(f(dn.Dual(x + e)))
        fm = _as_value(f(dn.Dual(x - e)))
        out.append((fp - fm) / (2 * h))
    return np.array(out)


def dual_jacobian(f, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.array([_as_der(f(dn.Dual.variable(x, np.eye(len(x))[k]))) for k in range(len(x))])


def _as_value(out):
    if isinstance(out, tuple):
        return np.array([dn.value(o) for o in out])
    return dn.value(out)


def _as_der(out):
    if isinstance(out, tuple):
        return np.array([dn.derivative(o) for o in out])
    return dn.derivative(out)


def smoothness_defect(f, x, h: float = TOL.fd_step) -> float:
    """Relative gap between dual-number and finite-difference Jacobians."""
    a = dual_jacobian(f, x)
    b = fd_jacobian(f, x, h)
    return float(np.abs(a - b).max() / max(1.0, np.abs(a).max()))


# ---------------------------------------------------------------- structures


@dataclass
class AlmostComplexStructure:
    dim: int
    field: Callable  # Dual point -> Dual (dim, dim) matrix
    name: str = ""
    lo: Optional[np.ndarray] = None
    hi: Optional[np.ndarray] = None

    def __call__(self, x) -> np.ndarray:
        return dn.value(self.field(dn.Dual(np.asarray(x, dtype=float))))

    def jacobian(self, x):
        """J(x) and dJ with dJ[k] the partial derivative along coordinate k."""
        x = np.asarray(x, dtype=float)
        ders = []
        val = None
        for k in range(self.dim):
            out = self.field(dn.Dual.variable(x, np.eye(self.dim)[k]))
            val = out.val
            ders.append(out.der)
        return np.asarray(val), np.array(ders)

    def square_residual(self, x) -> float:
        j = self(x)
        return float(np.abs(j @ j + np.eye(self.dim)).max())

    def negated(self) -> "AlmostComplexStructure":
        f = self.field
        return AlmostComplexStructure(self.dim, lambda p: -f(p), f"-{self.name}", self.lo, self.hi)


def combine(fields, u):
    i, j, k = fields
    return u[0] * i + u[1] * j + u[2] * k


def induced_acs(M: QuaternionicChart, p) -> AlmostComplexStructure:
    """M_I: the structure u.x I + u.y J + u.z K for the embedding p."""
    u = p.u_vec if isinstance(p, EmbeddingPoint) else np.asarray(p, dtype=float)
    u = tuple(float(t) for t in u)
    return AlmostComplexStructure(
        M.dim_r, lambda x: combine(M.fields(x), u), f"{M.name}@u={np.round(u, 6).tolist()}", M.lo, M.hi
    )


# ---------------------------------------------------------------- vector fields


@dataclass
class VectorField:
    dim: int
    components: Callable  # Dual point -> Dual vector

    def __call__(self, x) -> np.ndarray:
        return dn.value(self.components(dn.Dual(np.asarray(x, dtype=float))))

    def scaled(self, f: Callable) -> "VectorField":
        c = self.components
        return VectorField(self.dim, lambda p: f(p) * c(p))


def constant_field(v) -> VectorField:
    v = np.asarray(v)
    return VectorField(len(v), lambda p: dn.Dual(v))


def apply_acs(J: AlmostComplexStructure, X: VectorField) -> VectorField:
    return VectorField(X.dim, lambda p: J.field(p) @ X.components(p))


def directional(f: Callable, x, v):
    out = f(dn.Dual.variable(x, v))
    return dn.derivative(out)


def lie_bracket(X: VectorField, Y: VectorField, x) -> np.ndarray:
    """[X, Y] = DY[X] - DX[Y] at ``x``."""
    x = np.asarray(x, dtype=float)
    return directional(Y.components, x, X(x)) - directional(X.components, x, Y(x))


def nijenhuis_bracket(J: AlmostComplexStructure, X: VectorField, Y: VectorField, x) -> np.ndarray:
    """N(X,Y) = [JX,JY] - J[JX,Y] - J[X,JY] - [X,Y]."""
    jx, jy = apply_acs(J, X), apply_acs(J, Y)
    jm = J(x)
    return (
        lie_bracket(jx, jy, x)
        - jm @ lie_bracket(jx, Y, x)
        - jm @ lie_bracket(X, jy, x)
        - lie_bracket(X, Y, x)
    )


def nijenhuis_from_jacobian(j: np.ndarray, dj: np.ndarray) -> np.ndarray:
    """N[c, a, b] = N(e_a, e_b)^c for constant coordinate fields."""
    return (
        np.einsum("ka,kcb->cab", j, dj)
        - np.einsum("kb,kca->cab", j, dj)
        + np.einsum("cm,bma->cab", j, dj)
        - np.einsum("cm,amb->cab", j, dj)
    )


def nijenhuis_tensor(J: AlmostComplexStructure, x) -> np.ndarray:
    j, dj = J.jacobian(x)
    return nijenhuis_from_jacobian(j, dj)


def contract(n: np.ndarray, X, Y) -> np.ndarray:
    return np.einsum("cab,a,b->c", n, X, Y)


# ---------------------------------------------------------------- form-based tensor


def form_10(J: AlmostComplexStructure, beta: Callable) -> Callable:
    """(1,0)-form field beta o (1 - iJ)/2 from a real covector field ``beta``."""
    eye = np.eye(J.dim)

    def alpha(p):
        return beta(p) @ ((eye - 1j * J.field(p)) * 0.5)

    return alpha


def vector_01(J: AlmostComplexStructure, w: VectorField) -> VectorField:
    """(0,1) field (1 + iJ) w / 2 from a real field ``w``."""
    eye = np.eye(J.dim)
    return VectorField(J.dim, lambda p: ((eye + 1j * J.field(p)) * 0.5) @ w.components(p))


def _pairing(alpha: Callable, X: VectorField) -> Callable:
    return lambda p: alpha(p) @ X.components(p)


def nijenhuis_form(J: AlmostComplexStructure, alpha: Callable, X: VectorField, Y: VectorField, x) -> complex:
    """(d alpha)^{0,2}(X, Y) for a (1,0)-form ``alpha`` and (0,1) fields X, Y."""
    x = np.asarray(x, dtype=float)
    jm = J(x)
    a = dn.value(alpha(dn.Dual(x)))
    scale = max(1.0, float(np.abs(a).max()))
    if np.abs(a @ jm - 1j * a).max() > TOL.relations * scale:
        raise TypeMismatch("alpha is not of type (1,0)")
    for name, v in (("X", X), ("Y", Y)):
        vv = v(x)
        if np.abs(jm @ vv + 1j * vv).max() > TOL.relations * max(1.0, float(np.abs(vv).max())):
            raise TypeMismatch(f"{name} is not of type (0,1)")
    xv, yv = X(x), Y(x)
    ay = directional(_pairing(alpha, Y), x, xv)
    ax = directional(_pairing(alpha, X), x, yv)
    return complex(ay - ax - a @ lie_bracket(X, Y, x))


def form_bracket_ratio(J: AlmostComplexStructure, alpha, X: VectorField, Y: VectorField, x) -> complex:
    """nijenhuis_form / alpha(N(X, Y)) with N extended complex-bilinearly."""
    x = np.asarray(x, dtype=float)
    n = contract(nijenhuis_tensor(J, x), X(x), Y(x))
    a = dn.value(alpha(dn.Dual(x)))
    return nijenhuis_form(J, alpha, X, Y, x) / complex(a @ n)


# ---------------------------------------------------------------- scans


@dataclass
class ScanReport:
    structure_id: str
    grid_spec: dict
    max_norm: float
    argmax_point: list
    tolerance: float
    per_point: list = field(repr=False, default_factory=list)

    @property
    def passed(self) -> bool:
        return self.max_norm < self.tolerance

    def to_json(self) -> dict:
        return {
            "structure_id": self.structure_id,
            "grid_spec": self.grid_spec,
            "max_norm": self.max_norm,
            "argmax_point": self.argmax_point,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


def nijenhuis_max_norm(J: AlmostComplexStructure, x) -> float:
    n = nijenhuis_tensor(J, x)
    return float(np.linalg.norm(n, axis=0).max())


def integrability_scan(
    J: AlmostComplexStructure, grid, tolerance: float = TOL.vanish, grid_spec: Optional[dict] = None
) -> ScanReport:
    """Max of |N(e_a, e_b)| over grid points and coordinate pairs."""
    grid = np.asarray(grid, dtype=float)
    values = pmap(lambda x: nijenhuis_max_norm(J, x), grid)
    k = int(np.argmax(values))
    spec = grid_spec or {"points": len(grid)}
    return ScanReport(J.name, spec, float(values[k]), grid[k].tolist(), tolerance, [float(v) for v in values])
