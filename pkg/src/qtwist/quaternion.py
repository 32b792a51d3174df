"""Quaternions, the complexified algebra H (x) C, and embeddings C -> H.

An algebra embedding ``I: C -> H`` is determined by the unit imaginary
quaternion ``u = I(sqrt(-1))``.  The set of such ``u`` is a 2-sphere, which
is identified with CP^1 two ways here:

* algebraically, through the maximal right ideal annihilating ``1`` in
  ``H_I`` (``H`` with complex structure left multiplication by ``u``);
  under :func:`matrix_iso` the ideal is ``{A : w A = 0}`` for a row vector
  ``w`` in C^2, and ``[w]`` is a point of CP^1;
* by a fixed stereographic chart ``zeta``, with ``zeta = 0 -> u = i`` and
  ``zeta = oo -> u = -i``.

The two agree through the linear relation ``zeta = sqrt(-1) * w1 / w0``,
so the chart is holomorphic for the complex structure carried by ideals.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import dual as dn
from .config import TOL
from .errors import DegenerateKernel, QTwistError


@dataclass(frozen=True)
class Quaternion:
    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, a) -> "Quaternion":
        w, x, y, z = (float(t) for t in a)
        return cls(w, x, y, z)

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.w + other.w, self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return self + (-other)

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return q_mul(self, other)
        return Quaternion(self.w * other, self.x * other, self.y * other, self.z * other)

    def __rmul__(self, other):
        return self * other

    def conj(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm(self) -> float:
        return math.sqrt(self.w**2 + self.x**2 + self.y**2 + self.z**2)

    def inverse(self) -> "Quaternion":
        return self.conj() * (1.0 / self.norm() ** 2)

    def left_matrix(self) -> np.ndarray:
        """Real 4x4 matrix of v -> self * v in the basis (1, i, j, k)."""
        return left_mult_matrix(self.w, self.x, self.y, self.z)

    def right_matrix(self) -> np.ndarray:
        """Real 4x4 matrix of v -> v * self."""
        return right_mult_matrix(self.w, self.x, self.y, self.z)


ONE = Quaternion(1.0)
QI = Quaternion(0.0, 1.0)
QJ = Quaternion(0.0, 0.0, 1.0)
QK = Quaternion(0.0, 0.0, 0.0, 1.0)
BASIS = (ONE, QI, QJ, QK)


def q_mul(p: Quaternion, q: Quaternion) -> Quaternion:
    """Hamilton product, ij = k, jk = i, ki = j."""
    return Quaternion(
        p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
        p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
        p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
        p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
    )


def left_mult_matrix(w, x, y, z):
    """Matrix of left multiplication by w + xi + yj + zk.

    Entries may be plain floats or :class:`~qtwist.dual.Dual` scalars; in the
    latter case a Dual matrix is returned.
    """
    rows = [
        [w, -x, -y, -z],
        [x, w, -z, y],
        [y, z, w, -x],
        [z, -y, x, w],
    ]
    if any(isinstance(e, dn.Dual) for row in rows for e in row):
        return dn.array(rows)
    return np.array(rows, dtype=float)


def right_mult_matrix(w, x, y, z):
    rows = [
        [w, -x, -y, -z],
        [x, w, z, -y],
        [y, -z, w, x],
        [z, y, -x, w],
    ]
    if any(isinstance(e, dn.Dual) for row in rows for e in row):
        return dn.array(rows)
    return np.array(rows, dtype=float)


@dataclass(frozen=True)
class ComplexifiedQuaternion:
    """``re + im * s`` where ``s`` is the central complexification unit."""

    re: Quaternion = ONE
    im: Quaternion = Quaternion()

    def __mul__(self, other: "ComplexifiedQuaternion") -> "ComplexifiedQuaternion":
        return ComplexifiedQuaternion(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __add__(self, other: "ComplexifiedQuaternion") -> "ComplexifiedQuaternion":
        return ComplexifiedQuaternion(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "ComplexifiedQuaternion") -> "ComplexifiedQuaternion":
        return ComplexifiedQuaternion(self.re - other.re, self.im - other.im)

    def scale(self, c: complex) -> "ComplexifiedQuaternion":
        a, b = c.real, c.imag
        return ComplexifiedQuaternion(self.re * a - self.im * b, self.re * b + self.im * a)

    def as_complex(self) -> np.ndarray:
        """Complex 4-vector of coefficients on (1, i, j, k)."""
        return self.re.as_array() + 1j * self.im.as_array()

    @classmethod
    def from_complex(cls, c) -> "ComplexifiedQuaternion":
        c = np.asarray(c, dtype=complex)
        return cls(Quaternion.from_array(c.real), Quaternion.from_array(c.imag))

    def as_real(self) -> np.ndarray:
        return np.concatenate([self.re.as_array(), self.im.as_array()])


CQ_BASIS = tuple(ComplexifiedQuaternion(q, Quaternion()) for q in BASIS) + tuple(
    ComplexifiedQuaternion(Quaternion(), q) for q in BASIS
)

# images of 1, i, j, k
_MAT_BASIS = np.array(
    [
        np.eye(2),
        np.diag([1j, -1j]),
        np.array([[0, 1], [-1, 0]]),
        np.array([[0, 1j], [1j, 0]]),
    ],
    dtype=complex,
)


def matrix_iso(a: ComplexifiedQuaternion) -> np.ndarray:
    return np.tensordot(a.as_complex(), _MAT_BASIS, axes=1)


def matrix_iso_inverse(m) -> ComplexifiedQuaternion:
    system = _MAT_BASIS.reshape(4, 4).T
    coeffs = np.linalg.solve(system, np.asarray(m, dtype=complex).reshape(4))
    return ComplexifiedQuaternion.from_complex(coeffs)


def matrix_iso_real_map() -> np.ndarray:
    """8x8 real matrix sending (re, im) coefficients to (Re vec M, Im vec M)."""
    cols = []
    for b in CQ_BASIS:
        m = matrix_iso(b).reshape(4)
        cols.append(np.concatenate([m.real, m.imag]))
    return np.array(cols).T


# ---------------------------------------------------------------- embeddings


def is_unit_imaginary(u: Quaternion, tol: float = TOL.unit_imaginary) -> bool:
    return abs(u.w) <= tol and abs(u.x**2 + u.y**2 + u.z**2 - 1.0) <= tol


def normalize_imaginary(u) -> Quaternion:
    """Project onto the unit sphere of imaginary quaternions."""
    v = u.as_array()[1:] if isinstance(u, Quaternion) else np.asarray(u, dtype=float)[-3:]
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("zero imaginary part cannot be normalized")
    v = v / n
    return Quaternion(0.0, *v)


@dataclass(frozen=True)
class EmbeddingPoint:
    """An algebra embedding C -> H, equivalently a point of CP^1."""

    u: Quaternion
    hom: tuple = field(compare=False)
    chart_coord: Optional[complex] = field(default=None, compare=False)

    @property
    def u_vec(self) -> np.ndarray:
        return self.u.as_array()[1:]

    def chart_point(self) -> tuple[int, complex]:
        """(chart, coordinate) using chart 0 for |zeta| <= 1, chart 1 otherwise."""
        z0, z1 = self.hom
        if abs(z1) <= abs(z0):
            return 0, z1 / z0
        return 1, z0 / z1

    def zeta(self) -> complex:
        z0, z1 = self.hom
        return complex(math.inf) if z0 == 0 else z1 / z0

    def distance(self, other: "EmbeddingPoint") -> float:
        return float(np.linalg.norm(self.u_vec - other.u_vec))


def u_from_chart(a, b, chart: int = 0, conjugate: bool = False):
    """Unit imaginary coefficients (x, y, z) of u at chart coordinate a + ib.

    Works on floats and Dual scalars alike.  ``conjugate`` flips the sign of
    the imaginary part of the coordinate, giving the orientation-reversed
    identification (used only by :func:`orientation_selfcheck`).
    """
    if conjugate:
        b = -b
    r2 = a * a + b * b
    den = 1.0 + r2
    if chart == 0:
        return (1.0 - r2) / den, 2.0 * a / den, 2.0 * b / den
    if chart == 1:
        return (r2 - 1.0) / den, 2.0 * a / den, -2.0 * b / den
    raise ValueError(f"chart must be 0 or 1, got {chart}")


def _split_zeta(zeta, chart: int):
    if zeta is None or (isinstance(zeta, (float, complex)) and cmath.isinf(zeta)):
        return 1, 0j
    zeta = complex(zeta)
    if chart == 0 and abs(zeta) > 1.0:
        return 1, 1.0 / zeta
    if chart == 1 and abs(zeta) > 1.0:
        return 0, 1.0 / zeta
    return chart, zeta


def embedding_from_cp1(zeta, chart: int = 0, conjugate: bool = False) -> EmbeddingPoint:
    """Embedding at chart coordinate ``zeta`` (``None`` or ``inf`` is the pole u = -i)."""
    chart, c = _split_zeta(zeta, chart)
    x, y, z = u_from_chart(c.real, c.imag, chart, conjugate)
    u = Quaternion(0.0, x, y, z)
    if chart == 0:
        hom = (1.0 + 0j, c)
        coord = c
    else:
        hom = (c, 1.0 + 0j)
        coord = None if c == 0 else 1.0 / c
    return EmbeddingPoint(u, hom, coord)


def embedding_from_u(u) -> EmbeddingPoint:
    """Embedding with ``I(sqrt(-1)) = u``; its CP^1 point is read off the ideal."""
    u = u if isinstance(u, Quaternion) else Quaternion(0.0, *np.asarray(u, dtype=float)[-3:])
    ideal = right_ideal(u)
    hom = line_to_hom(ideal.line)
    coord = None if hom[0] == 0 else hom[1] / hom[0]
    return EmbeddingPoint(u, hom, coord)


def conj_embedding(p: EmbeddingPoint) -> EmbeddingPoint:
    """Precompose with complex conjugation: u -> -u, zeta -> -1/conj(zeta)."""
    z0, z1 = p.hom
    hom = (-np.conj(z1), np.conj(z0))
    coord = None if hom[0] == 0 else hom[1] / hom[0]
    return EmbeddingPoint(-p.u, hom, coord)


def random_embedding(rng: np.random.Generator) -> EmbeddingPoint:
    return embedding_from_u(normalize_imaginary(rng.normal(size=3)))


# ---------------------------------------------------------------- ideals


@dataclass(frozen=True)
class MaximalRightIdeal:
    line: np.ndarray  # row vector w with w A = 0 on the ideal, unit norm
    basis: tuple  # two ComplexifiedQuaternion spanning it over C

    def matrices(self) -> list[np.ndarray]:
        return [matrix_iso(b) for b in self.basis]

    def contains(self, a: ComplexifiedQuaternion) -> float:
        """Residual |w A| of ``a``; zero iff ``a`` lies in the ideal."""
        return float(np.linalg.norm(self.line @ matrix_iso(a)))


def _action_on_one(u: Quaternion) -> np.ndarray:
    """Real 4x8 matrix of a = re + im s  ->  1 . a = re + u im in H_I."""
    return np.hstack([np.eye(4), u.left_matrix()])


def right_ideal(u: Quaternion, tol: float = 1e-9) -> MaximalRightIdeal:
    """Annihilator of 1 in H_I under right multiplication by H (x) C."""
    a = _action_on_one(u)
    _, s, vt = np.linalg.svd(a)
    rank = int(np.sum(s > tol * max(s[0], 1.0)))
    kernel = vt[rank:]  # real vectors (re, im)
    cvecs = kernel[:, :4] + 1j * kernel[:, 4:]
    # complex span of the real kernel; dimension 2 iff the kernel is s-stable
    _, cs, cvt = np.linalg.svd(cvecs)
    cdim = int(np.sum(cs > tol * cs[0]))
    if kernel.shape[0] != 4 or cdim != 2:
        raise DegenerateKernel(
            f"annihilator has real dim {kernel.shape[0]} and complex dim {cdim}; expected 4 and 2"
        )
    basis = tuple(ComplexifiedQuaternion.from_complex(v) for v in cvt[:2])
    mats = np.hstack([matrix_iso(b) for b in basis])
    # left null vector of the stacked 2x4 block
    _, _, lvt = np.linalg.svd(mats.T)
    w = lvt[-1].conj()
    w = w / np.linalg.norm(w)
    return MaximalRightIdeal(w, basis)


def cp1_from_embedding(p: EmbeddingPoint) -> MaximalRightIdeal:
    if not is_unit_imaginary(p.u):
        raise QTwistError(f"u = {p.u} is not a unit imaginary quaternion")
    return right_ideal(p.u)


def line_to_hom(line) -> tuple[complex, complex]:
    """Calibrated identification of the annihilating line with [z0 : z1]."""
    w0, w1 = (complex(t) for t in line)
    if abs(w0) >= abs(w1):
        return (1.0 + 0j, 1j * w1 / w0)
    return (w0 / (1j * w1), 1.0 + 0j)


def line_angle(l1, l2) -> float:
    """Fubini-Study angle between two lines in C^2."""
    l1 = np.asarray(l1) / np.linalg.norm(l1)
    l2 = np.asarray(l2) / np.linalg.norm(l2)
    # atan2 form stays accurate for nearly equal lines, unlike arccos
    cross = abs(l1[0] * l2[1] - l1[1] * l2[0])
    return float(np.arctan2(cross, abs(np.vdot(l1, l2))))


def orientation_selfcheck(conjugate: bool = False):
    """Degree of the localization of H under the frozen chart convention.

    Returns a report dict; raises OrientationMismatch if the degree is -2.
    """
    from .hmodule import orientation_report

    return orientation_report(conjugate=conjugate)
