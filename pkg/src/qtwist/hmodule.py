"""Left H-modules and their localization to vector bundles on CP^1.

For a module ``V`` the trivial bundle with fiber ``V (x) C`` splits at each
point ``u`` of the sphere into the +i and -i eigenspaces of the fiber
operator ``u.x I + u.y J + u.z K``.  The -i eigenspace is a holomorphic
subbundle and the +i eigenspace stands in for the holomorphic quotient.

Bundles are presented by a transition function on the unit circle.  The
convention throughout is ``c0 = g(zeta) c1``: ``g`` converts coordinates in
the frame around infinity into coordinates in the frame around zero, so
``O(k)`` has ``g = zeta**k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from .config import DEFAULT_MAX_DEGREE, DEFAULT_SAMPLE_COUNT, TOL
from .errors import (
    EigenspaceDimensionError,
    FrameDegeneracy,
    InconsistentStaircase,
    OrientationMismatch,
    RankPlateauMissing,
    StructureError,
    UndersampledLoop,
)
from .quaternion import EmbeddingPoint, QI, QJ, QK, u_from_chart


@dataclass(frozen=True)
class HModule:
    n: int
    I_op: np.ndarray
    J_op: np.ndarray
    K_op: np.ndarray

    def __post_init__(self):
        res = relation_residual(self.I_op, self.J_op, self.K_op)
        if res > 1e-12 * max(1.0, np.abs(self.I_op).max()) * 10:
            raise StructureError(f"quaternion relations violated (residual {res:.3e})")

    @property
    def dim_r(self) -> int:
        return 4 * self.n

    @classmethod
    def standard(cls, n: int = 1) -> "HModule":
        """H^n acted on by left multiplication."""
        ops = [np.kron(np.eye(n), q.left_matrix()) for q in (QI, QJ, QK)]
        return cls(n, *ops)

    def conjugated(self, s: np.ndarray) -> "HModule":
        """The isomorphic module obtained by the real change of basis ``s``."""
        si = np.linalg.inv(s)
        return HModule(self.n, s @ self.I_op @ si, s @ self.J_op @ si, s @ self.K_op @ si)

    def direct_sum(self, other: "HModule") -> "HModule":
        ops = [scipy.linalg.block_diag(a, b) for a, b in zip(self.ops, other.ops)]
        return HModule(self.n + other.n, *ops)

    @property
    def ops(self):
        return (self.I_op, self.J_op, self.K_op)


def relation_residual(i, j, k) -> float:
    eye = np.eye(i.shape[0])
    terms = [i @ i + eye, j @ j + eye, k @ k + eye, i @ j - k, j @ i + k]
    return max(float(np.abs(t).max()) for t in terms)


def module_from_spec(spec: str) -> HModule:
    """'H' -> H, 'H2' -> H^2, 'Hn' -> H^n."""
    if not spec.startswith("H"):
        raise ValueError(f"unknown module spec {spec!r}")
    rest = spec[1:]
    if rest == "":
        return HModule.standard(1)
    if not rest.isdigit() or int(rest) < 1:
        raise ValueError(f"unknown module spec {spec!r}")
    return HModule.standard(int(rest))


def _u(p) -> np.ndarray:
    if isinstance(p, EmbeddingPoint):
        return p.u_vec
    return np.asarray(p, dtype=float)


def fiber(V: HModule, p) -> np.ndarray:
    """Complex structure of the fiber of V_loc at ``p``, as a real matrix."""
    u = _u(p)
    return u[0] * V.I_op + u[1] * V.J_op + u[2] * V.K_op


def plus_projector(op: np.ndarray) -> np.ndarray:
    """Projector onto the +i eigenspace along the -i eigenspace."""
    return 0.5 * (np.eye(op.shape[0]) - 1j * op)


def _range_basis(p: np.ndarray, rank: int) -> np.ndarray:
    u, _, _ = np.linalg.svd(p)
    return u[:, :rank]


def v_decomposition(V: HModule, p) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal bases of the +i and -i eigenspaces of the fiber operator."""
    op = fiber(V, p)
    evals = np.linalg.eigvals(op)
    nplus = int(np.sum(np.abs(evals - 1j) < TOL.eigen_cluster))
    nminus = int(np.sum(np.abs(evals + 1j) < TOL.eigen_cluster))
    if nplus != 2 * V.n or nminus != 2 * V.n:
        raise EigenspaceDimensionError(
            f"eigenvalue multiplicities (+i: {nplus}, -i: {nminus}), expected {2 * V.n} each"
        )
    pp = plus_projector(op)
    pm = np.eye(op.shape[0]) - pp
    return _range_basis(pp, 2 * V.n), _range_basis(pm, 2 * V.n)


# ---------------------------------------------------------------- bundles


def equator(sample_count: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(sample_count) / sample_count)


@dataclass
class BundleOnCP1:
    rank: int
    transition: Callable[[complex], np.ndarray]
    sample_count: int = DEFAULT_SAMPLE_COUNT
    localization: Optional["Localization"] = field(default=None, repr=False)

    def sampled(self, zetas=None) -> np.ndarray:
        zetas = equator(self.sample_count) if zetas is None else zetas
        return np.array([np.atleast_2d(self.transition(z)) for z in zetas])

    def validate(self) -> None:
        dets = np.abs(np.linalg.det(self.sampled()))
        if dets.min() <= TOL.det_floor:
            raise StructureError(f"transition nearly singular on the equator (|det| = {dets.min():.3e})")

    def twisted(self, k: int) -> "BundleOnCP1":
        return BundleOnCP1(self.rank, lambda z: z**k * self.transition(z), self.sample_count)


def direct_sum(*bundles: BundleOnCP1) -> BundleOnCP1:
    def g(z):
        return scipy.linalg.block_diag(*(np.atleast_2d(b.transition(z)) for b in bundles))

    return BundleOnCP1(sum(b.rank for b in bundles), g, bundles[0].sample_count)


def line_bundle(k: int, sample_count: int = DEFAULT_SAMPLE_COUNT) -> BundleOnCP1:
    return BundleOnCP1(1, lambda z: np.array([[z**k]]), sample_count)


def diagonal_bundle(degrees, sample_count: int = DEFAULT_SAMPLE_COUNT) -> BundleOnCP1:
    degrees = list(degrees)
    return BundleOnCP1(len(degrees), lambda z: np.diag([z**d for d in degrees]), sample_count)


class Localization:
    """Holomorphic frames of the localization of ``V`` over the two charts.

    Chart 0 contains zeta = 0 (u = i); chart 1 contains zeta = oo (u = -i).
    The quotient frame on chart c is ``P+(zeta) W_c`` with ``W_c`` a fixed
    basis of the +i eigenspace at the chart center.  Since ``W_0`` is also
    the -i eigenspace at infinity, these frames are standard: the
    transition is ``zeta`` times a constant matrix.
    """

    def __init__(self, V: HModule, conjugate: bool = False):
        self.V = V
        self.conjugate = conjugate
        self.rank = 2 * V.n
        self.W = (self._center_basis(0), self._center_basis(1))

    def _center_basis(self, chart: int) -> np.ndarray:
        pp = plus_projector(self.operator(0j, chart))
        q, _, _ = scipy.linalg.qr(pp, pivoting=True)
        return q[:, : self.rank]

    def u(self, zeta: complex, chart: int = 0) -> np.ndarray:
        return np.array(u_from_chart(zeta.real, zeta.imag, chart, self.conjugate))

    def operator(self, zeta: complex, chart: int = 0) -> np.ndarray:
        return fiber(self.V, self.u(complex(zeta), chart))

    def frame(self, zeta: complex, chart: int = 0, frame_chart: Optional[int] = None) -> np.ndarray:
        """Quotient frame ``P+ W`` of chart ``frame_chart`` at the point (zeta, chart)."""
        frame_chart = chart if frame_chart is None else frame_chart
        return plus_projector(self.operator(zeta, chart)) @ self.W[frame_chart]

    def quotient_coords(self, z: np.ndarray, zeta: complex, chart: int = 0, frame_chart=None):
        """Coordinates of the class of ``z`` in V (x) C / V^{0,1} in the quotient frame."""
        f = self.frame(zeta, chart, frame_chart)
        pz = plus_projector(self.operator(zeta, chart)) @ z
        return np.linalg.lstsq(f, pz, rcond=None)[0]

    def transition(self, zeta: complex) -> np.ndarray:
        """g(zeta) with c0 = g c1, evaluated at a chart-0 coordinate."""
        return self.quotient_coords(self.W[1], zeta, 0, frame_chart=0)

    def sub_frame(self, zeta: complex, chart: int = 0) -> np.ndarray:
        """Holomorphic frame of the -i eigenbundle (the subbundle V^{0,1}).

        On chart 0 it is ``W_1 - W_0 g``: the projection of ``W_1`` onto
        V^{0,1} along the constant complement ``W_0``.
        """
        other = 1 - chart
        coeff = self.quotient_coords(self.W[other], zeta, chart)
        return self.W[other] - self.W[chart] @ coeff

    def frame_condition(self, zeta: complex, chart: int = 0) -> float:
        return float(np.linalg.cond(self.frame(zeta, chart)))


def localization_bundle(
    V: HModule, sample_count: int = DEFAULT_SAMPLE_COUNT, conjugate: bool = False
) -> BundleOnCP1:
    loc = Localization(V, conjugate)
    for z in equator(min(sample_count, 64)):
        for chart, zc in ((0, z), (1, 1.0 / z)):
            c = loc.frame_condition(zc, chart)
            if c > TOL.frame_condition:
                raise FrameDegeneracy(f"chart {chart} frame condition {c:.3e} at zeta={z}")
    return BundleOnCP1(loc.rank, loc.transition, sample_count, localization=loc)


def swapped_transition(B: BundleOnCP1, zeta: complex) -> np.ndarray:
    """Transition built with the chart roles exchanged (c1 = g' c0)."""
    loc = B.localization
    return loc.quotient_coords(loc.W[0], zeta, 0, frame_chart=1)


# ---------------------------------------------------------------- invariants


def degree(B: BundleOnCP1) -> int:
    """Winding number of det g around the unit circle."""
    dets = np.linalg.det(B.sampled())
    steps = np.angle(np.roll(dets, -1) / dets)
    worst = float(np.abs(steps).max())
    if worst >= TOL.max_arg_step:
        raise UndersampledLoop(f"argument increment {worst:.3f} >= pi/4; raise sample_count")
    return int(round(steps.sum() / (2 * np.pi)))


def _section_system(B: BundleOnCP1, twist: int, D: int) -> np.ndarray:
    r = B.rank
    zs = equator(B.sample_count)
    g = B.sampled(zs)
    powers = np.arange(D + 1)
    eye = np.eye(r)
    blocks = []
    for z, gz in zip(zs, g):
        left = np.concatenate([z**m * eye for m in powers], axis=1)
        right = np.concatenate([-(z ** (twist - m)) * gz for m in powers], axis=1)
        blocks.append(np.concatenate([left, right], axis=1))
    return np.concatenate(blocks, axis=0)


def section_spectrum(B: BundleOnCP1, twist: int, max_degree: int = DEFAULT_MAX_DEGREE):
    """Singular values of the section system for B(twist), ascending order of index."""
    D = max_degree + abs(twist) + B.rank
    a = _section_system(B, twist, D)
    return np.linalg.svd(a, compute_uv=False), a.shape[1]


def h0_sections(B: BundleOnCP1, twist: int = 0, max_degree: int = DEFAULT_MAX_DEGREE) -> int:
    """dim H^0(B (x) O(twist)) from the numerical kernel of the section system.

    Unknowns are polynomial coefficient vectors s0(zeta), s1(zeta') of degree
    at most D; the equations s0(zeta) = zeta**twist g(zeta) s1(1/zeta) are
    imposed at the equator samples.
    """
    s, ncols = section_spectrum(B, twist, max_degree)
    cutoff = TOL.sv_cutoff * s[0]
    rank = int(np.sum(s > cutoff))
    if 0 < rank < len(s) and s[rank - 1] / max(s[rank], 1e-300) < TOL.sv_gap:
        raise RankPlateauMissing(
            f"no singular value gap at twist {twist}: {s[rank - 1]:.3e} vs {s[rank]:.3e}"
        )
    return ncols - rank


def h0_table(B: BundleOnCP1, twists, max_degree: int = DEFAULT_MAX_DEGREE) -> dict[int, int]:
    return {t: h0_sections(B, t, max_degree) for t in twists}


def staircase(indices, m: int) -> int:
    return sum(max(a - m + 1, 0) for a in indices)


def splitting_from_h0(h: dict[int, int], rank: int, max_degree: int) -> list[int]:
    """Recover partial indices from h(m) = h0(B(-m)), m = -max_degree .. max_degree + 1."""
    if h[max_degree + 1] != 0:
        raise InconsistentStaircase(f"h0(B(-{max_degree + 1})) = {h[max_degree + 1]}; indices exceed max_degree")
    at_least = {m: h[m] - h[m + 1] for m in range(-max_degree, max_degree + 1)}
    at_least[max_degree + 1] = 0
    if at_least[-max_degree] != rank:
        raise InconsistentStaircase(f"staircase {h} does not account for all {rank} summands")
    indices = []
    for m in range(-max_degree, max_degree + 1):
        mult = at_least[m] - at_least[m + 1]
        if mult < 0:
            raise InconsistentStaircase(f"negative multiplicity at {m} in staircase {h}")
        indices.extend([m] * mult)
    if any(staircase(indices, m) != h[m] for m in h):
        raise InconsistentStaircase(f"indices {indices} do not reproduce staircase {h}")
    return sorted(indices, reverse=True)


def splitting_type(B: BundleOnCP1, max_degree: int = DEFAULT_MAX_DEGREE) -> list[int]:
    """Birkhoff-Grothendieck indices, largest first."""
    h = {m: h0_sections(B, -m, max_degree) for m in range(-max_degree, max_degree + 2)}
    indices = splitting_from_h0(h, B.rank, max_degree)
    if sum(indices) != degree(B):
        raise InconsistentStaircase(f"indices {indices} do not sum to degree {degree(B)}")
    return indices


def constant_section_rank(V: HModule, n_samples: int = 16) -> int:
    """Numerical rank of V (x) C -> sections, v -> class of v in the quotient."""
    loc = Localization(V)
    zs = 0.8 * equator(n_samples)
    rows = []
    for z in zs:
        rows.append(loc.quotient_coords(np.eye(V.dim_r), z, 0))
    m = np.concatenate(rows, axis=0)
    s = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(s > TOL.sv_cutoff * s[0]))


def localization_report(V: HModule, sample_count: int = DEFAULT_SAMPLE_COUNT, max_degree: int = DEFAULT_MAX_DEGREE):
    B = localization_bundle(V, sample_count)
    return {
        "rank": B.rank,
        "degree": degree(B),
        "splitting_type": splitting_type(B, max_degree),
        "h0_table": {str(t): v for t, v in h0_table(B, (0, -1, -2), max_degree).items()},
    }


def orientation_report(conjugate: bool = False, sample_count: int = DEFAULT_SAMPLE_COUNT) -> dict:
    B = localization_bundle(HModule.standard(1), sample_count, conjugate=conjugate)
    deg = degree(B)
    trivial = degree(diagonal_bundle([0, 0], sample_count))
    report = {"convention": "conjugated" if conjugate else "stereographic", "degree": deg, "trivial_degree": trivial}
    if deg == -2:
        raise OrientationMismatch(f"localization of H has degree -2 under the {report['convention']} chart")
    report["pass"] = deg == 2 and trivial == 0
    return report
