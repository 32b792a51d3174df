"""Twistor space X = M x CP^1 of a quaternionic chart, and the integrability verifier.

Points of X are handled in real coordinates ``(x, a, b)`` where
``a + ib`` is a chart coordinate on CP^1 (chart 0 around u = i, chart 1
around u = -i).  The almost complex structure is block diagonal: the
induced structure at ``u(a + ib)`` on the M block and the rotation
``(a, b) -> (-b, a)`` on the CP^1 block.
"""

from __future__ import annotations

import itertools
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import dual as dn
from .config import TOL
from .errors import ConjugatePair, FrameDegeneracy, IllConditionedFit, InconsistentVerdict
from .geometry import (
    AlmostComplexStructure,
    QuaternionicChart,
    combine,
    induced_acs,
    integrability_scan,
    nijenhuis_tensor,
)
from .hmodule import HModule, Localization
from .parallel import pmap
from .quaternion import EmbeddingPoint, conj_embedding, embedding_from_cp1, random_embedding, u_from_chart

ROTATION = np.array([[0.0, -1.0], [1.0, 0.0]])


def default_zeta_samples() -> list[complex]:
    ring = [0.7 * np.exp(2j * np.pi * k / 8) for k in range(8)]
    return ring + [0j, 0.35 + 0j, 1.4j, -1.1 + 0j]


ZETA_PRESETS = {
    "default": default_zeta_samples,
    "dense16": lambda: [0.6 * np.exp(2j * np.pi * k / 8) for k in range(8)]
    + [1.2 * np.exp(2j * np.pi * (k + 0.5) / 8) for k in range(8)],
}


@dataclass(frozen=True)
class TwistorPoint:
    x: tuple
    zeta: complex
    chart: int = 0

    @classmethod
    def at(cls, x, zeta) -> "TwistorPoint":
        """Point with a CP^1 coordinate, placed in chart 1 when |zeta| > 1."""
        zeta = complex(zeta)
        if abs(zeta) > 1.0:
            return cls(tuple(np.asarray(x, dtype=float)), 1.0 / zeta, 1)
        return cls(tuple(np.asarray(x, dtype=float)), zeta, 0)

    def coords(self) -> np.ndarray:
        return np.concatenate([np.asarray(self.x, dtype=float), [self.zeta.real, self.zeta.imag]])

    def embedding(self) -> EmbeddingPoint:
        return embedding_from_cp1(self.zeta, self.chart)


class _FieldCache:
    """Memoizes base-chart field evaluations keyed on the Dual seed."""

    def __init__(self, fields, maxsize: int = 4096):
        self.fields = fields
        self.maxsize = maxsize
        self.store: OrderedDict = OrderedDict()
        self.lock = threading.Lock()

    def __call__(self, p):
        p = dn.lift(p)
        key = (p.val.tobytes(), p.der.tobytes(), p.der.dtype.str)
        with self.lock:
            hit = self.store.get(key)
            if hit is not None:
                self.store.move_to_end(key)
                return hit
        out = self.fields(p)
        with self.lock:
            self.store[key] = out
            if len(self.store) > self.maxsize:
                self.store.popitem(last=False)
        return out


class TwistorACS:
    def __init__(self, base: QuaternionicChart):
        self.base = base
        self.n = base.n
        self.dim = base.dim_r + 2
        self._fields = _FieldCache(base.fields)

    def field(self, chart: int):
        d = self.base.dim_r

        def f(p):
            p = dn.lift(p)
            u = u_from_chart(p[d], p[d + 1], chart)
            m_block = combine(self._fields(p[:d]), u)
            return dn.block_diag(m_block, ROTATION)

        return f

    def acs(self, chart: int = 0) -> AlmostComplexStructure:
        return AlmostComplexStructure(self.dim, self.field(chart), f"twistor({self.base.name})[chart {chart}]")

    def operator(self, pt: TwistorPoint) -> np.ndarray:
        return self.acs(pt.chart)(pt.coords())

    def tensor(self, pt: TwistorPoint) -> np.ndarray:
        """Real Nijenhuis tensor N[c, a, b] of the twistor structure at ``pt``."""
        return nijenhuis_tensor(self.acs(pt.chart), pt.coords())


def twistor_acs(M: QuaternionicChart) -> TwistorACS:
    return TwistorACS(M)


@dataclass
class NijenhuisComponents:
    n_cp1: float
    n_1: float
    n_2: float
    point: Optional[TwistorPoint] = None


def type_projectors(op: np.ndarray):
    eye = np.eye(op.shape[0])
    return 0.5 * (eye - 1j * op), 0.5 * (eye + 1j * op)


def twistor_nijenhuis(T: TwistorACS, pt: TwistorPoint) -> NijenhuisComponents:
    """Norms of N_X on the three summands of the (0,2) decomposition.

    n_cp1: N_X paired with (1,0)-forms pulled back from CP^1.
    n_1:   the component in A^{0,1}_M (x) A^{0,1}_{CP^1}.
    n_2:   the component in A^{0,2}_M.
    """
    n = T.tensor(pt)
    p10, p01 = type_projectors(T.operator(pt))
    t = np.einsum("ci,ijk,ja,kb->cab", p10, n, p01, p01)
    m = slice(0, T.base.dim_r)
    c = slice(T.base.dim_r, T.dim)
    return NijenhuisComponents(
        float(np.linalg.norm(t[c])),
        float(np.linalg.norm(t[m][:, m, c])),
        float(np.linalg.norm(t[m][:, m, m])),
        pt,
    )


def m_block(T: TwistorACS, pt: TwistorPoint) -> np.ndarray:
    d = T.base.dim_r
    return T.tensor(pt)[:d, :d, :d]


# ---------------------------------------------------------------- twistor lines


def frozen_module(M: QuaternionicChart, m) -> HModule:
    """T_mM as an H-module, with the structure frozen at ``m``."""
    i, j, k = M.structure(m)
    return HModule(M.n, i, j, k)


@dataclass
class LineRestriction:
    """m~*N_X sampled along a twistor line in the chart-``chart`` frames.

    ``values[s, c, a, b]`` is the c-th quotient-frame coordinate of
    N(Y_a, Y_b), with Y the holomorphic frame of the -i eigenbundle.
    """

    base_point: np.ndarray
    zetas: np.ndarray
    chart: int
    values: np.ndarray

    def entries(self) -> np.ndarray:
        """(samples, entries) with one column per c and pair a < b."""
        r = self.values.shape[1]
        pairs = list(itertools.combinations(range(r), 2))
        return np.stack([self.values[:, c, a, b] for c in range(r) for a, b in pairs], axis=1)


def line_restriction(T: TwistorACS, m, zetas, chart: int = 0) -> LineRestriction:
    m = np.asarray(m, dtype=float)
    zetas = np.asarray(zetas, dtype=complex)
    loc = Localization(frozen_module(T.base, m))
    vals = []
    for z in zetas:
        cond = loc.frame_condition(z, chart)
        if cond > TOL.frame_condition:
            raise FrameDegeneracy(f"chart {chart} frame condition {cond:.3e} at zeta={z}")
        nm = m_block(T, TwistorPoint(tuple(m), complex(z), chart))
        y = loc.sub_frame(z, chart)
        ny = np.einsum("cij,ia,jb->cab", nm, y, y)
        r = y.shape[1]
        coords = loc.quotient_coords(ny.reshape(ny.shape[0], r * r), z, chart).reshape(r, r, r)
        vals.append(coords)
    return LineRestriction(m, zetas, chart, np.array(vals))


def chart_comparison(T: TwistorACS, m, zeta: complex) -> float:
    """Residual of E0 = g . E1 . (h (x) h) at one point of a twistor line."""
    m = np.asarray(m, dtype=float)
    loc = Localization(frozen_module(T.base, m))
    e0 = line_restriction(T, m, [zeta], 0).values[0]
    e1 = line_restriction(T, m, [1.0 / zeta], 1).values[0]
    g = loc.transition(zeta)
    y0 = loc.sub_frame(zeta, 0)
    y1 = loc.sub_frame(1.0 / zeta, 1)
    h = np.linalg.lstsq(y1, y0, rcond=None)[0]
    pred = np.einsum("cd,dpq,pa,qb->cab", g, e1, h, h)
    return float(np.abs(pred - e0).max() / max(1.0, np.abs(e0).max()))


@dataclass
class FitReport:
    degree_cap: int
    coefficients: np.ndarray  # (entries, degree_cap + 1), ascending powers
    residuals: np.ndarray
    lower_residuals: np.ndarray
    conjugate_residuals: np.ndarray
    scale: float
    cubic_entries: list

    @property
    def max_residual(self) -> float:
        return float(self.residuals.max(initial=0.0))

    @property
    def is_zero(self) -> bool:
        return self.scale < TOL.vanish

    @property
    def relative_residual(self) -> float:
        # data below the vanishing threshold is the zero function; report absolute residual
        return self.max_residual if self.is_zero else self.max_residual / self.scale

    @property
    def separated(self) -> bool:
        """Degree cap - 1 fits at least 10x worse on every genuinely top-degree entry."""
        return all(self.lower_residuals[k] >= 10 * self.residuals[k] for k in self.cubic_entries)

    @property
    def passed(self) -> bool:
        return self.relative_residual < TOL.fit_relative and self.separated

    def evaluate(self, z) -> np.ndarray:
        powers = np.asarray(z, dtype=complex)[..., None] ** np.arange(self.degree_cap + 1)
        return powers @ self.coefficients.T


def _vander(z, deg):
    return np.asarray(z, dtype=complex)[:, None] ** np.arange(deg + 1)


def _fit(z, data, deg):
    v = _vander(z, deg)
    cond = np.linalg.cond(v)
    if cond > TOL.fit_condition:
        raise IllConditionedFit(f"Vandermonde condition number {cond:.3e}")
    coef = np.linalg.lstsq(v, data, rcond=None)[0]
    res = np.abs(v @ coef - data).max(axis=0) if data.size else np.zeros(0)
    return coef, res


def line_polynomial_fit(zetas, data, degree_cap: int = 3) -> FitReport:
    """Least-squares fit of each column of ``data`` by a polynomial in zeta."""
    z = np.asarray(zetas, dtype=complex)
    data = np.asarray(data, dtype=complex)
    if data.ndim == 1:
        data = data[:, None]
    if len(z) < 2 * (degree_cap + 1):
        raise IllConditionedFit(f"need at least {2 * (degree_cap + 1)} samples, got {len(z)}")
    gaps = np.abs(z[:, None] - z[None, :])[np.triu_indices(len(z), 1)]
    if gaps.min() <= 0.1:
        raise IllConditionedFit(f"samples too close (min distance {gaps.min():.3f})")
    scale = float(np.abs(data).max(initial=0.0))
    coef, res = _fit(z, data, degree_cap)
    _, lower = _fit(z, data, degree_cap - 1) if degree_cap > 0 else (None, res)
    _, conj = _fit(np.conj(z), data, degree_cap)
    top = np.abs(coef[-1]) if coef.size else np.zeros(0)
    cubic = [int(k) for k in np.flatnonzero(top > TOL.fit_relative * scale)] if scale >= TOL.vanish else []
    return FitReport(degree_cap, coef.T, res, lower, conj, scale, cubic)


def four_zero_check(fit: FitReport, zeros, scale: Optional[float] = None) -> dict:
    """A polynomial of degree <= 3 vanishing at 4 distinct points is zero.

    Returns whether the fitted entries vanish at ``zeros`` and whether all
    fitted coefficients are small; ``holds`` is the implication between them.
    """
    zeros = np.asarray(zeros, dtype=complex)
    if len(zeros) < fit.degree_cap + 1:
        raise ValueError(f"need {fit.degree_cap + 1} zeros")
    gaps = np.abs(zeros[:, None] - zeros[None, :])[np.triu_indices(len(zeros), 1)]
    if gaps.min() <= 0.3:
        raise ValueError(f"zeros must be pairwise farther apart than 0.3 (got {gaps.min():.3f})")
    scale = fit.scale if scale is None else scale
    scale = max(scale, 1e-300)
    at_zeros = float(np.abs(fit.evaluate(zeros)).max(initial=0.0))
    coef = float(np.abs(fit.coefficients).max(initial=0.0))
    vanishes = at_zeros < TOL.vanish * scale
    small = coef < TOL.fit_relative * scale
    return {
        "zeros": [[float(z.real), float(z.imag)] for z in zeros],
        "max_at_zeros": at_zeros,
        "max_coefficient": coef,
        "vanishes_at_zeros": bool(vanishes),
        "coefficients_small": bool(small),
        "holds": bool(small or not vanishes),
    }


def four_zero_property(zetas, data, zeros, degree_cap: int = 3, scale: float = 1.0) -> dict:
    """Fit ``data`` and test the four-zeros implication.

    ``contradiction`` is set when the data claims the prescribed zeros but
    no nonzero polynomial of degree <= degree_cap can have them, i.e. the
    data is nonzero yet either vanishes at all zeros or cannot be fit.
    """
    fit = line_polynomial_fit(zetas, data, degree_cap)
    check = four_zero_check(fit, zeros, scale)
    data_zero = fit.scale < TOL.vanish * scale
    fits = fit.max_residual < TOL.fit_relative * max(fit.scale, scale)
    check["recovered_zero"] = bool(check["coefficients_small"] and data_zero)
    check["contradiction"] = bool(not data_zero and (not fits or check["vanishes_at_zeros"]))
    check["fit_residual"] = fit.max_residual
    return check


def line_check(T: TwistorACS, m, zetas, pair, tol_vanish: float = TOL.vanish):
    """Cubic fit of m~*N_X plus the four-zeros implication on one twistor line.

    The four candidate zeros are the embeddings in ``pair`` and their
    conjugates; N_X is evaluated there directly, in whichever chart
    contains the point.
    """
    lr = line_restriction(T, m, zetas)
    fit = line_polynomial_fit(zetas, lr.entries())
    zeros = [pair[0], pair[1], conj_embedding(pair[0]), conj_embedding(pair[1])]
    vals = [twistor_nijenhuis(T, TwistorPoint(tuple(np.asarray(m, dtype=float)), *_chart_coord(z))).n_2 for z in zeros]
    vanishes = max(vals) < tol_vanish
    check = {
        "base_point": [float(t) for t in m],
        "n2_at_zeros": vals,
        "vanishes_at_four": bool(vanishes),
        "line_vanishes": bool(fit.is_zero),
        "holds": bool(fit.is_zero or not vanishes),
        # same fit in conj(zeta): large for genuine data, flags an orientation slip
        "conjugate_fit_residual": float(fit.conjugate_residuals.max(initial=0.0)) / (1.0 if fit.is_zero else fit.scale),
    }
    return fit, check


# ---------------------------------------------------------------- theorem


def _grid_spec(M: QuaternionicChart, resolution: int) -> dict:
    return {"resolution": resolution, "lo": M.lo.tolist(), "hi": M.hi.tolist(), "points": resolution**M.dim_r}


def _chart_coord(p: EmbeddingPoint):
    chart, coord = p.chart_point()
    return complex(coord), chart


def _u_list(p: EmbeddingPoint) -> list:
    return [float(t) for t in p.u_vec]


def verify_theorem(
    M: QuaternionicChart,
    p1: EmbeddingPoint,
    p2: EmbeddingPoint,
    grid_resolution: int = 5,
    zetas=None,
    tol_vanish: float = TOL.vanish,
    tol_nonzero: float = TOL.nonzero,
    seed: int = 42,
    probe_points=None,
    example_id: str = "",
    strict: bool = True,
) -> dict:
    """Cross-check the three conditions of the hypercomplex/twistor equivalence.

    (i) integrability of M_{p1} and M_{p2}; (ii) spot check on three random
    embeddings; (iii) vanishing of N_X over grid x zeta samples.  The
    verdict is PASS when the conditions agree, all quiet or all loud, and
    the unconditional invariants (lemma components, line holomorphy) hold.
    """
    if min(p1.distance(p2), conj_embedding(p1).distance(p2)) <= 1e-6:
        raise ConjugatePair("p1 and p2 must be distinct and non-conjugate")
    zetas = list(default_zeta_samples() if zetas is None else zetas)
    grid = M.lattice(grid_resolution)
    rng = np.random.default_rng(seed)

    cond_i = max(integrability_scan(induced_acs(M, p), grid, tol_vanish).max_norm for p in (p1, p2))
    randoms = [random_embedding(rng) for _ in range(3)]
    cond_ii = max(integrability_scan(induced_acs(M, p), grid, tol_vanish).max_norm for p in randoms)

    T = twistor_acs(M)
    pts = [TwistorPoint.at(x, z) for x in grid for z in zetas]
    comps = pmap(lambda pt: twistor_nijenhuis(T, pt), pts)
    n_cp1 = max(c.n_cp1 for c in comps)
    n_1 = max(c.n_1 for c in comps)
    n_2 = max(c.n_2 for c in comps)
    i2 = int(np.argmax([c.n_2 for c in comps]))

    probes = [M.center] if probe_points is None else probe_points
    fits, checks = [], []
    for m in probes:
        fit, check = line_check(T, m, zetas, (p1, p2), tol_vanish)
        fits.append(fit)
        checks.append(check)
    max_res = max(f.relative_residual for f in fits)
    line_ok = all(f.passed for f in fits) and all(c["holds"] for c in checks)

    quiet_i = cond_i < tol_vanish
    quiet_ii = cond_ii < tol_vanish
    quiet_iii = max(n_cp1, n_1, n_2) < tol_vanish
    loud_i = cond_i > tol_nonzero
    loud_iii = n_2 > tol_nonzero
    lemmas_ok = n_cp1 < tol_vanish and n_1 < tol_vanish

    report = {
        "example_id": example_id,
        "seed": seed,
        "p1": _u_list(p1),
        "p2": _u_list(p2),
        "random_embeddings": [_u_list(p) for p in randoms],
        "grid_spec": _grid_spec(M, grid_resolution),
        "zeta_samples": [[float(z.real), float(z.imag)] for z in np.asarray(zetas, dtype=complex)],
        "cond_i": {"max": cond_i, "vanishes": bool(quiet_i)},
        "cond_ii": {"max": cond_ii, "vanishes": bool(quiet_ii)},
        "cond_iii": {"n_cp1_max": n_cp1, "n1_max": n_1, "n2_max": n_2, "vanishes": bool(quiet_iii)},
        "line_fit": {"max_deg3_residual": max_res, "four_zero_checks": checks},
        "tolerances": {"vanish": tol_vanish, "nonzero": tol_nonzero},
    }
    if (quiet_i and loud_iii) or (loud_i and quiet_iii):
        diag = dict(report, argmax_n2=list(pts[i2].coords()))
        if strict:
            raise InconsistentVerdict("conditions (i) and (iii) disagree", diag)
        report["verdict"] = "INCONSISTENT"
        return report
    agree = (quiet_i and quiet_ii and quiet_iii) or (loud_i and loud_iii)
    report["verdict"] = "PASS" if agree and lemmas_ok and line_ok else "FAIL"
    return report
