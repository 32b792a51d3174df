"""Concrete quaternionic charts.

* ``flat(n)``: constant left multiplication on H^n.
* ``pushforward(eps)``: the flat structure transported by a polynomial
  diffeomorphism.  Integrable structures stay integrable, so this is a
  non-constant hypercomplex example.
* ``perturbed(eps)``: the flat operators conjugated pointwise by the
  rotation v -> q v q^-1 with q = exp(eps x1 j).  Still quaternionic, and
  (after measurement) not hypercomplex.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import dual as dn
from .config import TOL
from .errors import InversionFailure, StructureError
from .geometry import QuaternionicChart, induced_acs, integrability_scan, lattice
from .quaternion import QI, QJ, QK, left_mult_matrix, right_mult_matrix


@dataclass
class GalleryEntry:
    id: str
    chart: QuaternionicChart
    expected_hypercomplex: bool
    probe_points: list
    params: dict = field(default_factory=dict)

    def describe(self) -> dict:
        return {
            "id": self.id,
            "dimension": self.chart.dim_r,
            "expected_hypercomplex": self.expected_hypercomplex,
            "probe_points": [np.asarray(p).tolist() for p in self.probe_points],
            "params": self.params,
        }


def _flat_ops(n: int):
    return [np.kron(np.eye(n), q.left_matrix()) for q in (QI, QJ, QK)]


def flat(n: int = 1) -> GalleryEntry:
    if not 1 <= n <= 2:
        raise ValueError("flat(n) supports n = 1 or 2")
    ops = _flat_ops(n)
    d = 4 * n

    def fields(p):
        return tuple(dn.Dual(a) for a in ops)

    chart = QuaternionicChart(n, -np.ones(d), np.ones(d), fields, name=f"flat{n}")
    probes = [np.zeros(d), np.full(d, 0.3), np.linspace(-0.5, 0.5, d)]
    return GalleryEntry(f"flat{n}", chart, True, probes, {"n": n})


# ---------------------------------------------------------------- pushforward


def _phi(x, eps):
    return x + eps * np.array([x[0] ** 2, x[1] * x[2], x[3] ** 2, x[0] * x[1]])


def _dphi(x, eps):
    x1, x2, x3, x4 = x[0], x[1], x[2], x[3]
    rows = [
        [1.0 + 2 * eps * x1, 0.0, 0.0, 0.0],
        [0.0, 1.0 + eps * x3, eps * x2, 0.0],
        [0.0, 0.0, 1.0, 2 * eps * x4],
        [eps * x2, eps * x1, 0.0, 1.0],
    ]
    if isinstance(x, dn.Dual):
        return dn.array(rows)
    return np.array(rows, dtype=float)


def invert_phi(y, eps: float) -> np.ndarray:
    """Newton iteration for phi(x) = y starting from x = y."""
    y = np.asarray(y, dtype=float)
    x = y.copy()
    for _ in range(TOL.newton_maxiter):
        r = _phi(x, eps) - y
        if np.abs(r).max() < TOL.newton:
            return x
        x = x - np.linalg.solve(_dphi(x, eps), r)
    if np.abs(_phi(x, eps) - y).max() < TOL.newton:
        return x
    raise InversionFailure(f"Newton iteration did not converge at y={y.tolist()}")


def pushforward(eps: float = 0.1) -> GalleryEntry:
    if not 0 <= eps <= 0.2:
        raise ValueError("pushforward requires 0 <= eps <= 0.2")
    ops = _flat_ops(1)
    src = lattice_det_check(eps)
    if src <= 0.3:
        raise StructureError(f"phi is not safely invertible (min det {src:.3f})")

    def fields(p):
        y = dn.lift(p)
        x0 = invert_phi(y.val, eps)
        jac = _dphi(x0, eps)
        # implicit function theorem: dx = Dphi(x)^-1 dy
        x = dn.Dual(x0, np.linalg.solve(jac, y.der))
        d = _dphi(x, eps)
        di = dn.inv(d)
        return tuple(d @ a @ di for a in ops)

    half = 0.4
    chart = QuaternionicChart(1, -half * np.ones(4), half * np.ones(4), fields, name=f"pushforward{eps:g}")
    probes = [np.zeros(4), np.array([0.3, -0.2, 0.1, 0.25]), np.array([-0.35, 0.35, -0.35, 0.35])]
    return GalleryEntry(_eps_id("pushforward", eps), chart, True, probes, {"eps": eps})


def lattice_det_check(eps: float, resolution: int = 5) -> float:
    pts = lattice(-0.5 * np.ones(4), 0.5 * np.ones(4), resolution)
    return float(min(np.linalg.det(_dphi(x, eps)) for x in pts))


# ---------------------------------------------------------------- perturbed


def rotation_fields(eps: float):
    ops = _flat_ops(1)

    def fields(p):
        t = eps * dn.lift(p)[0]
        c, s = dn.cos(t), dn.sin(t)
        # v -> q v q^-1 = L_q R_{conj q}; inverse is L_{conj q} R_q
        rot = left_mult_matrix(c, 0.0, s, 0.0) @ right_mult_matrix(c, 0.0, -s, 0.0)
        rot_inv = left_mult_matrix(c, 0.0, -s, 0.0) @ right_mult_matrix(c, 0.0, s, 0.0)
        return tuple(rot @ a @ rot_inv for a in ops)

    return fields


def perturbed(eps: float = 0.3, gate: bool = True, max_eps: float = 0.5) -> GalleryEntry:
    """Rotated flat structure; with ``gate`` the non-integrability is measured first.

    If the induced structures at u = i and u = k do not both show
    |N| > nonzero tolerance on the coarse lattice, eps is escalated by 1.5x
    up to ``max_eps``.
    """
    if not 0 <= eps <= max_eps:
        raise ValueError(f"perturbed requires 0 <= eps <= {max_eps}")
    requested = eps
    while True:
        chart = QuaternionicChart(1, -np.ones(4), np.ones(4), rotation_fields(eps), name=f"perturbed{eps:g}")
        if not gate or eps == 0:
            break
        grid = chart.lattice(3)
        loud = [integrability_scan(induced_acs(chart, u.as_array()[1:]), grid).max_norm for u in (QI, QK)]
        if min(loud) > TOL.nonzero:
            break
        if eps * 1.5 > max_eps:
            raise StructureError(f"perturbation stays integrable up to eps={eps}")
        eps *= 1.5
    probes = [np.zeros(4), np.array([0.5, -0.25, 0.1, 0.3]), np.array([-0.7, 0.2, 0.6, -0.4])]
    return GalleryEntry(
        _eps_id("perturbed", requested), chart, eps == 0, probes, {"eps": eps, "requested_eps": requested}
    )


def _eps_id(prefix: str, eps: float) -> str:
    return f"{prefix}{int(round(eps * 10)):02d}" if abs(eps * 10 - round(eps * 10)) < 1e-12 else f"{prefix}{eps:g}"


GALLERY = {
    "flat1": lambda: flat(1),
    "flat2": lambda: flat(2),
    "pushforward01": lambda: pushforward(0.1),
    "perturbed03": lambda: perturbed(0.3),
}


def get_entry(example_id: str) -> GalleryEntry:
    try:
        return GALLERY[example_id]()
    except KeyError:
        raise KeyError(f"unknown example {example_id!r}; known: {', '.join(GALLERY)}") from None


def listing() -> list[dict]:
    return [get_entry(k).describe() for k in GALLERY]
