import itertools

import numpy as np
import pytest
from hypothesis import given

from qtwist.errors import DegenerateKernel, QTwistError
from qtwist.quaternion import (
    BASIS,
    CQ_BASIS,
    ComplexifiedQuaternion,
    EmbeddingPoint,
    QI,
    QJ,
    QK,
    Quaternion,
    conj_embedding,
    cp1_from_embedding,
    embedding_from_cp1,
    embedding_from_u,
    line_angle,
    matrix_iso,
    matrix_iso_inverse,
    matrix_iso_real_map,
    right_ideal,
    u_from_chart,
)

from strategies import disc_point, quat_coeffs, unit_imaginary

# multiplication table of 1, i, j, k written out by hand: (sign, index)
TABLE = {
    (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
    (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
    (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
    (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
}  # fmt: skip


def table_product(a, b):
    out = np.zeros(4)
    for p, q in itertools.product(range(4), repeat=2):
        s, r = TABLE[(p, q)]
        out[r] += s * a[p] * b[q]
    return out


def random_cq(rng):
    return ComplexifiedQuaternion.from_complex(rng.normal(size=4) + 1j * rng.normal(size=4))


def test_hamilton_table():
    for p, q in itertools.product(range(4), repeat=2):
        got = (BASIS[p] * BASIS[q]).as_array()
        assert np.array_equal(got, table_product(np.eye(4)[p], np.eye(4)[q]))


@given(quat_coeffs, quat_coeffs)
def test_product_matches_table(a, b):
    got = (Quaternion(*a) * Quaternion(*b)).as_array()
    assert np.allclose(got, table_product(a, b), atol=1e-12)


@given(quat_coeffs, quat_coeffs)
def test_left_right_matrices(a, b):
    p, q = Quaternion(*a), Quaternion(*b)
    assert np.allclose(p.left_matrix() @ q.as_array(), (p * q).as_array(), atol=1e-12)
    assert np.allclose(q.right_matrix() @ p.as_array(), (p * q).as_array(), atol=1e-12)


@given(quat_coeffs)
def test_norm_and_inverse(a):
    q = Quaternion(*a)
    if q.norm() < 1e-3:
        return
    assert np.allclose((q * q.inverse()).as_array(), [1, 0, 0, 0], atol=1e-10)
    assert np.isclose((q * q.conj()).w, q.norm() ** 2)


def test_matrix_iso_on_all_basis_products():
    # the 4x4 products named in the acceptance criterion, plus the complexified ones
    for a, b in itertools.product(CQ_BASIS, repeat=2):
        assert np.abs(matrix_iso(a * b) - matrix_iso(a) @ matrix_iso(b)).max() < 1e-12


def test_matrix_iso_random_pairs(rng):
    worst = 0.0
    for _ in range(500):
        a, b = random_cq(rng), random_cq(rng)
        worst = max(worst, np.abs(matrix_iso(a * b) - matrix_iso(a) @ matrix_iso(b)).max())
    assert worst < 1e-12


def test_matrix_iso_is_bijective(rng):
    m = matrix_iso_real_map()
    assert m.shape == (8, 8)
    assert np.linalg.cond(m) < 10
    a = random_cq(rng)
    back = matrix_iso_inverse(matrix_iso(a))
    assert np.allclose(back.as_real(), a.as_real())


def test_sqrt_minus_one_is_central():
    s = matrix_iso(ComplexifiedQuaternion(Quaternion(), BASIS[0]))
    assert np.allclose(s, 1j * np.eye(2))


@given(unit_imaginary())
def test_ideal_annihilates_one(u):
    q = Quaternion(0.0, *u)
    ideal = right_ideal(q)
    for b in ideal.basis:
        # 1 . (re + im s) = re + u im  in H with s acting as u
        assert np.abs((b.re + q * b.im).as_array()).max() < 1e-10
        assert ideal.contains(b) < 1e-10
    assert ideal.contains(ComplexifiedQuaternion()) > 0.1


@given(unit_imaginary())
def test_ideal_is_right_ideal(u):
    ideal = right_ideal(Quaternion(0.0, *u))
    for b in ideal.basis:
        for h in CQ_BASIS:
            assert ideal.contains(b * h) < 1e-10


def test_ideal_rejects_non_unit():
    with pytest.raises(DegenerateKernel):
        right_ideal(Quaternion(0.0, 2.0, 0.0, 0.0))
    with pytest.raises(QTwistError):
        cp1_from_embedding(EmbeddingPoint(Quaternion(0.0, 2.0), (1, 0)))


def test_chart_calibration():
    assert embedding_from_u(QI.as_array()[1:]).zeta() == pytest.approx(0)
    assert embedding_from_u(QJ.as_array()[1:]).zeta() == pytest.approx(1)
    assert embedding_from_u(QK.as_array()[1:]).zeta() == pytest.approx(1j)
    assert np.allclose(embedding_from_cp1(None).u_vec, [-1, 0, 0])


@given(disc_point(radius=3.0))
def test_round_trip_chart_ideal(zeta):
    p = embedding_from_cp1(zeta)
    q = embedding_from_u(p.u)
    assert line_angle(p.hom, q.hom) < 1e-10
    assert np.allclose(q.u_vec, p.u_vec, atol=1e-12)


@given(disc_point(radius=0.99))
def test_chart_overlap(zeta):
    if abs(zeta) < 0.05:
        return
    a = np.array(u_from_chart(zeta.real, zeta.imag, 0))
    w = 1 / zeta
    b = np.array(u_from_chart(w.real, w.imag, 1))
    assert np.allclose(a, b, atol=1e-12)


@given(unit_imaginary())
def test_antipode(u):
    p = embedding_from_u(u)
    c = conj_embedding(p)
    assert np.allclose(c.u_vec, -np.asarray(u))
    assert line_angle(c.hom, embedding_from_u(-np.asarray(u)).hom) < 1e-10
    z = p.zeta()
    if np.isfinite(z) and abs(z) > 1e-6:
        assert c.zeta() == pytest.approx(-1 / np.conj(z))


def test_small_products():
    assert (QI * QJ) == QK
    assert (Quaternion(1, 1) * Quaternion(1, 0, 1)).as_array().tolist() == [1, 1, 1, 1]
    assert np.allclose(matrix_iso(CQ_BASIS[0]), np.eye(2))
    assert np.allclose(matrix_iso(CQ_BASIS[1]) @ matrix_iso(CQ_BASIS[2]), matrix_iso(CQ_BASIS[3]))


def test_norm_multiplicative(rng):
    worst = 0.0
    for _ in range(100):
        p, q = (Quaternion(*(v / np.linalg.norm(v))) for v in rng.normal(size=(2, 4)))
        worst = max(worst, abs((p * q).norm() - p.norm() * q.norm()))
    assert worst < 1e-12


def test_ideal_at_i_by_hand():
    # {-i q + q s : q in H}, spanned over C by q = 1 and q = j
    ideal = right_ideal(QI)
    for q in BASIS:
        assert ideal.contains(ComplexifiedQuaternion(-1 * (QI * q), q)) < 1e-12
    li, lm = right_ideal(QI).line, right_ideal(Quaternion(0.0, -1.0)).line
    assert abs(np.vdot(li, lm)) < 1e-12
    assert line_angle(li, right_ideal(QJ).line) > 0.1


def test_stereographic_values():
    assert np.allclose(embedding_from_cp1(0).u_vec, [1, 0, 0])
    assert np.allclose(embedding_from_cp1(1).u_vec, [0, 1, 0])
    assert np.allclose(embedding_from_cp1(float("inf")).u_vec, [-1, 0, 0])


@given(disc_point(radius=3.0))
def test_antipode_in_chart(zeta):
    if abs(zeta) < 1e-3:
        return
    p = embedding_from_cp1(zeta)
    assert np.allclose(embedding_from_cp1(-1 / np.conj(zeta)).u_vec, -p.u_vec, atol=1e-12)
    twice = conj_embedding(conj_embedding(p))
    assert np.allclose(twice.u_vec, p.u_vec) and line_angle(twice.hom, p.hom) < 1e-12
