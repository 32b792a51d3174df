import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qtwist.errors import (
    EigenspaceDimensionError,
    InconsistentStaircase,
    OrientationMismatch,
    StructureError,
    UndersampledLoop,
)
from qtwist.hmodule import (
    BundleOnCP1,
    HModule,
    Localization,
    constant_section_rank,
    degree,
    diagonal_bundle,
    direct_sum,
    fiber,
    h0_sections,
    h0_table,
    line_bundle,
    localization_bundle,
    localization_report,
    module_from_spec,
    orientation_report,
    splitting_from_h0,
    splitting_type,
    staircase,
    swapped_transition,
    v_decomposition,
)
from qtwist.quaternion import embedding_from_cp1, random_embedding

from strategies import disc_point

small_degrees = st.lists(st.integers(-3, 3), min_size=1, max_size=3)


def projector(basis):
    q, _ = np.linalg.qr(basis)
    return q @ q.conj().T


def test_module_relations_rejected():
    V = HModule.standard(1)
    with pytest.raises(StructureError):
        HModule(1, V.I_op, V.K_op, V.J_op)


def test_module_from_spec():
    assert module_from_spec("H").n == 1
    assert module_from_spec("H2").dim_r == 8
    for bad in ("", "X", "H0", "Hx"):
        with pytest.raises(ValueError):
            module_from_spec(bad)


@pytest.mark.parametrize("n", [1, 2])
def test_fiber_eigenvalues(n, rng):
    V = HModule.standard(n)
    worst = 0.0
    for _ in range(100):
        op = fiber(V, random_embedding(rng))
        ev = np.linalg.eigvals(op)
        ev = ev[np.argsort(ev.imag)]
        target = np.array([-1j] * 2 * n + [1j] * 2 * n)
        worst = max(worst, np.abs(ev - target).max(), np.abs(op @ op + np.eye(4 * n)).max())
    assert worst < 1e-10


def test_v_decomposition_at_i():
    # +i eigenspace of left multiplication by i, written out by hand on (1, i, j, k)
    plus, minus = v_decomposition(HModule.standard(1), [1.0, 0.0, 0.0])
    by_hand = np.array([[1, -1j, 0, 0], [0, 0, 1, -1j]]).T
    assert np.abs(projector(plus) - projector(by_hand)).max() < 1e-12
    assert np.abs(projector(minus) - projector(by_hand.conj())).max() < 1e-12


def test_v_decomposition_rejects_non_unit():
    with pytest.raises(EigenspaceDimensionError):
        v_decomposition(HModule.standard(1), [2.0, 0.0, 0.0])


@given(small_degrees)
@settings(max_examples=15)
def test_degree_of_diagonal(degs):
    assert degree(diagonal_bundle(degs, 128)) == sum(degs)


@given(small_degrees, small_degrees)
@settings(max_examples=15)
def test_degree_additive(a, b):
    B = direct_sum(diagonal_bundle(a, 128), diagonal_bundle(b, 128))
    assert degree(B) == degree(diagonal_bundle(a, 128)) + degree(diagonal_bundle(b, 128))


def test_degree_undersampled():
    with pytest.raises(UndersampledLoop):
        degree(line_bundle(20, 32))


@pytest.mark.parametrize("k", range(-3, 4))
def test_h0_line_bundle(k):
    # sections of O(k): polynomials of degree <= k
    assert h0_sections(line_bundle(k, 64), 0) == max(k + 1, 0)


@pytest.mark.parametrize(
    "g, expected",
    [
        (lambda z: np.diag([z**2, 1.0]), [2, 0]),
        (lambda z: np.array([[z**2, 1.0], [0.0, 1.0]]), [2, 0]),
        (lambda z: np.array([[z, 1.0], [0.0, 1 / z]]), [1, -1]),
        # the off-diagonal term glues O(-1) and O(1) into the trivial bundle
        (lambda z: np.array([[1 / z, 1.0], [0.0, z]]), [0, 0]),
    ],
)
def test_splitting_examples(g, expected):
    B = BundleOnCP1(2, g, 64)
    assert splitting_type(B) == expected


def test_splitting_from_staircase_rejects_garbage():
    with pytest.raises(InconsistentStaircase):
        splitting_from_h0({m: 1 for m in range(-2, 4)}, 1, 2)


@given(st.lists(st.integers(-2, 2), min_size=1, max_size=4))
def test_staircase_inverts(indices):
    md = 3
    h = {m: staircase(indices, m) for m in range(-md, md + 2)}
    assert splitting_from_h0(h, len(indices), md) == sorted(indices, reverse=True)


@pytest.mark.parametrize("n", [1, 2])
def test_localization_weight_one(n):
    rep = localization_report(HModule.standard(n), sample_count=128)
    assert rep["rank"] == 2 * n
    assert rep["degree"] == 2 * n
    assert rep["splitting_type"] == [1] * (2 * n)
    assert rep["h0_table"] == {"0": 4 * n, "-1": 2 * n, "-2": 0}


def test_transition_is_linear_in_zeta():
    loc = Localization(HModule.standard(1))
    c = loc.transition(1.0)
    for z in (0.5 + 0.2j, -0.9j, 0.3):
        assert np.abs(loc.transition(z) - z * c).max() < 1e-12


@given(disc_point(radius=1.5))
def test_cocycle(zeta):
    if abs(zeta) < 0.2:
        return
    B = localization_bundle(HModule.standard(1), 64)
    g = B.transition(zeta)
    assert np.abs(g @ swapped_transition(B, zeta) - np.eye(2)).max() < 1e-10


def test_sub_frame_spans_minus_eigenspace():
    V = HModule.standard(1)
    loc = Localization(V)
    for z in (0.0, 0.4 - 0.3j, 0.9j):
        y = loc.sub_frame(z)
        op = fiber(V, embedding_from_cp1(z))
        assert np.abs(op @ y + 1j * y).max() < 1e-12
        assert np.linalg.matrix_rank(y) == 2


def test_frames_are_holomorphic():
    # d/d(conj zeta) vanishes for the subbundle frame and for quotient coordinates of constants
    loc = Localization(HModule.standard(2))
    h = 1e-5
    constants = np.eye(8)
    for z in (0.2 + 0.1j, -0.5j):
        for f in (loc.sub_frame, loc.transition, lambda t: loc.quotient_coords(constants, t)):
            dx = (f(z + h) - f(z - h)) / (2 * h)
            dy = (f(z + 1j * h) - f(z - 1j * h)) / (2 * h)
            assert np.abs(0.5 * (dx + 1j * dy)).max() < 1e-8


@pytest.mark.parametrize("n", [1, 2])
def test_constant_sections(n):
    assert constant_section_rank(HModule.standard(n)) == 4 * n


@settings(max_examples=4)
@given(st.integers(0, 2**31))
def test_localization_basis_invariant(seed):
    # an isomorphic module in a random real basis has the same localization
    r = np.random.default_rng(seed)
    s = r.normal(size=(4, 4)) + 3 * np.eye(4)
    V = HModule.standard(1).conjugated(s)
    B = localization_bundle(V, 128)
    assert degree(B) == 2
    assert splitting_type(B) == [1, 1]


def test_orientation():
    assert orientation_report()["pass"]
    with pytest.raises(OrientationMismatch):
        orientation_report(conjugate=True)


def test_h0_table_of_twisted_bundle():
    B = localization_bundle(HModule.standard(1), 128)
    assert h0_table(B.twisted(1), (0,)) == {0: 6}


def test_fiber_at_i_is_left_multiplication():
    V = HModule.standard(1)
    assert np.array_equal(fiber(V, [1.0, 0.0, 0.0]), V.I_op)


@given(st.integers(0, 2**31))
@settings(max_examples=20)
def test_decomposition_is_direct_and_conjugate(seed):
    p = random_embedding(np.random.default_rng(seed))
    plus, minus = v_decomposition(HModule.standard(2), p)
    assert np.linalg.matrix_rank(np.hstack([plus, minus]), tol=1e-10) == 8
    assert np.abs(projector(plus.conj()) - projector(minus)).max() < 1e-10


@pytest.mark.parametrize(
    "g, deg",
    [(lambda z: np.diag([z, z]), 2), (lambda z: np.eye(2), 0)],
)
def test_degree_examples(g, deg):
    assert degree(BundleOnCP1(2, g, 64)) == deg


@pytest.mark.parametrize("c", [0.0, 0.5, 3.0])
def test_off_diagonal_constant_does_not_jump(c):
    # the oracle decides: H^1(O(2)) = 0, so no jump is possible and none is found
    B = BundleOnCP1(2, lambda z: np.array([[z**2, c], [0.0, 1.0]]), 64)
    assert splitting_type(B) == [2, 0]


def test_trivial_line_bundle_sections():
    assert h0_sections(line_bundle(0, 64), 0) == 1
    assert h0_sections(line_bundle(0, 64), -1) == 0
