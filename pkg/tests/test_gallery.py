import numpy as np
import pytest

from qtwist.errors import InversionFailure
from qtwist.gallery import GALLERY, _phi, get_entry, invert_phi, listing, perturbed, pushforward
from qtwist.geometry import induced_acs, integrability_scan


@pytest.mark.parametrize("eid", list(GALLERY))
def test_expectation_matches_scan(eid):
    e = get_entry(eid)
    grid = e.chart.lattice(3)
    norms = [integrability_scan(induced_acs(e.chart, u), grid).max_norm for u in ([1, 0, 0], [0, 0, 1])]
    if e.expected_hypercomplex:
        assert max(norms) < 1e-8
    else:
        assert min(norms) > 1e-3
    assert all(e.chart.contains(p) for p in e.probe_points)


def test_unknown_entry():
    with pytest.raises(KeyError):
        get_entry("torus")


def test_listing_fields():
    rows = listing()
    assert [r["id"] for r in rows] == list(GALLERY)
    for r in rows:
        assert set(r) >= {"id", "dimension", "expected_hypercomplex", "probe_points"}


def test_pushforward_is_non_constant():
    M = pushforward(0.1).chart
    a, b = M.structure(np.zeros(4)), M.structure(np.full(4, 0.3))
    assert np.abs(a - b).max() > 1e-2


def test_invert_phi_round_trip(rng):
    for y in rng.uniform(-0.4, 0.4, size=(20, 4)):
        assert np.abs(_phi(invert_phi(y, 0.1), 0.1) - y).max() < 1e-12


def test_invert_phi_failure():
    with pytest.raises(InversionFailure):
        invert_phi(np.full(4, 1e6), 0.2)


def test_parameter_ranges():
    with pytest.raises(ValueError):
        pushforward(0.5)
    with pytest.raises(ValueError):
        perturbed(0.9)


def test_perturbed_gate_escalates():
    e = perturbed(1e-4)
    assert e.params["eps"] > e.params["requested_eps"]
    assert not e.expected_hypercomplex
    assert perturbed(0.0).expected_hypercomplex


def test_zero_parameter_reduces_to_flat():
    x = np.array([0.3, -0.1, 0.2, 0.1])
    from qtwist.gallery import flat

    assert np.array_equal(pushforward(0.0).chart.structure(x), flat(1).chart.structure(x))
    assert np.array_equal(perturbed(0.0).chart.structure(x), flat(1).chart.structure(x))


@pytest.mark.parametrize("eid", ["pushforward01", "perturbed03"])
def test_relations_pointwise(eid, rng):
    M = get_entry(eid).chart
    assert max(M.relation_residual(rng.uniform(M.lo, M.hi)) for _ in range(100)) < 1e-10
