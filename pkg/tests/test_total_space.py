import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from bundlecurv import catalog
from bundlecurv.bundle import BaseMetric, BundleMetric
from bundlecurv.errors import BadGenus, NotGriffithsNegative
from bundlecurv.total_space import (GridSpec, assemble_omega, decomposition_check, dG_norm,
                                    dG_norm_check, potential_crosscheck, primitive_check,
                                    ricci_report, tautological_pairing, teichmuller_ricci_bound,
                                    total_curvature, vertical_block)

OMEGA_ENTRIES = ["flat", "o_minus_one", "poincare", "subbundle_rank2"]
CURVATURE_ENTRIES = OMEGA_ENTRIES + ["gauss"]


def pair(name):
    e = catalog.get(name)
    return BundleMetric.from_catalog(name), BaseMetric(e.base_potential, e.base_dim)


def points(name, count, seed=0):
    return catalog.get(name).sample_points(np.random.default_rng(seed), count)


# -- Omega blocks -------------------------------------------------------------

def test_omega_example():
    G, g = pair("o_minus_one")
    b = assemble_omega(G, g, ([0.0], [1.0]))
    assert_allclose(b.base, [[2.0]], atol=1e-14)
    assert_allclose(b.fiber, [[1.0]], atol=1e-14)


@pytest.mark.parametrize("name", OMEGA_ENTRIES)
def test_omega_on_zero_section_is_base_metric(name):
    G, g = pair(name)
    for z, v in points(name, 3):
        b = assemble_omega(G, g, (z, np.zeros_like(v)))
        assert_allclose(b.base, g.g(z), atol=1e-12)
        assert_allclose(b.fiber, G(z), atol=1e-12)


def test_flat_bundle_gives_base_metric_everywhere():
    G, g = pair("flat")
    for z, v in points("flat", 4):
        assert_allclose(assemble_omega(G, g, (z, v)).base, g.g(z), atol=1e-12)


def test_positive_bundle_is_rejected():
    G, g = pair("gauss")
    with pytest.raises(NotGriffithsNegative):
        assemble_omega(G, g, ([0.1], [1.0]))


@pytest.mark.parametrize("name", [e.name for e in catalog.entries("bundle")])
def test_decomposition_and_potential(name):
    G, g = pair(name)
    for p in points(name, 5):
        assert decomposition_check(G, p).status == "PASS"
        assert potential_crosscheck(G, g, p).status == "PASS"


# -- |dG|^2 = G ---------------------------------------------------------------

@pytest.mark.parametrize("name,z,v,oracle", [
    ("o_minus_one", 0.0, 0.0, 0.0),
    ("o_minus_one", 0.0, 2.0, 4.0),
    ("gauss", 1 + 1j, 3.0, 9 * math.exp(-2.0)),
])
def test_dG_norm_examples(name, z, v, oracle):
    G, g = pair(name)
    frame, coord, val = dG_norm(G, g, ([z], [v]))
    assert_allclose([frame, coord, val], oracle, atol=1e-8 * max(1, oracle))
    assert dG_norm_check(G, g, ([z], [v])).status == "PASS"


@given(st.complex_numbers(max_magnitude=0.6), st.complex_numbers(max_magnitude=1.5),
       st.complex_numbers(max_magnitude=1.5))
def test_dG_norm_property_rank2(z1, v1, v2):
    G, g = pair("subbundle_rank2")
    r = dG_norm_check(G, g, ([z1, 0.3 * z1], [v1, v2]))
    assert r.details["discrepancy"] <= 1e-8


# -- primitive ------------------------------------------------------------------

def test_primitive_flat():
    G, g = pair("flat")
    assert primitive_check(G, g).status == "PASS"


def test_primitive_o_minus_one_sublevel_set():
    G, g = pair("o_minus_one")
    r = primitive_check(G, g, grid=GridSpec())
    assert r.status == "PASS"
    assert r.value["max_dG_norm2"] < 4.0


def test_primitive_rejects_wrong_beta():
    G, g = pair("o_minus_one")

    def beta(zs):
        zs = np.asarray(zs, dtype=complex)
        return np.array([0.5 * zs[0]]), np.array([0.0 * zs[0]])
    r = primitive_check(G, g, beta=beta)
    assert r.status == "FAIL"
    assert "precondition" in r.message


# -- curvature ------------------------------------------------------------------

@pytest.mark.parametrize("name", CURVATURE_ENTRIES)
def test_frame_curvature_matches_potential(name):
    G, g = pair(name)
    for p in points(name, 5, seed=7):
        c = total_curvature(G, g, p)
        assert c.discrepancy <= 1e-5
        assert np.max(np.abs(vertical_block(c))) <= 1e-9
        assert c.kahler_defect <= 1e-9


def test_vertical_horizontal_example():
    G, g = pair("o_minus_one")
    c = total_curvature(G, g, ([0.0], [1.0]))
    assert_allclose(c.frame[1, 1, 0, 0], -0.5, atol=1e-12)


def test_tautological_example():
    G, g = pair("o_minus_one")
    t = tautological_pairing(G, g, ([0.0], [1.0]), [1.0])
    assert abs(t.value + 0.5) <= 1e-8
    assert abs(t.via_frame + 0.5) <= 1e-8


@given(st.sampled_from(["o_minus_one", "poincare", "subbundle_rank2"]),
       st.integers(0, 2 ** 31), st.floats(0.05, 1.0))
def test_tautological_pairing_sign(name, seed, scale):
    G, g = pair(name)
    rng = np.random.default_rng(seed)
    (z, v), = catalog.get(name).sample_points(rng, 1)
    v = v / max(np.linalg.norm(v), 1e-3) * scale
    xi = rng.normal(size=G.n) + 1j * rng.normal(size=G.n)
    t = tautological_pairing(G, g, (z, v), xi)
    assert t.nonpositive
    assert t.strictly_negative
    assert abs(t.value - t.via_frame) <= 1e-10 * t.scale


def test_tautological_zero_on_flat_bundle():
    G, g = pair("flat")
    t = tautological_pairing(G, g, ([0.3], [1.2]), [1.0])
    assert abs(t.value) <= 1e-12


# -- Ricci ----------------------------------------------------------------------

@pytest.mark.parametrize("z", [0.0, 0.2 - 0.4j])
def test_ricci_poincare_tangent(z):
    G, g = pair("poincare")
    r = ricci_report(G, g, ([z], [0.0]))
    assert r.status == "PASS"
    assert_allclose(r.value, -2.0, atol=1e-6)
    assert r.details["tangent"]


def test_ricci_cross_check_off_zero_section():
    G, g = pair("subbundle_rank2")
    r = ricci_report(G, g, ([0.1, 0.2j], [0.5, -0.3j]))
    assert r.details["blocks_vs_potential"] <= 1e-6
    assert not r.details["tangent"]


def test_teichmuller_bound():
    assert teichmuller_ricci_bound(2) == -1 / math.pi
    with pytest.raises(BadGenus):
        teichmuller_ricci_bound(1)
