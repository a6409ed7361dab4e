import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from bundlecurv import catalog
from bundlecurv.bundle import (BaseMetric, BundleMetric, chern_curvature, classify, gap_example,
                               griffiths_extremum, griffiths_grid_minimum, nakano_certificate,
                               nakano_operator, nehari_l2_bound)
from bundlecurv.errors import BadGenus, MetricNotPositive, NotHermitian
from bundlecurv.tensor import DiffConfig


def test_reference_curvatures():
    R = chern_curvature(BundleMetric.from_catalog("o_minus_one"), [0.0])
    assert_allclose(R.data[0, 0, 0, 0], -1.0, atol=1e-8)
    R = chern_curvature(BundleMetric.from_catalog("gauss"), [0.0])
    assert_allclose(R.data[0, 0, 0, 0], 1.0, atol=1e-8)


@pytest.mark.parametrize("z", [0.0, 0.5, 0.3 - 0.6j])
def test_o_minus_one_closed_form(z):
    R = chern_curvature(BundleMetric.from_catalog("o_minus_one"), [z])
    assert_allclose(R.data[0, 0, 0, 0], -1 / (1 + abs(z) ** 2), atol=1e-12)


def test_poincare_tangent_curvature():
    # G = 2/(1-|z|^2)^2 has d dbar log G = G, so R = -G d dbar log G = -G^2
    G = BundleMetric.from_catalog("poincare")
    z = 0.4 + 0.1j
    g = 2 / (1 - abs(z) ** 2) ** 2
    assert_allclose(chern_curvature(G, [z]).data[0, 0, 0, 0], -g ** 2, rtol=1e-10)


def test_curvature_is_hermitian_and_modes_agree():
    G = BundleMetric.from_catalog("subbundle_rank2")
    z = [0.2 + 0.1j, -0.3j]
    R = chern_curvature(G, z)
    assert R.hermitian_defect() <= 1e-10
    Rfd = chern_curvature(G, z, DiffConfig("finite-difference"))
    assert_allclose(Rfd.data, R.data, atol=1e-6)


def test_metric_validation():
    with pytest.raises(NotHermitian):
        chern_curvature(BundleMetric([["1", "z1"], ["0", "1"]], 1), [0.5])
    with pytest.raises(MetricNotPositive):
        chern_curvature(BundleMetric([["-1"]], 1), [0.0])


def test_gap_example():
    R = gap_example()
    I2 = np.eye(2)
    brute, count, _ = griffiths_grid_minimum(R, I2, I2)
    assert count >= 10 ** 6
    assert abs(brute - 0.25) <= 1e-3
    cert = griffiths_extremum(R, I2, I2)
    assert abs(cert.extremal - 0.25) <= 1e-3
    assert cert.sign == "positive"
    nak = nakano_certificate(R, I2, I2)
    assert abs(nak.extremal + 0.5) <= 1e-9
    assert nak.sign == "indefinite"


def test_nakano_operator_flattening():
    R = gap_example()
    op = nakano_operator(R, np.eye(2), np.eye(2))
    w, _ = op.eigen()
    assert_allclose(w, [-0.5, 1, 1, 2.5], atol=1e-12)


def _random_curvature(rng, n, r):
    X = rng.normal(size=(r * n, r * n)) + 1j * rng.normal(size=(r * n, r * n))
    Q = X + X.conj().T
    return Q.reshape(n, r, n, r).transpose(1, 3, 0, 2)


def _random_metric(rng, d):
    X = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return X @ X.conj().T + d * np.eye(d)


@settings(max_examples=10)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 10 ** 6))
def test_nakano_min_below_griffiths_min(n, r, seed):
    rng = np.random.default_rng(seed)
    R = _random_curvature(rng, n, r)
    g, G = _random_metric(rng, n), _random_metric(rng, r)
    nk = nakano_certificate(R, g, G)
    gr = griffiths_extremum(R, g, G, restarts=8, seed=seed)
    assert nk.extremal <= gr.extremal + 1e-9 * gr.scale
    assert nk.maximum >= gr.maximum - 1e-9 * gr.scale
    if n == 1 or r == 1:
        assert abs(nk.extremal - gr.extremal) <= 1e-9 * gr.scale
        assert abs(nk.maximum - gr.maximum) <= 1e-9 * gr.scale


@given(st.floats(0.1, 10.0), st.complex_numbers(max_magnitude=0.8))
def test_conformal_scaling(c, z):
    G = BundleMetric.from_catalog("o_minus_one")
    cG = BundleMetric([[f"{c!r}*(1 + abs2(z1))"]], 1)
    R = chern_curvature(G, [z]).data
    Rc = chern_curvature(cG, [z]).data
    assert_allclose(Rc / c, R, rtol=1e-9, atol=1e-12)
    g = np.eye(1)
    assert nakano_certificate(Rc, g, cG([z])).sign == nakano_certificate(R, g, G([z])).sign


def test_classify():
    assert classify(-2, -1) == "negative"
    assert classify(-1, 0.0) == "semi-negative"
    assert classify(-1, 1) == "indefinite"
    assert classify(0, 0) == "zero"
    assert classify(1e-10, 1) == "semi-positive"


def test_catalog_signs_match_flags():
    for entry in catalog.entries("bundle"):
        G = BundleMetric.from_catalog(entry.name)
        g = BaseMetric(entry.base_potential, entry.base_dim)
        z = np.full(entry.base_dim, 0.1 + 0.05j)
        cert = griffiths_extremum(chern_curvature(G, z), g.g(z), G(z))
        assert (cert.maximum <= 1e-8 * cert.scale) == entry.griffiths_negative


def test_nehari_bound():
    assert nehari_l2_bound(2) == 9 * math.pi
    assert nehari_l2_bound(3) == 18 * math.pi
    with pytest.raises(BadGenus):
        nehari_l2_bound(1)
    with pytest.raises(BadGenus):
        nehari_l2_bound(2.5)
