import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from bundlecurv.errors import BadTruncation, ProjectionResidualTooLarge
from bundlecurv.spectral.base import operator_apply, resolvent_apply
from bundlecurv.spectral.sphere import (_harmonics_in_chart, build_sphere_basis,
                                        chart_laplacian, corollary_resolvent_check,
                                        positivity_check, quadrature_eigenvalue,
                                        section_bound_check, sphere_sections)


@pytest.fixture(scope="module")
def basis():
    return build_sphere_basis(1, 24)


@pytest.fixture(scope="module")
def basis48():
    return build_sphere_basis(1, 48)


def test_truncation_limit():
    with pytest.raises(BadTruncation):
        build_sphere_basis(1, 3)


def test_eigenvalues(basis):
    for k in (1, 3):
        b = build_sphere_basis(k, 8)
        assert_allclose(b.eigenvalues[2, b.l_max], 6 / k)
        assert_allclose(b.eigenvalues[5, b.l_max + 3], 30 / k)


def test_gram_of_first_modes(basis48):
    assert basis48.gram_error(25) <= 1e-8


def test_quadrature_eigenvalue_l1(basis48):
    lam = quadrature_eigenvalue(basis48, lambda x: _harmonics_in_chart(x)[0][1])
    assert_allclose(lam, 2.0, atol=1e-8)


def test_area_is_two_pi_k():
    for k in (1, 2, 5):
        b = build_sphere_basis(k, 6)
        assert_allclose(np.sum(b.weights), 2 * np.pi * k, rtol=1e-12)


def test_jet_laplacian_matches_spectral(basis):
    # Box of an l = 2 harmonic through jets and through the eigenbasis
    f = _harmonics_in_chart(basis.v)[2][1]
    by_jets = chart_laplacian(lambda x: _harmonics_in_chart(x)[2][1], basis.v, basis.k)
    assert_allclose(operator_apply(basis, f), by_jets, atol=1e-9)


def test_projection_residual(basis):
    # a jump in phi puts weight beyond the highest kept order
    rough = np.sign(np.cos(basis.phi)) * np.sin(basis.theta)
    with pytest.raises(ProjectionResidualTooLarge):
        resolvent_apply(basis, rough)


def _random_bandlimited(basis, rng, degree):
    mask = basis.valid & (basis.degrees <= degree)
    c = np.where(mask, rng.normal(size=mask.shape) + 1j * rng.normal(size=mask.shape), 0)
    return c, basis.synthesis(c)


@settings(max_examples=15)
@given(st.integers(0, 2 ** 31))
def test_parseval(seed):
    b = build_sphere_basis(2, 12)
    c, f = _random_bandlimited(b, np.random.default_rng(seed), 12)
    assert_allclose(b.norm(f) ** 2, np.sum(np.abs(c) ** 2), rtol=1e-8)


@settings(max_examples=15)
@given(st.integers(0, 2 ** 31))
def test_resolvent_contracts_and_box_is_self_adjoint(seed):
    b = build_sphere_basis(1, 12)
    rng = np.random.default_rng(seed)
    _, f = _random_bandlimited(b, rng, 6)
    _, g = _random_bandlimited(b, rng, 6)
    assert b.norm(resolvent_apply(b, f)) <= b.norm(f) * (1 + 1e-12)
    lhs = b.inner(operator_apply(b, f), g)
    rhs = b.inner(f, operator_apply(b, g))
    assert abs(lhs - rhs) <= 1e-8 * max(1.0, abs(lhs))


def test_positivity(basis48):
    r = positivity_check(basis48, trials=20, seed=3)
    assert r.status == "PASS"


def test_bergman_density_is_constant(basis):
    s = sphere_sections(basis, 1)
    dens = s.bergman_density()
    # (degree + 1) sections over area 2 pi k
    assert_allclose(dens, 2 / (2 * np.pi), rtol=1e-10)


def test_section_bound_configurations():
    b1 = build_sphere_basis(1, 16)
    r = section_bound_check(b1, sphere_sections(b1, 1), trials=10)
    assert r.status == "PASS"
    assert_allclose(r.oracle["bound"], 0.5)
    b2 = build_sphere_basis(2, 47)
    assert (b2.ntheta, b2.nphi) == (48, 96)
    r = section_bound_check(b2, sphere_sections(b2, 4), trials=10)
    assert r.status == "PASS"
    assert_allclose(r.oracle["bound"], 1 / 3)
    assert corollary_resolvent_check(b2, sphere_sections(b2, 4), trials=5).status == "PASS"


def test_constant_norm_section_saturates_box_bound():
    # For the invariant density the resolvent is exactly F / 1: the bound holds with room
    b = build_sphere_basis(1, 8)
    s = sphere_sections(b, 1)
    F = s.bergman_density()
    assert_allclose(resolvent_apply(b, F), F, rtol=1e-10)
    assert np.all(resolvent_apply(b, F) >= F / 2)
