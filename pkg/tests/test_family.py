import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from bundlecurv.errors import BundleCurvError
from bundlecurv.spectral.family import (FiberFamily, geodesic_curvature, hessian_decomposition_check,
                                        horizontal_lift, kodaira_spencer, satisfies_kahler_einstein,
                                        schumacher_identity_check)

POINTS = {"theta_family": [1j, 0.3 + 0.2j], "product_family": [0.2, 0.3j],
          "disk_family": [0.1, 0.4 + 0.1j]}

COUPLED = ("abs2(v1) + 0.3*abs2(v1)^2 + abs2(z1) + 0.5*abs2(z1*v1)"
           " + 0.2*(z1*conj(v1)^2 + conj(z1)*v1^2) + 0.1*abs2(z1)*abs2(v1)^2")


def test_geodesic_curvature_examples():
    assert_allclose(geodesic_curvature(FiberFamily.from_catalog("theta_family"), [1j, 0.2]), [[0]],
                    atol=1e-12)
    assert_allclose(geodesic_curvature(FiberFamily.from_catalog("product_family"), [0.3, 0.1]),
                    [[1]], atol=1e-12)
    # weights independent of z have c = 0
    fam = FiberFamily.from_text("abs2(v1) + abs2(v1)^2")
    assert_allclose(geodesic_curvature(fam, [0.4, 0.2j]), [[0]], atol=1e-12)


@pytest.mark.parametrize("name", list(POINTS))
def test_hessian_decomposition(name):
    assert hessian_decomposition_check(FiberFamily.from_catalog(name), POINTS[name]).status == "PASS"


def test_theta_geodesic_curvature_on_a_grid():
    fam = FiberFamily.from_catalog("theta_family")
    w = np.linspace(0, 1, 5)[:, None] + 1j * np.linspace(0, 1.5, 4)[None, :]
    tau = np.full(w.shape, 0.5 + 1.5j)
    c = geodesic_curvature(fam, np.stack([tau, w]))
    assert_allclose(c, 0, atol=1e-12)


def test_kodaira_spencer():
    mu, n2 = kodaira_spencer(FiberFamily.from_catalog("theta_family"), [1j, 0.3 + 0.7j])
    assert_allclose(n2, 0.25, atol=1e-12)
    assert_allclose(mu, [0.5j], atol=1e-12)
    _, n2 = kodaira_spencer(FiberFamily.from_catalog("theta_family"), [0.2 + 2j, 0.1])
    assert_allclose(n2, 1 / 16, atol=1e-12)
    _, n2 = kodaira_spencer(FiberFamily.from_catalog("product_family"), [0.3, 0.1j])
    assert_allclose(n2, 0, atol=1e-14)


def test_horizontal_lift_is_orthogonal_to_fiber():
    fam = FiberFamily.from_text(COUPLED)
    p = [0.2 + 0.1j, -0.3 + 0.2j]
    H = fam.jet(p, 2).hessian()
    D = horizontal_lift(fam, p)
    assert_allclose(D @ H[:, 1], 0, atol=1e-12)


@pytest.mark.parametrize("name", list(POINTS))
def test_schumacher_catalog(name):
    r = schumacher_identity_check(FiberFamily.from_catalog(name), POINTS[name])
    assert r.status == "PASS"
    expected = "checked" if name == "disk_family" else "skipped"
    assert r.details["conclusion"].startswith(expected)


@given(st.complex_numbers(max_magnitude=0.5), st.complex_numbers(max_magnitude=0.5))
def test_schumacher_identity_on_coupled_weight(z, v):
    r = schumacher_identity_check(FiberFamily.from_text(COUPLED), [z, v])
    assert r.details["discrepancy"] <= 1e-6


def test_kahler_einstein_detection():
    assert satisfies_kahler_einstein(FiberFamily.from_catalog("disk_family"), [0.0, 0.3])
    assert not satisfies_kahler_einstein(FiberFamily.from_catalog("product_family"), [0.0, 0.3])


def test_family_needs_one_fiber_variable():
    from bundlecurv.dsl import parse_expr
    with pytest.raises(BundleCurvError):
        FiberFamily(parse_expr("abs2(z1)", (1, 0)))
    with pytest.raises(BundleCurvError):
        FiberFamily.from_catalog("flat")
