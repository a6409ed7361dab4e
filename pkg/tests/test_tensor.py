import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from bundlecurv import jets
from bundlecurv.errors import (CrossCheckMismatch, MetricNotPositive, NotHermitian,
                               ShapeMismatch, SingularMetric)
from bundlecurv.tensor import (DiffConfig, MultiIndexTensor, contract, fd_derivatives,
                               hermitian_eigen, wirtinger_jet)

complexes = st.complex_numbers(max_magnitude=1.5, allow_nan=False, allow_infinity=False)


def sample_field(z):
    z1, z2 = z
    return jets.exp(z1 * jets.conj(z2)) + z1 * z1 * jets.conj(z1) - 3 * jets.log(2 + z2 * jets.conj(z2))


# -- DiffConfig ---------------------------------------------------------------

def test_diffconfig_rejects_bad_values():
    with pytest.raises(ValueError):
        DiffConfig("symbolic")
    with pytest.raises(ValueError):
        DiffConfig(fd_step=0.5)
    with pytest.raises(ValueError):
        DiffConfig(fd_step=1e-8)


# -- jets ---------------------------------------------------------------------

def test_known_derivatives_of_a_monomial():
    # f = z^2 zbar: d f = 2 z zbar, dbar f = z^2, d dbar f = 2 z
    z0 = 0.3 - 0.7j
    jet = wirtinger_jet(lambda z: z[0] ** 2 * jets.conj(z[0]), [z0], 3)
    assert_allclose(jet.derivative((1,), (0,)), 2 * z0 * np.conj(z0))
    assert_allclose(jet.derivative((0,), (1,)), z0 ** 2)
    assert_allclose(jet.derivative((1,), (1,)), 2 * z0)
    assert_allclose(jet.derivative((2,), (1,)), 2)
    assert_allclose(jet.derivative((0,), (2,)), 0)


@given(complexes, complexes)
def test_conjugate_symmetry_of_real_fields(a, b):
    # for real f, d^p dbar^q f = conj(d^q dbar^p f)
    def field(z):
        return z[0] * jets.conj(z[0]) * (1 + z[1] * jets.conj(z[1])) + \
            (z[0] * z[0] * jets.conj(z[1]) + jets.conj(z[0] * z[0]) * z[1])
    jet = wirtinger_jet(field, [a, b], 4)
    for (hol, anti), val in jet.derivs().items():
        assert_allclose(val, np.conj(jet.derivative(anti, hol)), atol=1e-10)


@given(complexes, complexes)
def test_product_rule(a, b):
    space = jets.jet_space(1, 3)
    (z,) = space.variables([a])
    f = jets.exp(z) * jets.conj(z)
    g = z * z + b * jets.conj(z)
    lhs = (f * g).d(0).value
    rhs = f.d(0).value * g.value + f.value * g.d(0).value
    assert_allclose(lhs, rhs, atol=1e-10)


def test_matrix_inverse_jet():
    space = jets.jet_space(1, 2)
    (z,) = space.variables([0.2 + 0.1j])
    A = jets.stack([2 + z * jets.conj(z), z, jets.conj(z), 3 + 0 * z], (2, 2))
    Ainv = jets.inv(A)
    prod = A @ Ainv
    assert_allclose(prod.value, np.eye(2), atol=1e-12)
    assert_allclose(prod.d(0).d(1).value, 0, atol=1e-12)


@pytest.mark.parametrize("order", [1, 2, 3, 4])
def test_modes_agree(order):
    point = [0.4 + 0.1j, -0.2 + 0.3j]
    dual = wirtinger_jet(sample_field, point, order, DiffConfig("nested-dual"))
    fd = wirtinger_jet(sample_field, point, order, DiffConfig("finite-difference"))
    for key, val in dual.derivs().items():
        assert_allclose(fd.derivs()[key], val, rtol=1e-5, atol=1e-5)
    wirtinger_jet(sample_field, point, order, DiffConfig("cross-check"))


def test_cross_check_detects_a_non_smooth_field():
    def kinked(z):
        vals = z[0] if isinstance(z[0], jets.Jet) else np.asarray(z[0])
        if isinstance(vals, jets.Jet):
            return vals * jets.conj(vals)
        return np.abs(np.real(vals)) + 0j
    with pytest.raises(CrossCheckMismatch):
        wirtinger_jet(kinked, [0.0], 2, DiffConfig("cross-check"))


def test_fd_richardson_improves_accuracy():
    f = lambda z: np.exp(np.asarray(z[0]) * 2)
    exact = 8 * np.exp(0.6)
    plain = fd_derivatives(f, [0.3], 3, DiffConfig("finite-difference", fd_step=5e-3))
    rich = fd_derivatives(f, [0.3], 3, DiffConfig("finite-difference", fd_step=5e-3, richardson=True))
    assert abs(rich[((3,), (0,))] - exact) < abs(plain[((3,), (0,))] - exact)


def test_order_limit():
    with pytest.raises(ValueError):
        wirtinger_jet(sample_field, [0, 0], 5)


# -- Hermitian eigenproblems --------------------------------------------------

def test_eigen_examples():
    w, _ = hermitian_eigen(np.eye(3))
    assert_allclose(w, [1, 1, 1])
    w, _ = hermitian_eigen(np.diag([-1.0, 2.0]))
    assert_allclose(w, [-1, 2])
    w, _ = hermitian_eigen(np.array([[1, 1.5], [1.5, 1]]))
    assert_allclose(w, [-0.5, 2.5], atol=1e-14)


def test_eigen_errors():
    with pytest.raises(NotHermitian):
        hermitian_eigen(np.array([[1, 1], [0, 1]]))
    with pytest.raises(MetricNotPositive):
        hermitian_eigen(np.eye(2), np.diag([-1.0, 2.0]))
    with pytest.raises(ShapeMismatch):
        hermitian_eigen(np.ones((2, 3)))


@given(st.integers(1, 64), st.integers(0, 2 ** 32 - 1))
def test_eigen_residual_on_random_hermitian(dim, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    M = A + A.conj().T
    B = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    N = B @ B.conj().T + dim * np.eye(dim)
    w, V = hermitian_eigen(M, N)
    res = np.linalg.norm(M @ V - N @ V * w, axis=0)
    assert np.all(res <= 1e-9 * np.linalg.norm(M, 2) * np.linalg.norm(V, axis=0) * 10 + 1e-12)
    assert np.all(np.diff(w) >= -1e-12)


# -- contraction --------------------------------------------------------------

def test_contract_example():
    psi = MultiIndexTensor(("base", "base-bar"), [[1.0]])
    out = contract([psi, psi], [(1, 2)], {0: np.array([[2.0]])}).data - psi.data
    assert_allclose(out, [[-0.5]])


def test_contract_raised_index_and_errors():
    rng = np.random.default_rng(1)
    a = MultiIndexTensor(("fiber", "fiber-bar"), rng.normal(size=(3, 3)))
    b = MultiIndexTensor(("^fiber", "base"), rng.normal(size=(3, 2)))
    out = contract([a, b], [(0, 2)])
    assert_allclose(out.data, np.einsum("ij,ik->jk", a.data, b.data))
    c = MultiIndexTensor(("^fiber",), np.ones(2))
    with pytest.raises(ShapeMismatch):
        contract([a, c], [(0, 2)])
    with pytest.raises(SingularMetric):
        contract([a, a], [(1, 2)], {0: np.diag([1.0, 1.0, 1e-15])})


def test_hermitian_partner():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    t = MultiIndexTensor(("fiber", "fiber-bar"), X + X.conj().T)
    assert t.hermitian_defect() < 1e-15
    t2 = MultiIndexTensor(("fiber", "fiber-bar"), X)
    assert t2.hermitian_defect() > 1e-3
