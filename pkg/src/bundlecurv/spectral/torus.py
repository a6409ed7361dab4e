"""Elliptic curves ``C / (Z + tau Z)`` with the theta line bundle.

Points are written ``w = s + t tau`` with ``(s, t)`` in the unit square.  The
weight is ``phi = 2 pi y^2 / T`` with ``y = Im w`` and ``T = Im tau``, so
``phi_{w wbar} = pi / T`` and the fiber area of ``i dd-bar phi`` is ``2 pi``.
Integrals of ``(1, 0)``-forms use ``i dw ^ dwbar = 2 T ds dt``.

The single holomorphic section is
``theta(w) = sum_m exp(pi i m^2 tau + 2 pi i m w)``, with
``h(tau) = int |theta|^2 e^{-phi} = sqrt(2 T)``.

Two eigenbases are provided:

* :class:`TorusBasis`, Fourier modes for the scalar Laplacian
  ``-g^{-1} d dbar`` with eigenvalues ``pi |k2 - k1 tau|^2 / T``;
* :class:`MagneticBasis`, Landau levels for ``dbar dbar^*`` on ``L``-valued
  ``(0, 1)``-forms.  With ``a = d_wbar`` and
  ``a^+ = -(T/pi)(d_w - phi_w)`` one has ``[a, a^+] = 1`` and the operator
  is ``a a^+ = 1 + a^+ a``; the level ``j`` functions ``(a^+)^j theta`` have
  eigenvalue ``1 + j``.
"""

from __future__ import annotations

import numpy as np

from .. import jets
from ..errors import (BadTruncation, EmptySubspace, QuadratureNotConverged,
                      SpectrumValidationFailed)
from ..report import VerificationReport, discrepancy_report
from ..tensor import DiffConfig, fd_derivatives
from .base import SpectralBasis, resolvent_apply
from .family import FiberFamily, geodesic_curvature, kodaira_spencer

THETA_TERMS = 12
TORUS_BOX = 32
GRID = 128
CONVERGENCE_TOL = 1e-5


def _tau(tau):
    tau = complex(tau)
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half plane")
    return tau


def torus_grid(tau, n):
    """Grid ``w = s + t tau`` on the unit square with ``n x n`` nodes."""
    s = np.arange(n) / n
    S, Tt = np.meshgrid(s, s, indexing="ij")
    return S, Tt, S + Tt * tau


def theta_weight(tau, w):
    """``phi = 2 pi (Im w)^2 / Im tau``."""
    return 2 * np.pi * np.imag(w) ** 2 / tau.imag


def _hermite_like(level, T):
    """Polynomials ``Q_j(u)``, ``j <= level``, from ``Q_{j+1} = -2 i u Q_j + (i T / 2 pi) Q_j'``."""
    P = np.polynomial.polynomial
    out = [np.array([1.0 + 0j])]
    for _ in range(level):
        q = out[-1]
        nxt = P.polyadd(-2j * P.polymulx(q), 1j * T / (2 * np.pi) * P.polyder(q))
        out.append(np.asarray(nxt, dtype=complex))
    return out


def _horner(coeffs, u):
    out = 0 * u + coeffs[-1]
    for c in coeffs[-2::-1]:
        out = out * u + c
    return out


def landau_function(tau, w, level, terms=THETA_TERMS):
    """``(a^+)^level theta`` at ``w`` (numbers, arrays or jets)."""
    tau = _tau(tau)
    T = tau.imag
    Q = _hermite_like(level, T)[level]
    y = (w - jets.conj(w)) * (-0.5j)
    total = 0
    for m in range(-terms, terms + 1):
        e = jets.exp(np.pi * 1j * m * m * tau + 2j * np.pi * m * w)
        total = total + e * _horner(Q, y + m * T)
    return total


def theta(tau, w, terms=THETA_TERMS):
    return landau_function(tau, w, 0, terms)


# ---------------------------------------------------------------------------
# direct image
# ---------------------------------------------------------------------------

def _gram_once(tau, n, terms):
    _, _, w = torus_grid(tau, n)
    th = theta(tau, w, terms)
    dens = np.abs(th) ** 2 * np.exp(-theta_weight(tau, w))
    return float(2 * tau.imag * np.mean(dens))


def direct_image_gram(tau, n=GRID, terms=THETA_TERMS, tol=CONVERGENCE_TOL):
    """``h(tau) = int |theta|^2 e^{-phi} i dw ^ dwbar`` by periodic quadrature.

    Raises
    ------
    QuadratureNotConverged
        If doubling the grid changes ``h`` by more than ``tol`` relative.
    """
    tau = _tau(tau)
    h = _gram_once(tau, n, terms)
    h2 = _gram_once(tau, 2 * n, terms)
    if abs(h2 - h) > tol * abs(h2):
        raise QuadratureNotConverged(
            f"theta Gram changed by {abs(h2 - h) / abs(h2):.2e} under grid refinement")
    return h2


def gram_curvature(tau, n=GRID, terms=THETA_TERMS, cfg=DiffConfig("finite-difference")):
    """``Theta = -d dbar log h`` at ``tau`` by finite differences of the Gram."""
    tau = _tau(tau)

    def logh(coords):
        taus = np.atleast_1d(coords[0])
        return np.array([np.log(direct_image_gram(t, n, terms)) for t in taus])

    d = fd_derivatives(logh, [tau], 2, cfg)
    return float(-np.real(d[((1,), (1,))]))


# ---------------------------------------------------------------------------
# eigenbases
# ---------------------------------------------------------------------------

class TorusBasis(SpectralBasis):
    """Fourier eigenbasis of the scalar Laplacian for ``i dd-bar phi``.

    Modes ``e^{2 pi i (k1 s + k2 t)} / sqrt(2 pi)`` with ``|k1|, |k2| <= box``.
    """

    fiber = "torus"

    def __init__(self, tau, box=TORUS_BOX, n=None):
        self.tau = _tau(tau)
        self.box = box
        self.n = n or 2 * box + 2
        if self.n < 2 * box + 1:
            raise BadTruncation("grid too small for the mode box")
        self.s, self.t, self.w = torus_grid(self.tau, self.n)
        self.weights = np.full((self.n, self.n), 2 * np.pi / self.n ** 2)
        k = np.arange(-box, box + 1)
        k1, k2 = np.meshgrid(k, k, indexing="ij")
        self.k1, self.k2 = k1, k2
        self.eigenvalues = np.pi * np.abs(k2 - k1 * self.tau) ** 2 / self.tau.imag
        self._cols = np.mod(k, self.n)

    def analysis(self, f):
        F = np.fft.fft2(np.asarray(f)) / self.n ** 2
        return F[np.ix_(self._cols, self._cols)] * np.sqrt(2 * np.pi)

    def synthesis(self, c):
        H = np.zeros((self.n, self.n), dtype=complex)
        H[np.ix_(self._cols, self._cols)] = c
        return np.fft.ifft2(H) * self.n ** 2 / np.sqrt(2 * np.pi)

    def mode(self, k1, k2):
        return np.exp(2j * np.pi * (k1 * self.s + k2 * self.t)) / np.sqrt(2 * np.pi)


class MagneticBasis(SpectralBasis):
    """Landau levels ``0..levels`` for ``dbar dbar^*`` on the theta bundle.

    Inner products carry the weight ``e^{-phi}`` and ``i dw ^ dwbar``.  On
    construction the operator is applied through jets of ``phi`` (from the
    catalog expression) and compared with ``1 + j``.
    """

    fiber = "torus-theta"

    def __init__(self, tau, levels=8, n=GRID, terms=THETA_TERMS, validate=True):
        self.tau = _tau(tau)
        self.levels = levels
        self.n = n
        self.terms = terms
        T = self.tau.imag
        _, _, self.w = torus_grid(self.tau, n)
        self.phi = theta_weight(self.tau, self.w)
        self.weights = 2 * T / n ** 2 * np.exp(-self.phi)
        raw = np.array([landau_function(self.tau, self.w, j, terms) for j in range(levels + 1)])
        norms = np.sqrt(np.real(np.einsum("jab,ab,jab->j", raw, self.weights, raw.conj())))
        self.norms2 = norms ** 2
        self.functions = raw / norms[:, None, None]
        self.eigenvalues = 1.0 + np.arange(levels + 1)
        if validate:
            self.validate()

    def analysis(self, f):
        return np.einsum("ab,ab,jab->j", np.asarray(f), self.weights, self.functions.conj())

    def synthesis(self, c):
        return np.tensordot(c, self.functions, axes=(0, 0))

    def gram_error(self):
        G = np.einsum("iab,ab,jab->ij", self.functions, self.weights, self.functions.conj())
        return float(np.max(np.abs(G - np.eye(self.levels + 1))))

    def apply_operator_jets(self, level, points):
        """``a a^+`` applied to level ``level`` at ``points`` via jets of ``phi``."""
        fam = FiberFamily.from_catalog("theta_family")
        pts = np.asarray(points, dtype=complex)
        space = jets.jet_space(1, 2)
        (w,) = space.variables(pts[None])
        phi = fam.field([self.tau, w])
        psi = landau_function(self.tau, w, level, self.terms)
        c = 1.0 / phi.d(0).d(1).value
        adag = (psi.d(0) - phi.d(0) * psi) * (-c)
        return adag.d(1).value, psi.value

    def validate(self, tol=1e-6):
        err = self.gram_error()
        if err > 1e-8:
            raise SpectrumValidationFailed(f"Landau functions are not orthonormal (error {err:.2e})")
        pts = self.w[:: max(1, self.n // 8), :: max(1, self.n // 8)].ravel()
        for j in range(self.levels + 1):
            out, psi = self.apply_operator_jets(j, pts)
            scale = np.max(np.abs(psi))
            res = np.max(np.abs(out - (1 + j) * psi)) / scale
            if res > tol:
                raise SpectrumValidationFailed(
                    f"level {j} is not an eigenfunction with eigenvalue {1 + j} (residual {res:.2e})")


# ---------------------------------------------------------------------------
# curvature of the direct image
# ---------------------------------------------------------------------------

def _family_fields(tau, w):
    fam = FiberFamily.from_catalog("theta_family")
    pts = np.stack([np.full(w.shape, tau).ravel(), w.ravel()])
    c = geodesic_curvature(fam, pts)[0, 0].reshape(w.shape)
    mu = kodaira_spencer(fam, pts)[0][0].reshape(w.shape)
    return c, mu


def berndtsson_curvature(tau, u=1.0, basis=None, levels=8):
    """``<Theta u, u>`` from the fiber integral formula.

    ``<Theta u, u> = int c(phi) |u|^2 e^{-phi} + <(1 + Box)^{-1} mu u, mu u>``
    for ``u`` a multiple of theta, with ``Box`` diagonalised by
    :class:`MagneticBasis` (validated on construction).

    Returns
    -------
    float
    """
    tau = _tau(tau)
    if basis is None:
        basis = MagneticBasis(tau, levels)
    if u == 0:
        return 0.0
    section = u * theta(tau, basis.w, basis.terms)
    c, mu = _family_fields(tau, basis.w)
    first = np.real(np.sum(basis.weights * c * np.abs(section) ** 2))
    f = mu * section
    Rf = resolvent_apply(basis, f)
    return float(first + np.real(basis.inner(Rf, f)))


def berndtsson_check(tau, tol=1e-3, levels=8):
    """Fiber-integral curvature against ``-d dbar log h`` times ``h``."""
    tau = _tau(tau)
    value = berndtsson_curvature(tau, levels=levels)
    h = direct_image_gram(tau)
    oracle = gram_curvature(tau) * h
    disc = abs(value - oracle) / abs(oracle)
    return discrepancy_report("berndtsson_vs_gram", value, oracle, disc, tol, "derived",
                              inputs={"tau": tau, "levels": levels},
                              details={"h": h, "closed_form": h / (8 * tau.imag ** 2)})


def sigma_estimate(basis, f, floor=1e-12):
    """Smallest eigenvalue carrying weight in the expansion of ``f``.

    Raises
    ------
    EmptySubspace
        If ``f`` vanishes.
    """
    nf = basis.norm(f)
    if nf <= 1e-14:
        raise EmptySubspace("the Kodaira-Spencer image is zero")
    c, _ = basis.project(f)
    w = np.abs(c) ** 2 / nf ** 2
    return float(np.min(basis.eigenvalues[w > floor]))


def nakano_bound_check(tau, levels=8):
    """Margin ``<Theta u, u> - (1/3 + 1/(1 + sigma)) |mu u|^2`` for theta.

    The margin is ``-h / (12 T^2)`` in closed form, so the record is
    report-only.
    """
    tau = _tau(tau)
    basis = MagneticBasis(tau, levels)
    section = theta(tau, basis.w, basis.terms)
    _, mu = _family_fields(tau, basis.w)
    f = mu * section
    sigma = sigma_estimate(basis, f)
    q = berndtsson_curvature(tau, basis=basis)
    a2 = basis.norm(f) ** 2
    margin = q - (1 / 3 + 1 / (1 + sigma)) * a2
    h = basis.norms2[0]
    return VerificationReport("nakano_bound_theta", margin, -h / (12 * tau.imag ** 2), 0.0, margin,
                              "derived", inputs={"tau": tau, "levels": levels},
                              details={"sigma": sigma, "Q": q, "iota_norm2": a2},
                              report_only=True)


def theta_gram_report(tau, oracle, tol=1e-8):
    h = direct_image_gram(tau)
    return discrepancy_report("theta_gram", h, oracle, abs(h - oracle), tol, "derived",
                              inputs={"tau": tau})
