"""Laplacian, resolvent and holomorphic sections on the Riemann sphere.

Normalisation
-------------
The chart is ``v = tan(theta/2) e^{i phi}`` on the unit sphere, so that
``i dv ^ dvbar / (1 + |v|^2)^2`` is half the round area form.  With
``omega = k omega_FS`` and ``omega_FS = i dd-bar log(1 + |v|^2)`` the metric
coefficient is ``g = k / (1 + |v|^2)^2`` and the round Laplace-Beltrami
operator is ``(1 + |v|^2)^2 d dbar``.  Hence

    Box = -g^{-1} d dbar = -(1/k) Delta_round,

whose eigenvalues are ``l (l + 1) / k`` with multiplicity ``2l + 1``.  The
basis functions are ``sqrt(2/k) Y_lm``, orthonormal for the area of
``omega`` (total mass ``2 pi k``).  :class:`SphereBasis` checks this
normalisation on construction by applying ``Box`` through jets to explicit
low-degree harmonics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.special

from .. import jets
from ..errors import BadTruncation, SpectrumValidationFailed
from ..report import VerificationReport
from .base import SpectralBasis, operator_apply, resolvent_apply


def _harmonics_in_chart(v):
    """Explicit harmonics of degree 1 and 2 as functions of ``v`` (jets allowed)."""
    vb = jets.conj(v)
    q = 1 + v * vb
    xy = 2 * v / q
    z = (1 - v * vb) / q
    return [(1, z), (1, xy), (2, 3 * z * z - 1), (2, xy * z), (2, xy * xy)]


def chart_laplacian(fn, v, k):
    """``Box f = -(1 + |v|^2)^2 / k  d dbar f`` at chart points ``v`` via jets."""
    v = np.asarray(v, dtype=complex)
    space = jets.jet_space(1, 2)
    x = space.variables(v[None])[0]
    f = fn(x)
    if not isinstance(f, jets.Jet):
        return np.zeros_like(v)
    return -(1 + np.abs(v) ** 2) ** 2 / k * f.d(0).d(1).value


class SphereBasis(SpectralBasis):
    """Spherical-harmonic eigenbasis of ``Box`` for ``omega = k omega_FS``.

    Parameters
    ----------
    k : int
        Degree of the line bundle whose curvature is the metric.
    l_max : int
        Highest degree kept; at least 4.
    ntheta, nphi : int, optional
        Gauss-Legendre nodes in ``cos theta`` and uniform nodes in ``phi``;
        default ``l_max + 1`` and ``2 l_max + 2`` (exact for products of two
        band-limited functions).
    """

    fiber = "sphere"

    def __init__(self, k, l_max, ntheta=None, nphi=None):
        if k < 1:
            raise ValueError("k must be a positive integer")
        if l_max < 4:
            raise BadTruncation("l_max must be at least 4")
        self.k = k
        self.l_max = l_max
        self.ntheta = ntheta or l_max + 1
        self.nphi = nphi or 2 * l_max + 2
        x, wx = np.polynomial.legendre.leggauss(self.ntheta)
        self.theta1d = np.arccos(x)
        self.phi1d = 2 * np.pi * np.arange(self.nphi) / self.nphi
        self._wx = wx
        self.theta, self.phi = np.meshgrid(self.theta1d, self.phi1d, indexing="ij")
        self.v = np.tan(self.theta / 2) * np.exp(1j * self.phi)
        self.weights = (k / 2) * wx[:, None] * (2 * np.pi / self.nphi) * np.ones((1, self.nphi))

        L = l_max
        ls = np.arange(L + 1)
        ms = np.arange(-L, L + 1)
        lg, mg = np.meshgrid(ls, ms, indexing="ij")
        valid = np.abs(mg) <= lg
        P = np.zeros((L + 1, 2 * L + 1, self.ntheta))
        vals = scipy.special.sph_harm_y(lg[valid][:, None], mg[valid][:, None],
                                        self.theta1d[None, :], 0.0)
        P[valid] = np.real(vals)
        self._P = P
        self.valid = valid
        self.degrees = lg
        self.orders = mg
        self.eigenvalues = np.where(valid, lg * (lg + 1) / k, 0.0)
        self._validate()

    # -- transforms ------------------------------------------------------
    def analysis(self, f):
        f = np.asarray(f)
        F = np.fft.fft(f, axis=1) * (2 * np.pi / self.nphi)
        cols = np.mod(np.arange(-self.l_max, self.l_max + 1), self.nphi)
        Fm = F[:, cols]                                   # (ntheta, 2L+1)
        c = np.einsum("t,lmt,tm->lm", self._wx, self._P, Fm)
        return c * np.sqrt(self.k / 2)

    def synthesis(self, c):
        G = np.einsum("lm,lmt->tm", c, self._P) * np.sqrt(2 / self.k)
        H = np.zeros((self.ntheta, self.nphi), dtype=complex)
        cols = np.mod(np.arange(-self.l_max, self.l_max + 1), self.nphi)
        np.add.at(H, (slice(None), cols), G)
        return np.fft.ifft(H, axis=1) * self.nphi

    def function(self, l, m):
        """Grid values of the orthonormal eigenfunction ``sqrt(2/k) Y_lm``."""
        c = np.zeros(self.eigenvalues.shape, dtype=complex)
        c[l, m + self.l_max] = 1.0
        return self.synthesis(c)

    def gram_error(self, count=25):
        """Max deviation from the identity of the Gram matrix of the first modes."""
        idx = [(l, m) for l in range(self.l_max + 1) for m in range(-l, l + 1)][:count]
        F = np.array([self.function(l, m).ravel() for l, m in idx])
        W = self.weights.ravel()
        gram = (F * W) @ F.conj().T
        return float(np.max(np.abs(gram - np.eye(len(idx)))))

    def _validate(self):
        pts = self.v[self.ntheta // 4: 3 * self.ntheta // 4: 3, ::7].ravel()
        for idx, (l, _) in enumerate(_harmonics_in_chart(0.5 + 0.25j)):
            def f(x, idx=idx):
                return _harmonics_in_chart(x)[idx][1]
            lap = chart_laplacian(f, pts, self.k)
            vals = np.array([_harmonics_in_chart(p)[idx][1] for p in pts])
            err = np.max(np.abs(lap - l * (l + 1) / self.k * vals)) / max(1.0, np.max(np.abs(vals)))
            if err > 1e-9:
                raise SpectrumValidationFailed(
                    f"Box does not act as l(l+1)/k on degree-{l} harmonics (error {err:.2e})")
        err = self.gram_error(min(25, (self.l_max + 1) ** 2))
        if err > 1e-8:
            raise SpectrumValidationFailed(f"eigenfunctions are not orthonormal (error {err:.2e})")


def build_sphere_basis(k, l_max=48, **kw):
    return SphereBasis(k, l_max, **kw)


def quadrature_eigenvalue(basis, fn):
    """Rayleigh quotient ``<Box f, f> / <f, f>`` with ``Box f`` from jets on the grid."""
    lap = chart_laplacian(fn, basis.v, basis.k)
    f = np.vectorize(lambda x: complex(fn(x)))(basis.v)
    return complex(basis.inner(lap, f) / basis.inner(f, f)).real


# ---------------------------------------------------------------------------
# sections
# ---------------------------------------------------------------------------

@dataclass
class SphereSections:
    """Polynomials of degree ``<= degree`` as sections of ``O(degree)``.

    Pointwise norms use the weight ``(1 + |v|^2)^{-degree}``.
    """

    basis: SphereBasis
    degree: int

    def __post_init__(self):
        v = self.basis.v
        self.monomials = np.array([v ** j for j in range(self.degree + 1)])
        self.weight = (1 + np.abs(v) ** 2) ** (-self.degree)
        M = self.monomials.reshape(self.degree + 1, -1)
        W = (self.basis.weights * self.weight).ravel()
        self.gram = (M * W) @ M.conj().T

    def values(self, coeffs):
        return np.tensordot(np.asarray(coeffs), self.monomials, axes=(0, 0))

    def norm2(self, coeffs):
        """Pointwise ``|u|^2`` on the grid."""
        return np.abs(self.values(coeffs)) ** 2 * self.weight

    def random(self, rng):
        """Random section normalised to sup-norm 1."""
        a = rng.normal(size=self.degree + 1) + 1j * rng.normal(size=self.degree + 1)
        return a / np.sqrt(np.max(self.norm2(a)))

    def bergman_density(self):
        """``sum |s_j|^2`` over an orthonormal basis; constant by symmetry."""
        L = np.linalg.cholesky(self.gram)
        C = np.linalg.inv(L).conj()  # rows give orthonormal combinations
        return sum(self.norm2(C[j]) for j in range(self.degree + 1))


def sphere_sections(basis, degree):
    return SphereSections(basis, degree)


def section_bound_check(basis, sections, trials=50, seed=42, tol=1e-6):
    """Pointwise ``Box |u|^2 <= c |u|^2`` and ``(1+Box)^{-1}|u|^2 >= |u|^2/(1+c)``.

    ``c = sections.degree / basis.k`` is the trace of the curvature of the
    section bundle against the metric: 1 for sections of ``O(k)`` with the
    metric of ``O(k)``, 2 for ``O(2m)`` with the metric of ``O(m)``.  Sections
    are normalised to sup-norm 1, so ``tol`` is absolute.
    """
    c = sections.degree / basis.k
    rng = np.random.default_rng(seed)
    worst_box = np.inf
    worst_res = np.inf
    for _ in range(trials):
        a = sections.random(rng)
        F = sections.norm2(a)
        boxF = operator_apply(basis, F)
        RF = resolvent_apply(basis, F)
        worst_box = min(worst_box, float(np.min(c * F - boxF)))
        worst_res = min(worst_res, float(np.min(RF - F / (1 + c))))
    margin = min(worst_box, worst_res) + tol
    return VerificationReport(
        "section_bound_check", {"box_margin": worst_box, "resolvent_margin": worst_res},
        {"bound": 1.0 / (1 + c)}, tol, margin, "derived",
        inputs={"k": basis.k, "l_max": basis.l_max, "degree": sections.degree,
                "trials": trials, "seed": seed})


def positivity_check(basis, trials=100, seed=42, degree=12, tol=1e-6):
    """``(1 + Box)^{-1}`` maps random ``f = |p|^2 >= 0`` to nonnegative functions.

    ``p`` is a random combination of eigenfunctions of degree ``<= degree``,
    so ``f`` is band-limited to ``2 degree <= l_max``.
    """
    if 2 * degree > basis.l_max:
        raise BadTruncation("2 * degree must not exceed l_max")
    rng = np.random.default_rng(seed)
    mask = basis.valid & (basis.degrees <= degree)
    worst = np.inf
    for _ in range(trials):
        c = np.where(mask, rng.normal(size=mask.shape) + 1j * rng.normal(size=mask.shape), 0)
        p = basis.synthesis(c)
        f = np.abs(p) ** 2
        Rf = resolvent_apply(basis, f)
        worst = min(worst, float(np.min(Rf) / np.max(np.abs(f))))
    return VerificationReport("resolvent_positivity", worst, 0.0, tol, worst + tol, "derived",
                              inputs={"k": basis.k, "l_max": basis.l_max, "trials": trials,
                                      "seed": seed, "degree": degree})


def corollary_resolvent_check(basis, sections, terms=4, trials=20, seed=42, tol=1e-6):
    """Integrated form of the resolvent bound for nonnegative combinations.

    For ``F = sum lambda_i |q_i|^2`` with ``lambda_i >= 0`` checks
    ``int ((1+Box)^{-1} F) F >= int F^2 / (1 + c)`` with ``c`` as in
    :func:`section_bound_check`.
    """
    c = sections.degree / basis.k
    rng = np.random.default_rng(seed)
    worst = np.inf
    for _ in range(trials):
        F = sum(rng.uniform() * sections.norm2(sections.random(rng)) for _ in range(terms))
        RF = resolvent_apply(basis, F)
        ratio = np.real(basis.inner(RF, F)) / np.real(basis.inner(F, F))
        worst = min(worst, float(ratio))
    bound = 1.0 / (1 + c)
    return VerificationReport("corollary_resolvent_check", worst, bound, tol, worst - bound + tol,
                              "derived", inputs={"k": basis.k, "degree": sections.degree,
                                                 "trials": trials, "seed": seed})
