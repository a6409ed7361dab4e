"""Geometry of a family of one-dimensional fibers carrying a weight ``phi``.

Coordinates are ``(z_1, ..., z_n, v)`` with ``z`` on the base and ``v`` on
the fiber; ``phi`` is strictly plurisubharmonic along fibers.  Writing
``g = phi_{v vbar}`` and ``a_alpha = phi_{alpha vbar}`` the main objects are

* the geodesic curvature ``c_{alpha betabar} = phi_{alpha betabar} - a_alpha conj(a_beta) / g``,
* the horizontal lift ``delta_alpha = d_alpha - (a_alpha / g) d_v``,
* the Kodaira-Spencer coefficient ``mu_alpha = -d_vbar (a_alpha / g)``, the
  ``dvbar (x) d_v`` component of ``dbar delta_alpha``.

Since the fibers are curves, ``|mu|^2`` of a ``dvbar (x) d_v`` form does not
depend on the fiber metric.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import catalog, dsl, jets
from ..errors import BundleCurvError
from ..report import VerificationReport, discrepancy_report
from ..tensor import DiffConfig, wirtinger_jet


@dataclass
class FiberFamily:
    """Weight ``phi(z, v)`` over an ``n``-dimensional base with curve fibers."""

    ast: dsl.ExprAST
    name: str = ""

    def __post_init__(self):
        if self.ast.dims[1] != 1:
            raise BundleCurvError("fiber families have one fiber coordinate")
        self.n = self.ast.dims[0]
        self.field = dsl.as_field(self.ast)

    @classmethod
    def from_text(cls, text, base_dim=1, name=""):
        return cls(dsl.parse_expr(text, (base_dim, 1)), name)

    @classmethod
    def from_catalog(cls, name):
        entry = catalog.get(name)
        if entry.kind != "family":
            raise BundleCurvError(f"{name!r} is not a family entry")
        return cls(entry.potential_ast(), name)

    def jet(self, point, order=4):
        """Jet of ``phi`` at ``point`` of shape ``(n + 1,)`` or ``(n + 1, *batch)``."""
        point = np.asarray(point, dtype=complex)
        space = jets.jet_space(self.n + 1, order)
        out = self.field(space.variables(point))
        if not isinstance(out, jets.Jet):
            out = jets.Jet.constant(space, out)
        return out

    def __call__(self, point):
        point = np.asarray(point, dtype=complex)
        return self.field(list(point))


class _Pieces:
    """Jets of the derived quantities at a point (order 4 for ``phi``)."""

    def __init__(self, fam, point, order=4):
        self.fam = fam
        self.n = n = fam.n
        N = n + 1
        self.phi = phi = fam.jet(point, order)
        self.g = phi.d(n).d(N + n)
        ginv = jets.reciprocal(self.g)
        self.a = [phi.d(al).d(N + n) for al in range(n)]
        self.ratio = [a * ginv for a in self.a]
        self.c = [[phi.d(al).d(N + be) - self.ratio[al] * phi.d(n).d(N + be)
                   for be in range(n)] for al in range(n)]
        if order >= 3:
            self.mu = [-r.d(N + n) for r in self.ratio]

    def hessian(self):
        return self.phi.hessian()


def _as_point(point):
    p = np.asarray(point, dtype=complex)
    if p.ndim == 0:
        raise ValueError("point must list base and fiber coordinates")
    return p


def geodesic_curvature(fam, point):
    """Matrix ``c(phi)`` of shape ``(n, n)`` (plus batch axes)."""
    P = _Pieces(fam, _as_point(point), order=2)
    return np.array([[P.c[a][b].value for b in range(fam.n)] for a in range(fam.n)])


def horizontal_lift(fam, point):
    """Components of ``delta_alpha`` in the coordinate frame, shape ``(n, n + 1)``."""
    P = _Pieces(fam, _as_point(point), order=2)
    n = fam.n
    D = np.zeros((n, n + 1), dtype=complex)
    for al in range(n):
        D[al, al] = 1.0
        D[al, n] = -P.ratio[al].value
    return D


def hessian_decomposition_check(fam, point, tol=1e-7):
    """Coordinate Hessian of ``phi`` against its horizontal/vertical splitting.

    The Hessian must equal ``[[c + N g N^*, N g], [g N^*, g]]`` with
    ``N = a / g``; the right side is assembled from nested-dual jets and the
    left side is recomputed by finite differences.  Also checks
    ``i dd-bar phi (delta_alpha, conj delta_beta) = c`` and
    ``i dd-bar phi (delta_alpha, d_vbar) = 0``.
    """
    p = _as_point(point)
    n = fam.n
    P = _Pieces(fam, p, order=2)
    g = P.g.value
    Nv = np.array([r.value for r in P.ratio])
    c = np.array([[P.c[a][b].value for b in range(n)] for a in range(n)])
    rebuilt = np.zeros((n + 1, n + 1), dtype=complex)
    rebuilt[:n, :n] = c + np.outer(Nv, Nv.conj()) * g
    rebuilt[:n, n] = Nv * g
    rebuilt[n, :n] = g * Nv.conj()
    rebuilt[n, n] = g
    fd = wirtinger_jet(fam.field, p, 2, DiffConfig("finite-difference")).hessian()
    scale = max(1.0, float(np.max(np.abs(fd))))
    disc = float(np.max(np.abs(fd - rebuilt))) / scale
    H = P.hessian()
    D = horizontal_lift(fam, p)
    on_lift = D @ H @ D.conj().T
    mixed = D @ H[:, n]
    disc = max(disc, float(np.max(np.abs(on_lift - c))) / scale,
               float(np.max(np.abs(mixed))) / scale)
    return discrepancy_report("hessian_decomposition", c, rebuilt[:n, :n] - np.outer(Nv, Nv.conj()) * g,
                              disc, tol, "identity",
                              inputs={"family": fam.name or str(fam.ast), "point": p})


def kodaira_spencer(fam, point):
    """Kodaira-Spencer coefficients ``mu_alpha`` and ``sum |mu_alpha|^2``.

    Returns
    -------
    mu : ndarray, shape (n, *batch)
    norm2 : ndarray
        ``|mu(d_z1)|^2 + ... + |mu(d_zn)|^2``.
    """
    P = _Pieces(fam, _as_point(point), order=3)
    mu = np.array([m.value for m in P.mu])
    return mu, np.sum(np.abs(mu) ** 2, axis=0)


def satisfies_kahler_einstein(fam, point, tol=1e-9):
    """Whether ``phi = log phi_{v vbar}`` to second order at ``point``."""
    P = _Pieces(fam, _as_point(point), order=4)
    logg = jets.log(P.g)
    d1 = P.phi.derivs(2)
    d2 = logg.derivs(2)
    return all(abs(d1[k] - d2[k]) <= tol * max(1.0, abs(d1[k])) for k in d2)


def schumacher_identity_check(fam, point, tol=1e-6):
    """Fiberwise identity for the geodesic curvature.

    Checks ``g^{-1} d_v d_vbar c_{alpha betabar}
    = (i dd-bar log g)(delta_alpha, conj delta_beta) - mu_alpha conj(mu_beta)``.
    When ``e^phi = phi_{v vbar}`` along the fiber the right side becomes
    ``c - mu conj(mu)``, i.e. ``(Box + 1) c = |mu|^2``; that consequence is
    checked too, and reported as skipped for other weights.
    """
    p = _as_point(point)
    n = fam.n
    N = n + 1
    P = _Pieces(fam, p, order=4)
    g = P.g.value
    lhs = np.array([[P.c[a][b].d(n).d(N + n).value / g for b in range(n)] for a in range(n)])
    logg = jets.log(P.g)
    Hl = logg.hessian()
    D = horizontal_lift(fam, p)
    mu = np.array([m.value for m in P.mu])
    rhs = D @ Hl @ D.conj().T - np.outer(mu, mu.conj())
    scale = max(1.0, float(np.max(np.abs(lhs))), float(np.max(np.abs(rhs))))
    disc = float(np.max(np.abs(lhs - rhs))) / scale
    details = {"lhs": lhs, "rhs": rhs}
    c = np.array([[P.c[a][b].value for b in range(n)] for a in range(n)])
    if satisfies_kahler_einstein(fam, p):
        box_c = -lhs
        conclusion = box_c + c - np.outer(mu, mu.conj())
        details["conclusion_residual"] = float(np.max(np.abs(conclusion)))
        details["conclusion"] = "checked"
        disc = max(disc, details["conclusion_residual"] / scale)
    else:
        details["conclusion"] = "skipped: e^phi != phi_vvbar"
    return discrepancy_report("schumacher_identity", lhs, rhs, disc, tol, "identity",
                              inputs={"family": fam.name or str(fam.ast), "point": p},
                              details=details)


def geodesic_curvature_report(fam, point, oracle, tol=1e-7):
    c = geodesic_curvature(fam, point)
    disc = float(np.max(np.abs(c - np.asarray(oracle))))
    return discrepancy_report("geodesic_curvature", c, oracle, disc, tol, "derived",
                              inputs={"family": fam.name or str(fam.ast), "point": point})


def kodaira_spencer_report(fam, point, oracle, tol=1e-8):
    _, norm2 = kodaira_spencer(fam, point)
    disc = float(abs(norm2 - oracle))
    return discrepancy_report("kodaira_spencer", float(norm2), oracle, disc, tol, "derived",
                              inputs={"family": fam.name or str(fam.ast), "point": point})


def empty_report(check, message):
    return VerificationReport(check, None, None, 0.0, 0.0, "identity", message=message)
