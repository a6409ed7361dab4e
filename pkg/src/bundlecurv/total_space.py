"""Kähler metric on the total space of a Griffiths-negative bundle.

A point of the total space is ``(z, v)`` with ``v`` the fiber coefficients in
the chart frame.  With ``G(z, v) = v^T G(z) conj(v)`` the metric is

    Omega = i dd-bar (psi(z) + G(z, v)),

and in the frame ``{delta/delta z^a, d/dv^i}`` it splits into the base block
``Omega_base = Psi + g`` with ``Psi[a, b] = -R[i, j, a, b] v^i conj(v^j)`` and
the fiber block ``G``.  Every routine here computes its quantity from the
frame formulas and, where possible, from the potential directly, so the two
routes check each other.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import jets
from .bundle import (BaseMetric, BundleMetric, check_metric_value, curvature_jet,
                     griffiths_extremum)
from .dsl import parse_expr, to_text
from .errors import BadGenus, CrossCheckMismatch, NotGriffithsNegative, ShapeMismatch
from .report import VerificationReport, discrepancy_report
from .tensor import DiffConfig, MultiIndexTensor, as_point, contract, fd_derivatives

ORACLE_RTOL = 1e-5


@dataclass(frozen=True)
class TotalPoint:
    z: np.ndarray
    v: np.ndarray

    @classmethod
    def of(cls, z, v):
        return cls(as_point(z), np.atleast_1d(np.asarray(v, dtype=complex)))

    @property
    def coords(self):
        return np.concatenate([self.z, self.v])


def _point(p, G):
    if not isinstance(p, TotalPoint):
        z, v = p
        p = TotalPoint.of(z, v)
    if len(p.z) != G.n or len(p.v) != G.r:
        raise ShapeMismatch(f"point has dims ({len(p.z)}, {len(p.v)}), bundle has ({G.n}, {G.r})")
    return p


@dataclass(frozen=True)
class FrameDecomposition:
    """Horizontal lift and vertical coframe at a point.

    ``delta/delta z^a = d/dz^a + H[a, i] d/dv^i`` and
    ``delta v^i = dv^i + N[a, i] dz^a`` with ``H = -N``.  ``frame`` holds the
    frame vectors as columns in coordinates ``(z, v)``.
    """

    H: np.ndarray
    N: np.ndarray
    frame: np.ndarray
    coframe: np.ndarray
    pairing_residual: float


@dataclass(frozen=True)
class OmegaBlocks:
    base: np.ndarray
    fiber: np.ndarray
    psi: np.ndarray
    g: np.ndarray
    min_eig_base: float


class _Local:
    """Jets of all the ingredients at one total-space point."""

    def __init__(self, G, g, p, order):
        n, r = G.n, G.r
        N = n + r
        self.n, self.r, self.N = n, r, N
        self.p = p
        space = jets.jet_space(N, order)
        w = space.variables(p.coords)
        Gm = G.matrix(w)
        if not isinstance(Gm, jets.Jet):
            Gm = jets.Jet.constant(space, Gm)
        self.Gm = Gm
        self.G0 = check_metric_value(Gm.value, "bundle metric")
        vv = jets.stack(w[n:], (r,))
        vb = jets.conj(vv)
        self.Gscal = jets.jeinsum("j,j->", jets.jeinsum("ij,i->j", Gm, vv), vb)
        self.v = p.v
        self.dG = np.array([Gm.d(a).value for a in range(n)])
        self.Ginv = np.linalg.solve(self.G0, np.eye(r))
        if order >= 2:
            self.R = curvature_jet(Gm, n)
            self.R0 = self.R.value
            self.Psi = -jets.jeinsum("jab,j->ab", jets.jeinsum("ijab,i->jab", self.R, vv), vb)
        else:
            self.R = self.R0 = self.Psi = None
        if g is not None:
            self.psi = g.field(w)
            self.gj = g.g_jet(w)
            self.Om = self.Psi + self.gj if self.Psi is not None else None
            self.Phi = self.psi + self.Gscal
        Gvz = np.einsum("i,ail->al", self.v, self.dG)
        self.Nc = Gvz @ self.Ginv

    def frame(self):
        n, r, N = self.n, self.r, self.N
        H = -self.Nc
        F = np.eye(N, dtype=complex)
        F[n:, :n] = H.T
        C = np.eye(N, dtype=complex)
        C[n:, :n] = self.Nc.T
        res = float(np.max(np.abs(C @ F - np.eye(N))))
        return FrameDecomposition(H, self.Nc.copy(), F, C, res)

    def coordinate_blocks(self, base):
        """Coordinate matrix of ``base (dz dzbar) + G delta v delta vbar``."""
        n, N = self.n, self.N
        M = np.zeros((N, N), dtype=complex)
        NG = self.Nc @ self.G0
        M[:n, :n] = base + NG @ self.Nc.conj().T
        M[:n, n:] = NG
        M[n:, :n] = self.G0 @ self.Nc.conj().T
        M[n:, n:] = self.G0
        return M

    def hessian(self, scalar):
        N = self.N
        return jets.stack([scalar.d(A).d(N + B) for A in range(N) for B in range(N)], (N, N))


def _scale(M):
    return max(1.0, float(np.max(np.abs(M))))


def frame_decomposition(G, p):
    p = _point(p, G)
    return _Local(G, None, p, 1).frame()


def _omega(loc):
    base = loc.Om.value
    w = np.linalg.eigvalsh((base + base.conj().T) / 2)
    return OmegaBlocks(base, loc.G0, loc.Psi.value, loc.gj.value, float(w[0]))


def assemble_omega(G, g, p, check_sign=True, restarts=32, seed=42):
    """Frame blocks of the total-space metric at ``p``.

    Raises
    ------
    NotGriffithsNegative
        If the curvature takes a positive value on some simple tensor
        (checked by :func:`griffiths_extremum` when ``check_sign``).
    """
    p = _point(p, G)
    loc = _Local(G, g, p, 2)
    if check_sign:
        cert = griffiths_extremum(loc.R0, loc.gj.value, loc.G0, restarts, seed)
        if cert.maximum > 1e-8 * cert.scale:
            raise NotGriffithsNegative(
                f"curvature reaches {cert.maximum:.3e} > 0 on a simple tensor at z = {p.z}")
    return _omega(loc)


def decomposition_check(G, p, tol=1e-7):
    """Compare ``dd-bar G(z, v)`` with ``Psi dz dzbar + G delta v delta vbar``."""
    p = _point(p, G)
    loc = _Local(G, None, p, 2)
    lhs = loc.hessian(loc.Gscal).value
    rhs = loc.coordinate_blocks(loc.Psi.value)
    scale = _scale(lhs)
    disc = float(np.max(np.abs(lhs - rhs)))
    return discrepancy_report("decomposition_check", rhs, lhs, disc / scale, tol, "identity",
                              inputs={"bundle": G.name, "z": p.z, "v": p.v},
                              details={"scale": scale})


def omega_from_potential(G, g, p):
    """Coordinate matrix of ``dd-bar (psi + G)`` at ``p``."""
    p = _point(p, G)
    loc = _Local(G, g, p, 2)
    return loc.hessian(loc.Phi).value


def potential_crosscheck(G, g, p, tol=1e-6):
    """Frame blocks transformed to coordinates against the potential Hessian."""
    p = _point(p, G)
    loc = _Local(G, g, p, 2)
    direct = loc.hessian(loc.Phi).value
    blocks = _omega(loc)
    assembled = loc.coordinate_blocks(blocks.base)
    scale = _scale(direct)
    disc = float(np.max(np.abs(direct - assembled))) / scale
    return discrepancy_report("potential_crosscheck", assembled, direct, disc, tol, "identity",
                              inputs={"bundle": G.name, "base": to_text(g.potential),
                                      "z": p.z, "v": p.v})


def _shifted_base(g):
    extra = " + ".join(f"abs2(z{a + 1})" for a in range(g.n))
    return BaseMetric(parse_expr(f"({to_text(g.potential)}) + 0.5*({extra})", (g.n, 0)), g.n,
                      (g.name or "base") + "+0.5|z|^2")


def dG_norm(G, g, p):
    """``|dG|^2`` in the frame and in coordinates, with ``G(z, v)`` itself."""
    p = _point(p, G)
    loc = _Local(G, g, p, 2)
    n, N = loc.n, loc.N
    G1 = loc.Gscal
    Gi = np.array([G1.d(n + i).value for i in range(loc.r)])
    frame_norm = float(np.real(np.einsum("i,j,ji->", Gi, Gi.conj(), loc.Ginv)))
    theta = np.array([G1.d(A).value for A in range(N)])
    h = loc.hessian(loc.Phi).value
    coord_norm = float(np.real(np.conj(theta) @ np.linalg.solve(h, theta)))
    return frame_norm, coord_norm, float(np.real(G1.value))


def dG_norm_check(G, g, p, g2=None, tol=1e-8):
    """``|dG|^2_Omega = G`` under ``g`` and a second base metric ``g2``."""
    p = _point(p, G)
    g2 = g2 or _shifted_base(g)
    rows = []
    worst = 0.0
    for base in (g, g2):
        fn, cn, val = dG_norm(G, base, p)
        denom = max(abs(val), 1e-15)
        err = max(abs(fn - val), abs(cn - val)) / denom if max(abs(fn), abs(cn), abs(val)) > 1e-300 else 0.0
        worst = max(worst, err)
        rows.append({"base": to_text(base.potential), "frame": fn, "coordinate": cn, "G": val})
    return discrepancy_report("dG_norm_check", [r["coordinate"] for r in rows], rows[0]["G"], worst,
                              tol, "identity", inputs={"bundle": G.name, "z": p.z, "v": p.v},
                              details={"rows": rows})


# ---------------------------------------------------------------------------
# curvature of Omega
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FrameCurvature:
    """Curvature of Omega with section slots in the frame, form legs in coordinates.

    ``frame[a, b, C, D]`` is the coefficient of ``dw^C ^ dwbar^D`` in
    ``<R(e_a), e_b>`` from the block formulas, ``oracle`` the same quantity
    from the Hessian of the potential, ``coordinate`` the untransformed
    potential curvature.
    """

    frame: np.ndarray
    oracle: np.ndarray
    coordinate: np.ndarray
    discrepancy: float
    vertical_max: float
    kahler_defect: float
    scale: float
    n: int
    r: int


def _chern_from_hessian(h):
    """``-d_C dbar_D h + d_C h h^{-1} dbar_D h`` for a matrix jet of order 2."""
    N = h.space.nvars
    h0 = h.value
    dh = [h.d(C).value for C in range(N)]
    dbh = [h.d(N + D).value for D in range(N)]
    m = h0.shape[0]
    R = np.empty((m, m, N, N), dtype=complex)
    for C in range(N):
        hC = h.d(C)
        left = np.linalg.solve(h0.T, dh[C].T).T
        for D in range(N):
            R[:, :, C, D] = -hC.d(N + D).value + left @ dbh[D]
    return R


def total_curvature(G, g, p, rtol=ORACLE_RTOL, raise_on_mismatch=True):
    """Curvature blocks of Omega at ``p`` with the potential-based cross-check.

    Blocks, with ``e_a`` the horizontal frame and ``e_i = d/dv^i``:

    * vertical ``<R e_i, e_j>`` = ``(A_i Omega^{-1} B_j + R_ij)`` on
      ``dz dzbar``, where ``A_i = R_il conj(v^l)`` and ``B_j = R_kj v^k``;
    * horizontal ``<R e_a, e_b>`` = Chern curvature of the base block
      ``Omega_base(z, v)`` minus the second fundamental form correction
      ``R_{p l C b} R_{k q a D} v^k conj(v^l) G^{qbar p}`` on ``dz dzbar``;
    * mixed ``<R e_i, e_b>`` = ``-dbar_D f_{i g t} Omega_base[t, b]`` on
      ``dz^g dwbar^D`` with ``f = -R_il conj(v^l) Omega_base^{-1}``.
    """
    p = _point(p, G)
    loc = _Local(G, g, p, 4)
    n, r, N = loc.n, loc.r, loc.N
    R0 = loc.R0
    v, vb = loc.v, loc.v.conj()
    Om = loc.Om
    Om0 = Om.value
    check_metric_value(Om0, "base block of Omega")
    Ominv0 = np.linalg.solve(Om0, np.eye(n))

    RF = np.zeros((N, N, N, N), dtype=complex)
    # horizontal-horizontal
    base_curv = _chern_from_hessian(Om)
    corr = np.einsum("plCb,kqaD,k,l,qp->abCD", R0, R0, v, vb, loc.Ginv)
    RF[:n, :n] = base_curv
    RF[:n, :n, :n, :n] -= corr
    # vertical-vertical
    A = np.einsum("ilab,l->iab", R0, vb)
    B = np.einsum("kjab,k->jab", R0, v)
    RF[n:, n:, :n, :n] = np.einsum("iab,bc,jcs->ijas", A, Ominv0, B) + R0
    # mixed
    vv = jets.stack(loc.Gm.space.variables(p.coords)[n:], (r,))
    f = -jets.jeinsum("igs,st->igt",
                      jets.jeinsum("ilgs,l->igs", loc.R, jets.conj(vv)), jets.inv(Om))
    for D in range(N):
        dbf = f.d(N + D).value
        RF[n:, :n, :n, D] = -np.einsum("igt,tb->ibg", dbf, Om0)
    RF[:n, n:] = np.conj(np.transpose(RF[n:, :n], (1, 0, 3, 2)))

    h = loc.hessian(loc.Phi)
    Rpot = _chern_from_hessian(h)
    F = loc.frame().frame
    oracle = np.einsum("Aa,Bb,ABCD->abCD", F, F.conj(), Rpot)

    scale = max(1.0, float(np.max(np.abs(oracle))))
    disc = float(np.max(np.abs(RF - oracle))) / scale
    vert = float(np.max(np.abs(oracle[n:, n:, n:, n:]), initial=0.0))
    kd = max(float(np.max(np.abs(Rpot - np.transpose(Rpot, (2, 1, 0, 3))))),
             float(np.max(np.abs(Rpot - np.transpose(Rpot, (0, 3, 2, 1)))))) / _scale(Rpot)
    out = FrameCurvature(RF, oracle, Rpot, disc, vert, kd, scale, n, r)
    if raise_on_mismatch and disc > rtol:
        raise CrossCheckMismatch(
            f"frame-block curvature differs from the potential curvature by {disc:.3e} (relative)",
            RF, oracle)
    return out


def vertical_block(curv):
    """``<R(d/dv^k, d/dvbar^l) e_i, e_j>`` from the frame formulas."""
    n = curv.n
    return curv.frame[n:, n:, n:, n:]


@dataclass(frozen=True)
class TautologicalPairing:
    value: float
    via_frame: float
    scale: float
    nonpositive: bool
    strictly_negative: bool


def tautological_pairing(G, g, p, xi, curvature=None):
    """``<R(xi, xibar) P, P>`` for the tautological section ``P = v^i d/dv^i``.

    Equals ``(Psi Omega_base^{-1} Psi - Psi)(xi, xibar)``; it is computed with
    :func:`contract` and again from the vertical curvature block.
    """
    p = _point(p, G)
    xi = np.asarray(xi, dtype=complex).reshape(G.n)
    loc = _Local(G, g, p, 2)
    blocks = _omega(loc)
    Psi = MultiIndexTensor(("base", "base-bar"), blocks.psi)
    form = contract([Psi, Psi], [(1, 2)], {0: blocks.base}).data - blocks.psi
    value = float(np.real(xi @ form @ xi.conj()))
    R0 = loc.R0
    A = np.einsum("ilab,l->iab", R0, p.v.conj())
    B = np.einsum("kjab,k->jab", R0, p.v)
    block = np.einsum("iab,bc,jcs->ijas", A, np.linalg.solve(blocks.base, np.eye(G.n)), B) + R0
    via = float(np.real(np.einsum("ijas,i,j,a,s->", block, p.v, p.v.conj(), xi, xi.conj())))
    if curvature is not None:
        n = curvature.n
        via = float(np.real(np.einsum("ijas,i,j,a,s->", curvature.frame[n:, n:, :n, :n],
                                      p.v, p.v.conj(), xi, xi.conj())))
    scale = max(1.0, float(np.max(np.abs(loc.hessian(loc.Phi).value))))
    off_zero = np.linalg.norm(p.v) > 0 and np.linalg.norm(xi) > 0
    strict = value < -1e-8 * scale if off_zero else True
    return TautologicalPairing(value, via, scale, value <= 1e-10 * scale, bool(strict))


# ---------------------------------------------------------------------------
# Ricci curvature
# ---------------------------------------------------------------------------

def ricci_forms(G, g, p):
    """Ricci coefficient matrices of Omega at ``p``.

    Returns ``(from_blocks, from_potential, ricci_g)`` where ``from_blocks``
    is ``-dd-bar log(det G det Omega_base)``, ``from_potential`` is
    ``-dd-bar log det`` of the full coordinate Hessian and ``ricci_g`` is the
    Ricci form of the base metric.
    """
    p = _point(p, G)
    loc = _Local(G, g, p, 4)
    N, n = loc.N, loc.n
    ld = jets.logdet(loc.Gm) + jets.logdet(loc.Om)
    blocks = -loc.hessian(ld).value
    pot = -loc.hessian(jets.logdet(loc.hessian(loc.Phi))).value
    lg = jets.logdet(loc.gj)
    ric_g = -np.array([[lg.d(a).d(N + b).value for b in range(n)] for a in range(n)])
    return blocks, pot, ric_g


def teichmuller_ricci_bound(genus):
    """Upper bound ``-1/(pi (genus - 1))`` for the restricted Ricci curvature.

    Twice the bound ``-1/(2 pi (genus - 1))`` on the base Ricci curvature.
    """
    if int(genus) != genus or genus < 2:
        raise BadGenus(f"genus must be an integer >= 2, got {genus}")
    return -1.0 / (math.pi * (genus - 1))


def ricci_report(G, g, p, xi=None, tangent=None, tol=1e-6):
    """Ricci curvature of Omega and its restriction to the zero section.

    When the bundle is the tangent bundle with ``G = g`` (``tangent=True``, or
    detected from the jets), the restriction is compared with twice the Ricci
    curvature of ``g``.
    """
    p = _point(p, G)
    blocks, pot, _ = ricci_forms(G, g, p)
    cross = float(np.max(np.abs(blocks - pot))) / _scale(pot)
    p0 = TotalPoint(p.z, np.zeros_like(p.v))
    b0, _, ric_g = ricci_forms(G, g, p0)
    g0 = g.g(p.z)
    if xi is None:
        xi = np.zeros(G.n, dtype=complex)
        xi[0] = 1.0 / np.sqrt(np.real(g0[0, 0]))
    xi = np.asarray(xi, dtype=complex)
    restricted = float(np.real(xi @ b0[:G.n, :G.n] @ xi.conj()))
    base_val = float(np.real(xi @ ric_g @ xi.conj()))
    if tangent is None:
        tangent = _same_field(G, g, p.z)
    details = {"blocks_vs_potential": cross, "ricci_g": base_val, "tangent": bool(tangent)}
    if tangent:
        disc = abs(restricted - 2 * base_val) / max(1.0, abs(2 * base_val))
        return discrepancy_report("ricci_report", restricted, 2 * base_val, max(disc, cross), tol,
                                  "identity", inputs={"bundle": G.name, "z": p.z, "v": p.v},
                                  details=details)
    return discrepancy_report("ricci_report", restricted, None, cross, tol, "identity",
                              inputs={"bundle": G.name, "z": p.z, "v": p.v}, details=details)


def _same_field(G, g, z):
    """Whether the bundle metric coincides with ``g`` to second order at ``z``."""
    if G.r != G.n:
        return False
    Gd = G.jet(z, 2).derivs(2)
    gd = g.g_jet(jets.jet_space(g.n, 4).variables(as_point(z))).derivs(2)
    return all(np.allclose(Gd[k], gd[k], rtol=1e-12, atol=1e-12) for k in Gd)


# ---------------------------------------------------------------------------
# primitive
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    """Sampling of the disk bundle ``{G(z, v) < radius}`` over ``|z| < z_radius``."""

    z_radius: float = 0.9
    z_points: int = 5
    v_radii: int = 4
    v_angles: int = 3
    radius: float = 4.0


def default_primitive(g):
    """``beta = (i/2)(dbar psi - d psi)``, so ``d beta = i dd-bar psi``.

    Returns a callable ``beta(zs) -> (b10, b01)`` with coefficient arrays of
    shape ``(n, ...)``.
    """
    n = g.n

    def beta(zs):
        zs = np.asarray(zs, dtype=complex)
        space = jets.jet_space(n, 1)
        psi = g.field(space.variables(zs))
        b10 = np.array([-0.5j * psi.d(a).value for a in range(n)])
        b01 = np.array([0.5j * psi.d(n + a).value for a in range(n)])
        return b10, b01
    return beta


def _theta(G, g, beta, n, r):
    """Coefficients of ``-i dG + beta`` as a function of stacked coordinates."""
    N = n + r

    def comps(w):
        w = np.asarray(w, dtype=complex)
        space = jets.jet_space(N, 1)
        vars_ = space.variables(w)
        Gm = G.matrix(vars_)
        Gs = 0
        for i in range(r):
            for j in range(r):
                gij = Gm[..., i, j]
                Gs = Gs + vars_[n + i] * gij * jets.conj(vars_[n + j])
        b10, b01 = beta(w[:n])
        t10 = np.array([-1j * Gs.d(A).value for A in range(N)])
        t10[:n] = t10[:n] + b10
        t01 = np.zeros_like(t10)
        t01[:n] = b01
        return t10, t01
    return comps


def _d11(comps, point, N, cfg):
    """``(d theta)^{1,1}`` coefficients and the ``(2,0)`` defect by central differences."""
    def field(w):
        t10, t01 = comps(np.array(w))
        return np.moveaxis(np.concatenate([t10, t01]), 0, -1)
    der = fd_derivatives(field, point, 1, cfg)
    dz = np.array([der[(tuple(int(k == A) for k in range(N)), (0,) * N)] for A in range(N)])
    dzb = np.array([der[((0,) * N, tuple(int(k == B) for k in range(N)))] for B in range(N)])
    # dz[A, c] = d_A of component c; components are (t10_0..t10_{N-1}, t01_0..t01_{N-1})
    d11 = dz[:, N:] - dzb[:, :N].T
    d20 = dz[:, :N] - dz[:, :N].T
    return d11, float(np.max(np.abs(d20)))


def primitive_check(G, g, beta=None, grid=GridSpec(), tol=1e-7, cfg=DiffConfig("finite-difference")):
    """``d(-i dG + beta) = Omega`` on a grid of the disk bundle.

    The precondition ``d beta = omega`` is verified first on the base grid;
    if it fails the report is a FAIL carrying that message.  The report also
    records ``sup |-i dG + beta|_Omega`` and ``max |dG|^2`` over the grid,
    which must stay below ``grid.radius``.
    """
    n, r, N = G.n, G.r, G.n + G.r
    beta = beta or default_primitive(g)
    t0 = time.perf_counter()
    xs = np.linspace(-grid.z_radius, grid.z_radius, grid.z_points)
    if n == 1:
        zs = [np.array([x + 1j * y]) for x in xs for y in xs if abs(x + 1j * y) < grid.z_radius]
    else:
        rng = np.random.default_rng(0)
        zs = []
        for _ in range(grid.z_points ** 2):
            x = rng.normal(size=2 * n)
            x *= grid.z_radius * rng.uniform() ** (1 / (2 * n)) / np.linalg.norm(x)
            zs.append(x[:n] + 1j * x[n:])

    def bcomps(w):
        b10, b01 = beta(np.asarray(w, dtype=complex)[:n])
        return np.asarray(b10), np.asarray(b01)
    pre = 0.0
    for z in zs:
        d11, d20 = _d11(bcomps, z, n, cfg)
        gz = g.g(z)
        pre = max(pre, float(np.max(np.abs(d11 - 1j * gz))) / _scale(gz), d20 / _scale(gz))
    inputs = {"bundle": G.name, "base": to_text(g.potential), "grid": grid.__dict__}
    if pre > tol:
        return VerificationReport("primitive_check", None, None, tol, tol - pre, "identity",
                                  inputs=inputs, details={"precondition_defect": pre},
                                  message="precondition failed: d(beta) differs from omega")

    comps = _theta(G, g, beta, n, r)
    worst = 0.0
    sup_norm = 0.0
    max_dG = 0.0
    for z in zs:
        G0 = G(z)
        for k in range(grid.v_radii):
            rho = math.sqrt(grid.radius) * 0.999 * k / max(grid.v_radii - 1, 1)
            for t in range(grid.v_angles):
                u = np.zeros(r, dtype=complex)
                u[t % r] = 1.0
                if r > 1 and t >= r:
                    u[:] = 1.0
                u *= np.exp(2j * np.pi * t / grid.v_angles)
                u /= math.sqrt(float(np.real(u @ G0 @ u.conj())))
                p = TotalPoint(np.asarray(z), rho * u)
                w = p.coords
                d11, d20 = _d11(comps, w, N, cfg)
                h = omega_from_potential(G, g, p)
                worst = max(worst, float(np.max(np.abs(d11 - 1j * h))) / _scale(h), d20 / _scale(h))
                t10, t01 = comps(w)
                hinv = np.linalg.solve(h, np.eye(N))
                norm2 = float(np.real(t10.conj() @ hinv @ t10 + t01 @ hinv @ t01.conj()))
                sup_norm = max(sup_norm, math.sqrt(max(norm2, 0.0)))
                fn, cn, val = dG_norm(G, g, p)
                max_dG = max(max_dG, cn)
    bounded = max_dG < grid.radius
    margin = min(tol - worst, grid.radius - max_dG)
    return VerificationReport("primitive_check", {"sup_norm": sup_norm, "max_dG_norm2": max_dG},
                              {"radius": grid.radius}, tol, margin, "identity", inputs=inputs,
                              details={"d_defect": worst, "precondition_defect": pre,
                                       "bounded": bounded, "points": len(zs) * grid.v_radii * grid.v_angles},
                              wall_time=time.perf_counter() - t0)
