"""Chern curvature of Hermitian bundle metrics and positivity certificates.

Index conventions: a bundle metric is the matrix ``G[i, j] = G_{i jbar}``
(first index unbarred) and a curvature tensor is ``R[i, j, a, b] =
R_{i jbar a bbar}`` with fiber indices first.  The inverse metric
``G^{jbar i}`` is the entry ``inv(G)[j, i]``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import catalog as _catalog
from . import jets
from .dsl import ExprAST, Num, as_field, parse_expr, to_text
from .errors import (BadGenus, MetricNotPositive, NotHermitian, ShapeMismatch,
                     SingularMetric)
from .tensor import DiffConfig, MultiIndexTensor, as_point, hermitian_eigen, wirtinger_jet

CURVATURE_KINDS = ("fiber", "fiber-bar", "base", "base-bar")
SINGULAR_COND = 1e13


def check_metric_value(G, what="metric"):
    """Validate a metric matrix at a point: Hermitian, positive, well conditioned."""
    G = np.asarray(G, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(G))))
    if np.max(np.abs(G - G.conj().T)) > 1e-10 * scale:
        raise NotHermitian(f"{what} is not Hermitian")
    try:
        np.linalg.cholesky((G + G.conj().T) / 2)
    except np.linalg.LinAlgError:
        raise MetricNotPositive(f"{what} is not positive definite") from None
    cond = np.linalg.cond(G)
    if cond > SINGULAR_COND:
        raise SingularMetric(f"{what} condition number {cond:.3e} exceeds {SINGULAR_COND:g}")
    return G


def _as_ast(e, dims):
    return e if isinstance(e, ExprAST) else parse_expr(str(e), dims)


class BundleMetric:
    """Hermitian metric ``G_{i jbar}(z)`` on a trivialised rank-``r`` bundle.

    Parameters
    ----------
    entries : sequence of sequences
        ``r x r`` expressions (text or parsed) in the base variables ``z1..zn``.
    base_dim : int
    name : str, optional
    """

    def __init__(self, entries, base_dim, name=""):
        self.n = int(base_dim)
        self.entries = tuple(tuple(_as_ast(e, (self.n, 0)) for e in row) for row in entries)
        self.r = len(self.entries)
        if any(len(row) != self.r for row in self.entries):
            raise ShapeMismatch("metric entries must form a square matrix")
        self.name = name
        self._fields = [as_field(e) for row in self.entries for e in row]

    @classmethod
    def from_catalog(cls, name):
        e = _catalog.get(name)
        if e.kind != "bundle":
            raise ValueError(f"{name!r} is not a bundle metric")
        return cls(e.metric, e.base_dim, name)

    @classmethod
    def constant(cls, matrix, base_dim=1):
        """Metric with constant entries."""
        m = np.atleast_2d(np.asarray(matrix, dtype=complex))
        return cls([[to_text(Num(complex(x))) for x in row] for row in m], base_dim)

    def matrix(self, coords):
        """Evaluate ``G`` on coordinates (numbers, arrays or jets); base first."""
        vals = [f(coords) for f in self._fields]
        if any(isinstance(x, jets.Jet) for x in vals):
            return jets.stack(vals, (self.r, self.r))
        vals = np.broadcast_arrays(*[np.asarray(x, dtype=complex) for x in vals])
        return np.stack(vals, axis=-1).reshape(vals[0].shape + (self.r, self.r))

    def jet(self, z, order=2, cfg=DiffConfig()):
        return wirtinger_jet(self.matrix, as_point(z), order, cfg)

    def __call__(self, z):
        return self.matrix(list(as_point(z)))


class BaseMetric:
    """Kähler metric ``g = dd^c psi`` given by its potential ``psi(z)``."""

    def __init__(self, potential, base_dim=1, name=""):
        self.n = int(base_dim)
        self.potential = _as_ast(potential, (self.n, 0))
        self.name = name
        self._field = as_field(self.potential)

    @classmethod
    def from_catalog(cls, name, k=None):
        e = _catalog.fs_k(k) if (name == "fs_k" and k is not None) else _catalog.get(name)
        if not e.potential:
            raise ValueError(f"{name!r} has no potential")
        return cls(e.potential, e.base_dim, name)

    def field(self, coords):
        return self._field(coords)

    def g_jet(self, coords):
        """``g_{a bbar}`` as a matrix jet given jet coordinates (base first)."""
        psi = self._field(coords)
        N = psi.space.nvars
        return jets.stack([psi.d(a).d(N + b) for a in range(self.n) for b in range(self.n)],
                          (self.n, self.n))

    def g(self, z, cfg=DiffConfig()):
        jet = wirtinger_jet(self._field, as_point(z), 2, cfg)
        return jet.hessian()


def curvature_jet(Gm, n):
    """Chern curvature ``R[i, j, a, b]`` of a matrix jet ``Gm`` (order drops by two).

    ``R_{i jbar a bbar} = -d_a dbar_b G_{i jbar} + (d_a G  G^{-1}  dbar_b G)_{i jbar}``;
    base variables are the first ``n`` jet variables.
    """
    Ginv = jets.inv(Gm)
    N = Gm.space.nvars
    dG = [Gm.d(a) for a in range(n)]
    dbG = [Gm.d(N + b) for b in range(n)]
    blocks = []
    for a in range(n):
        left = dG[a] @ Ginv
        for b in range(n):
            blocks.append(left @ dbG[b] - dG[a].d(N + b))
    r = Gm.shape[-1]
    R = jets.Jet(Gm.space, np.stack([x.coef for x in blocks], axis=1)
                 .reshape((Gm.space.size, n, n, r, r)), blocks[0].order)
    return jets.transpose(R, (2, 3, 0, 1))


def hermitian_defect(R):
    """Relative violation of ``R[i, j, a, b] = conj(R[j, i, b, a])``."""
    R = np.asarray(R)
    scale = max(1.0, float(np.max(np.abs(R), initial=0.0)))
    return float(np.max(np.abs(R - np.conj(np.transpose(R, (1, 0, 3, 2)))), initial=0.0)) / scale


def chern_curvature(G, z, cfg=DiffConfig()):
    """Chern curvature tensor of ``G`` at ``z``.

    Returns
    -------
    MultiIndexTensor
        Kinds ``(fiber, fiber-bar, base, base-bar)``.
    """
    z = as_point(z)
    if len(z) != G.n:
        raise ShapeMismatch(f"metric has {G.n} base variables, point has {len(z)}")
    Gj = G.jet(z, 2, cfg)
    check_metric_value(Gj.value, "bundle metric")
    R = curvature_jet(Gj, G.n).value
    if hermitian_defect(R) > 1e-10:
        raise NotHermitian("curvature lost Hermitian symmetry; metric entries are not a Hermitian field")
    return MultiIndexTensor(CURVATURE_KINDS, R)


def _data(x):
    return x.data if isinstance(x, MultiIndexTensor) else np.asarray(x, dtype=complex)


# ---------------------------------------------------------------------------
# positivity
# ---------------------------------------------------------------------------

def classify(minimum, maximum, scale=1.0, rel_tol=1e-8):
    """Sign of a Hermitian form from its extreme values.

    ``|extremum| <= rel_tol * scale`` counts as semi-definite.
    """
    tol = rel_tol * max(1.0, scale)
    if minimum > tol:
        return "positive"
    if maximum < -tol:
        return "negative"
    if abs(minimum) <= tol and abs(maximum) <= tol:
        return "zero"
    if abs(minimum) <= tol:
        return "semi-positive"
    if abs(maximum) <= tol:
        return "semi-negative"
    return "indefinite"


@dataclass(frozen=True)
class NakanoOperator:
    """Hermitian pair ``(Q, g (x) G)`` on ``(base index, fiber index)`` tensors."""

    numerator: np.ndarray
    gram: np.ndarray
    n: int
    r: int

    def eigen(self):
        return hermitian_eigen(self.numerator, self.gram)

    def quadratic(self, A):
        a = np.asarray(A, dtype=complex).reshape(-1)
        return float(np.real(np.conj(a) @ self.numerator @ a) / np.real(np.conj(a) @ self.gram @ a))


def nakano_operator(R, g, G):
    """Nakano curvature operator.

    ``Q[(a, i), (b, j)] = R[i, j, a, b]`` paired with the Gram matrix
    ``g[a, b] G[i, j]``; a tensor ``A`` with entries ``A[a, i] = a^{a i}``
    has ``Q(A, A) = conj(A) . Q . A`` under this flattening.
    """
    R = _data(R)
    g = np.atleast_2d(_data(g))
    G = np.atleast_2d(_data(G))
    r, r2, n, n2 = R.shape
    if r != r2 or n != n2 or g.shape != (n, n) or G.shape != (r, r):
        raise ShapeMismatch(f"curvature {R.shape}, base metric {g.shape}, fiber metric {G.shape}")
    Q = np.transpose(R, (2, 0, 3, 1)).reshape(n * r, n * r)
    # Q(A, B) is linear in A and antilinear in B, so transpose to act on conj(A)
    Q = Q.T
    return NakanoOperator(Q, np.kron(g, G).T, n, r)


@dataclass(frozen=True)
class PositivityCertificate:
    """Outcome of a positivity search.

    ``extremal`` is the smallest value found; for the Griffiths search it is
    an upper bound on the true minimum unless ``heuristic`` is False.
    """

    kind: str
    sign: str
    extremal: float
    maximum: float
    witness: object
    samples: int
    heuristic: bool
    scale: float = 1.0
    witness_max: object = None

    def reevaluate(self, R, g, G):
        if self.kind == "nakano":
            return nakano_operator(R, g, G).quadratic(self.witness)
        xi, v = self.witness
        return griffiths_value(R, g, G, xi, v)


def griffiths_value(R, g, G, xi, v):
    """``R(v, vbar, xi, xibar) / (|xi|_g^2 |v|_G^2)`` for a simple tensor."""
    R, g, G = _data(R), np.atleast_2d(_data(g)), np.atleast_2d(_data(G))
    xi = np.asarray(xi, dtype=complex)
    v = np.asarray(v, dtype=complex)
    num = np.einsum("ijab,i,j,a,b->", R, v, v.conj(), xi, xi.conj())
    den = (xi @ g @ xi.conj()) * (v @ G @ v.conj())
    return float(np.real(num / den))


def _min_vec(M, N):
    w, V = hermitian_eigen(M, N)
    return w[0], V[:, 0]


def _whitener(N):
    """``W`` with ``W N W^* = I``; minimisers are ``y = W^* u`` for unit ``u``."""
    return np.linalg.inv(np.linalg.cholesky(N))


def _batched_min(M, W):
    """Smallest generalised eigenpair of each ``M[s]`` against ``W^{-1} W^{-*}``."""
    A = W @ M @ W.conj().T
    w, U = np.linalg.eigh((A + np.conj(np.swapaxes(A, -1, -2))) / 2)
    return w[:, 0], U[:, :, 0] @ W.conj()


def _alternate(R, g, G, xi, iters=200):
    """Alternating minimisation from a batch of seeds ``xi`` of shape ``(S, n)``.

    With ``xi`` fixed the form in ``y = conj(v)`` is ``sum R[i, j, a, b] xi_a
    conj(xi_b)`` against ``G``; with ``v`` fixed the form in ``conj(xi)`` is
    ``sum R[i, j, a, b] v_i conj(v_j)`` against ``g``.
    """
    Wg, WG = _whitener(g), _whitener(G)
    prev = np.full(len(xi), np.inf)
    for _ in range(iters):
        Mv = np.einsum("sijb,sb->sij", np.einsum("ijab,sa->sijb", R, xi), xi.conj())
        _, y = _batched_min(Mv, WG)
        v = y.conj()
        Mx = np.einsum("sjab,sj->sab", np.einsum("ijab,si->sjab", R, v), v.conj())
        lam, x = _batched_min(Mx, Wg)
        xi = x.conj()
        if np.all(np.abs(prev - lam) <= 1e-13 * np.maximum(1.0, np.abs(lam))):
            break
        prev = lam
    num = np.real(np.einsum("sab,sa,sb->s", Mx, xi, xi.conj()))
    den = np.real(np.einsum("sa,ab,sb->s", xi, g, xi.conj()) * np.einsum("si,ij,sj->s", v, G, v.conj()))
    vals = num / den
    k = int(np.argmin(vals))
    return float(vals[k]), xi[k], v[k]


def unit_grid(dim, per_axis=11):
    """Deterministic seeds on the unit sphere of ``C^dim`` modulo phase."""
    if dim == 1:
        return np.ones((1, 1), dtype=complex)
    thetas = np.linspace(0.0, np.pi / 2, per_axis)
    phis = np.linspace(0.0, 2 * np.pi, per_axis, endpoint=False)
    pts = []
    for angles in itertools.product(thetas, repeat=dim - 1):
        mod = np.ones(dim)
        for k, t in enumerate(angles):
            mod[k] *= np.cos(t)
            mod[k + 1:] *= np.sin(t)
        for ph in itertools.product(phis, repeat=dim - 1):
            pts.append(mod * np.exp(1j * np.concatenate([[0.0], ph])))
    return np.array(pts)


def _griffiths_search(R, g, G, restarts, rng, grid_cap=4096, random_cap=512):
    n = g.shape[0]
    if n == 1:
        lam, y = _min_vec(R[:, :, 0, 0], G)
        xi = np.ones(1, dtype=complex) / np.sqrt(np.real(g[0, 0]))
        return griffiths_value(R, g, G, xi, y.conj()), xi, y.conj(), 1, False
    if R.shape[0] == 1:
        lam, x = _min_vec(R[0, 0], g)
        v = np.ones(1, dtype=complex)
        return griffiths_value(R, g, G, x.conj(), v), x.conj(), v, 1, False
    if 11 ** (2 * n - 2) <= grid_cap:
        seeds = list(unit_grid(n))
    else:
        seeds = []
    extra = restarts if seeds else max(restarts, random_cap)
    for _ in range(extra):
        s = rng.normal(size=n) + 1j * rng.normal(size=n)
        seeds.append(s / np.linalg.norm(s))
    val, xi, v = _alternate(R, g, G, np.array(seeds))
    return val, xi, v, len(seeds), True


def griffiths_extremum(R, g, G, restarts=32, seed=42):
    """Minimise the curvature over unit simple tensors ``xi (x) v``.

    Alternating minimisation: with ``xi`` fixed the problem is a generalised
    Hermitian eigenproblem in ``v`` and vice versa.  Seeds come from a
    deterministic angular grid plus ``restarts`` random starts.  The result is
    exact when ``n == 1`` or ``r == 1``.

    Returns
    -------
    PositivityCertificate
        ``extremal`` is the minimum found (an upper bound on the true one)
        and ``maximum`` the corresponding maximum.
    """
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    R = _data(R)
    g = np.atleast_2d(_data(g))
    G = np.atleast_2d(_data(G))
    r, _, n, _ = R.shape
    if g.shape != (n, n) or G.shape != (r, r):
        raise ShapeMismatch("metric shapes do not match the curvature tensor")
    rng = np.random.default_rng(seed)
    lo, xi, v, count, heur = _griffiths_search(R, g, G, restarts, rng)
    hi, xim, vm, _, _ = _griffiths_search(-R, g, G, restarts, rng)
    scale = max(1.0, float(np.max(np.abs(R), initial=0.0)))
    return PositivityCertificate("griffiths", classify(lo, -hi, scale), float(lo), float(-hi),
                                 (xi, v), count, heur, scale, (xim, vm))


def nakano_certificate(R, g, G):
    """Exact Nakano extremes from the generalised eigenproblem."""
    op = nakano_operator(R, g, G)
    w, V = op.eigen()
    scale = max(1.0, float(np.max(np.abs(_data(R)), initial=0.0)))
    wit = V[:, 0].reshape(op.n, op.r)
    return PositivityCertificate("nakano", classify(w[0], w[-1], scale), float(w[0]), float(w[-1]),
                                 wit, len(w), False, scale, V[:, -1].reshape(op.n, op.r))


def griffiths_grid_minimum(R, g, G, per_axis=(25, 40)):
    """Brute-force minimum over a product grid of simple tensors.

    Unit vectors in ``C^2`` are parametrised as ``(cos t, sin t e^{i phi})``
    with ``per_axis`` points in ``t`` and ``phi``; ``C^1`` uses the single
    vector ``1``.  With the default ``(25, 40)`` a rank-2, dimension-2
    problem evaluates ``1000 * 1000 = 10^6`` simple tensors.
    """
    R = _data(R)
    g = np.atleast_2d(_data(g))
    G = np.atleast_2d(_data(G))

    def sphere(dim):
        if dim == 1:
            return np.ones((1, 1), dtype=complex)
        if dim != 2:
            raise ValueError("grid search is implemented for dimensions 1 and 2")
        t = np.linspace(0.0, np.pi / 2, per_axis[0])
        p = np.linspace(0.0, 2 * np.pi, per_axis[1], endpoint=False)
        T, P = np.meshgrid(t, p, indexing="ij")
        return np.stack([np.cos(T).ravel() + 0j, np.sin(T).ravel() * np.exp(1j * P.ravel())], axis=1)

    r, _, n, _ = R.shape
    X = sphere(n)
    V = sphere(r)
    M = np.einsum("ijab,sa,sb->sij", R, X, X.conj())
    num = np.real(np.einsum("sij,ti,tj->st", M, V, V.conj()))
    den = np.real(np.einsum("sa,ab,sb->s", X, g, X.conj()))[:, None] * \
        np.real(np.einsum("ti,ij,tj->t", V, G, V.conj()))[None, :]
    vals = num / den
    k = np.unravel_index(np.argmin(vals), vals.shape)
    return float(vals[k]), vals.size, (X[k[0]], V[k[1]])


def gap_example():
    """Curvature with Griffiths minimum 1/4 and Nakano minimum -1/2 (n = r = 2).

    ``R[i, i, a, a] = 1`` for all ``i, a`` and ``R[0, 1, 0, 1] = R[1, 0, 1, 0] =
    3/2``; with flat metrics the flattened Nakano matrix is the identity plus
    ``3/2`` between the ``(0, 0)`` and ``(1, 1)`` slots.
    """
    R = np.zeros((2, 2, 2, 2), dtype=complex)
    for i in range(2):
        for a in range(2):
            R[i, i, a, a] = 1.0
    R[0, 1, 0, 1] = R[1, 0, 1, 0] = 1.5
    return MultiIndexTensor(CURVATURE_KINDS, R)


def nehari_l2_bound(genus):
    """Radius ``9 pi (genus - 1)`` of the L^2 ball containing the Bers image.

    It is ``(3/2)^2`` (the sup-norm bound squared) times the hyperbolic area
    ``2 pi (2 genus - 2)``.
    """
    if int(genus) != genus or genus < 2:
        raise BadGenus(f"genus must be an integer >= 2, got {genus}")
    return 9 * math.pi * (int(genus) - 1)
