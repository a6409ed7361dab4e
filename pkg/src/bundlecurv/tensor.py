"""Wirtinger jets of scalar fields, Hermitian eigenproblems and tensor contraction.

Fields are plain callables ``f(z)`` taking a list of complex coordinates.
Inside ``f`` the conjugate of a coordinate must be taken with
:func:`bundlecurv.jets.conj` so the same callable works on numbers, numpy
arrays and :class:`~bundlecurv.jets.Jet` objects.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache, reduce

import numpy as np
import scipy.linalg

from .errors import (BundleCurvError, CrossCheckMismatch, MetricNotPositive,
                     NonFiniteValue, NotHermitian, ShapeMismatch, SingularMetric)
from .jets import Jet, jet_space

MODES = ("nested-dual", "finite-difference", "cross-check")


@dataclass(frozen=True)
class DiffConfig:
    """How derivatives are obtained.

    ``fd_step`` is the relative step used for first derivatives; higher
    orders use ``fd_step ** (5 / (order + 4))`` so that truncation and
    round-off stay balanced for the fourth-order stencils.
    """

    mode: str = "nested-dual"
    fd_step: float = 1e-3
    richardson: bool = False
    rtol: float = 1e-5

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown differentiation mode {self.mode!r}")
        if not 1e-6 < self.fd_step < 1e-2:
            raise ValueError("fd_step must lie in (1e-6, 1e-2)")


def as_point(coords):
    """Validate a complex coordinate vector (the ``ComplexPoint`` of the docs)."""
    p = np.atleast_1d(np.asarray(coords, dtype=complex))
    if p.ndim != 1:
        raise ShapeMismatch("a point is a one-dimensional coordinate vector")
    if not np.all(np.isfinite(p)):
        raise NonFiniteValue("point has non-finite coordinates")
    return p


# ---------------------------------------------------------------------------
# finite differences
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def central_stencil(d):
    """Offsets and weights of the fourth-order central stencil for ``d/dx^d``."""
    p = (d + 1) // 2 + 1
    offs = np.arange(-p, p + 1)
    A = np.vander(offs, increasing=True).T.astype(float)
    b = np.zeros(len(offs))
    b[d] = math.factorial(d)
    w = np.linalg.solve(A, b)
    w[np.abs(w) < 1e-13] = 0.0
    keep = w != 0
    return offs[keep], w[keep]


def _wirtinger_to_real(hol, antihol):
    """Expand ``prod dz^a dzbar^b`` into real partials ``{(px..., py...): coeff}``."""
    n = len(hol)
    per_var = []
    for a, b in zip(hol, antihol):
        # (X - iY)^a (X + iY)^b / 2^(a+b) as {(px, py): c}
        poly = {(0, 0): 1.0 + 0j}
        for sign, count in ((-1j, a), (1j, b)):
            for _ in range(count):
                nxt = {}
                for (px, py), c in poly.items():
                    nxt[(px + 1, py)] = nxt.get((px + 1, py), 0) + c / 2
                    nxt[(px, py + 1)] = nxt.get((px, py + 1), 0) + sign * c / 2
                poly = nxt
        per_var.append(poly)
    out = {}
    for combo in itertools.product(*(p.items() for p in per_var)):
        px = tuple(c[0][0] for c in combo)
        py = tuple(c[0][1] for c in combo)
        coeff = math.prod(c[1] for c in combo)
        out[px + py] = out.get(px + py, 0) + coeff
    del n
    return out


def _real_partial(field_fn, point, q, h):
    """Tensor-product central difference of real multi-order ``q`` (x's then y's)."""
    n = len(point)
    axes = [(k, d) for k, d in enumerate(q) if d > 0]
    if not axes:
        return np.asarray(field_fn([point[k] for k in range(n)]))
    stencils = [central_stencil(d) for _, d in axes]
    offs_grid = list(itertools.product(*(s[0] for s in stencils)))
    wts = np.array([math.prod(w) for w in itertools.product(*(s[1] for s in stencils))])
    pts = np.repeat(point[:, None], len(offs_grid), axis=1).astype(complex)
    for j, offs in enumerate(offs_grid):
        for (k, _), o in zip(axes, offs):
            if k < n:
                pts[k, j] += o * h
            else:
                pts[k - n, j] += 1j * o * h
    vals = np.asarray(field_fn([pts[k] for k in range(n)]))
    vals = np.broadcast_to(vals, (len(offs_grid),) + vals.shape[1:]) if vals.ndim else \
        np.full(len(offs_grid), vals)
    D = sum(q)
    return np.tensordot(wts, vals, axes=(0, 0)) / h ** D


def fd_derivatives(field_fn, point, max_order, cfg=DiffConfig()):
    """All mixed Wirtinger derivatives up to ``max_order`` by finite differences."""
    point = as_point(point)
    n = len(point)
    scale = max(1.0, float(np.max(np.abs(point))))
    cache = {}

    def real(q):
        if q not in cache:
            D = sum(q)
            h = cfg.fd_step ** (5.0 / (D + 4)) * scale if D else 1.0
            val = _real_partial(field_fn, point, q, h)
            if cfg.richardson and D:
                val = (16 * _real_partial(field_fn, point, q, h / 2) - val) / 15
            cache[q] = val
        return cache[q]

    out = {}
    for deg in range(max_order + 1):
        for combo in itertools.combinations_with_replacement(range(2 * n), deg):
            e = [0] * (2 * n)
            for s in combo:
                e[s] += 1
            hol, antihol = tuple(e[:n]), tuple(e[n:])
            out[(hol, antihol)] = sum(c * real(q) for q, c in
                                      _wirtinger_to_real(hol, antihol).items())
    return out


# ---------------------------------------------------------------------------
# jets of fields
# ---------------------------------------------------------------------------

def _dual_jet(field_fn, point, max_order):
    space = jet_space(len(point), max_order)
    out = field_fn(space.variables(point))
    if not isinstance(out, Jet):
        out = Jet.constant(space, out)
    if not np.all(np.isfinite(out.coef)):
        raise NonFiniteValue("field evaluation overflowed")
    return out


def wirtinger_jet(field_fn, point, max_order=2, cfg=DiffConfig()):
    """Value and all mixed Wirtinger derivatives of ``field_fn`` at ``point``.

    Parameters
    ----------
    field_fn : callable
        ``field_fn(z)`` with ``z`` a list of coordinates.
    point : array_like
        Complex coordinates.
    max_order : int
        Highest total derivative order, at most 4.
    cfg : DiffConfig
        ``nested-dual`` propagates truncated Taylor jets, ``finite-difference``
        uses central stencils, ``cross-check`` runs both and raises
        :class:`CrossCheckMismatch` when they differ by more than ``cfg.rtol``.

    Returns
    -------
    Jet
    """
    if not 0 <= max_order <= 4:
        raise ValueError("max_order must be between 0 and 4")
    point = as_point(point)
    if cfg.mode == "nested-dual":
        return _dual_jet(field_fn, point, max_order)
    derivs = fd_derivatives(field_fn, point, max_order, cfg)
    shape = np.shape(next(iter(derivs.values())))
    fd = Jet.from_derivatives(jet_space(len(point), max_order), derivs, shape)
    if not np.all(np.isfinite(fd.coef)):
        raise NonFiniteValue("field evaluation overflowed")
    if cfg.mode == "finite-difference":
        return fd
    dual = _dual_jet(field_fn, point, max_order)
    a = dual.coef * dual.space.factorial.reshape((-1,) + (1,) * (dual.coef.ndim - 1))
    b = fd.coef * fd.space.factorial.reshape((-1,) + (1,) * (fd.coef.ndim - 1))
    err = np.abs(a - b) / np.maximum(1.0, np.abs(a))
    if np.max(err) > cfg.rtol:
        raise CrossCheckMismatch(
            f"dual and finite-difference jets differ (max rel err {np.max(err):.3e})",
            dual, fd)
    return dual


# ---------------------------------------------------------------------------
# tensors
# ---------------------------------------------------------------------------

KINDS = ("fiber", "fiber-bar", "base", "base-bar")


def _family(kind):
    return kind.lstrip("^").replace("-bar", "")


def _is_bar(kind):
    return kind.endswith("-bar")


@dataclass(frozen=True)
class MultiIndexTensor:
    """Dense complex tensor with a kind label per index.

    Kinds are ``fiber``, ``fiber-bar``, ``base`` and ``base-bar``; a leading
    ``^`` marks a raised index.
    """

    kinds: tuple
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "kinds", tuple(self.kinds))
        object.__setattr__(self, "data", np.asarray(self.data, dtype=complex))
        if self.data.ndim != len(self.kinds):
            raise ShapeMismatch(f"{len(self.kinds)} kinds for a rank-{self.data.ndim} array")
        for k in self.kinds:
            if k.lstrip("^") not in KINDS:
                raise ValueError(f"unknown index kind {k!r}")

    @property
    def shape(self):
        return self.data.shape

    def hermitian_partner(self):
        """``conj(T)`` with every unbarred index swapped for its barred twin."""
        perm = list(range(len(self.kinds)))
        used = set()
        for i, k in enumerate(self.kinds):
            if i in used or _is_bar(k):
                continue
            for j in range(len(self.kinds)):
                if j not in used and j != i and _is_bar(self.kinds[j]) \
                        and _family(self.kinds[j]) == _family(k) \
                        and self.kinds[j].startswith("^") == k.startswith("^"):
                    perm[i], perm[j] = j, i
                    used.update((i, j))
                    break
        return np.conj(np.transpose(self.data, perm))

    def hermitian_defect(self):
        scale = max(1.0, float(np.max(np.abs(self.data), initial=0.0)))
        return float(np.max(np.abs(self.data - self.hermitian_partner()), initial=0.0)) / scale

    def as_matrix(self):
        """Flatten (unbarred..., barred...) index groups into a square matrix."""
        n = self.data.ndim // 2
        rows = int(np.prod(self.data.shape[:n]))
        return self.data.reshape(rows, -1)


def _check_metric(M, herm_tol=1e-10):
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ShapeMismatch("metric must be a square matrix")
    scale = max(1.0, float(np.max(np.abs(M))))
    if np.max(np.abs(M - M.conj().T)) > herm_tol * scale:
        raise NotHermitian("metric is not Hermitian")
    return (M + M.conj().T) / 2


def condition_number(M):
    return float(np.linalg.cond(M))


def hermitian_eigen(matrix, metric=None, herm_tol=1e-10):
    """Solve ``M x = lam N x`` for Hermitian ``M`` and positive ``N``.

    Returns eigenvalues in ascending order and the matching eigenvectors as
    columns.  The residual ``|Mx - lam N x|`` is checked against ``1e-9`` times
    the operator scale.
    """
    if isinstance(matrix, MultiIndexTensor):
        matrix = matrix.as_matrix()
    M = np.asarray(matrix, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ShapeMismatch("matrix must be square")
    scale = max(1.0, float(np.max(np.abs(M), initial=0.0)))
    if np.max(np.abs(M - M.conj().T), initial=0.0) > herm_tol * scale:
        raise NotHermitian("matrix is not Hermitian within %g" % herm_tol)
    M = (M + M.conj().T) / 2
    if metric is None:
        N = np.eye(M.shape[0])
    else:
        if isinstance(metric, MultiIndexTensor):
            metric = metric.as_matrix()
        N = _check_metric(metric, herm_tol)
        if N.shape != M.shape:
            raise ShapeMismatch("metric and matrix shapes differ")
        try:
            np.linalg.cholesky(N)
        except np.linalg.LinAlgError:
            raise MetricNotPositive("metric is not positive definite") from None
    w, V = scipy.linalg.eigh(M, N)
    res = M @ V - (N @ V) * w
    bound = 1e-9 * (np.linalg.norm(M, 2) + np.abs(w) * np.linalg.norm(N, 2) + 1e-300) \
        * np.linalg.norm(V, axis=0)
    if np.any(np.linalg.norm(res, axis=0) > np.maximum(bound, 1e-12)):
        raise BundleCurvError("generalized eigen-residual exceeds tolerance")
    return w, V


def _metric_solve(M, rhs):
    """``M^{-1} rhs`` via a Hermitian (Cholesky) solve with conditioning guard."""
    M = _check_metric(M)
    cond = condition_number(M)
    if cond > 1e13:
        raise SingularMetric(f"metric condition number {cond:.3e} exceeds 1e13")
    try:
        return scipy.linalg.cho_solve(scipy.linalg.cho_factor(M), rhs)
    except np.linalg.LinAlgError:
        return scipy.linalg.solve(M, rhs, assume_a="her")


def contract(t, pairs, inverses=None):
    """Einstein contraction over index pairs.

    Parameters
    ----------
    t : MultiIndexTensor or sequence of MultiIndexTensor
        A sequence is first combined into its outer product; axes are then
        numbered consecutively across the factors.
    pairs : list of (int, int)
        Axes to contract.  A lower index meets either the raised index of the
        same kind, or (when ``inverses[k]`` is given for pair ``k``) a lower
        index of the conjugate kind, in which case the inverse of the supplied
        metric is inserted by a Hermitian solve.
    inverses : dict, optional
        Pair position -> metric matrix ``M[x, y]`` with ``x`` unbarred.
    """
    if not isinstance(t, MultiIndexTensor):
        t = list(t)
        data = reduce(np.multiply.outer, [f.data for f in t])
        kinds = sum((f.kinds for f in t), ())
        t = MultiIndexTensor(kinds, data)
    inverses = dict(inverses or {})
    data = t.data
    kinds = list(t.kinds)
    axes = list(range(data.ndim))
    for pos, (a, b) in enumerate(pairs):
        ia, ib = axes.index(a), axes.index(b)
        ka, kb = kinds[ia], kinds[ib]
        if data.shape[ia] != data.shape[ib]:
            raise ShapeMismatch(f"axes {a} and {b} have different extents")
        if pos in inverses:
            if ka.startswith("^") or kb.startswith("^") or _family(ka) != _family(kb) \
                    or _is_bar(ka) == _is_bar(kb):
                raise ShapeMismatch(f"axes {a} ({ka}) and {b} ({kb}) are not conjugate lower indices")
            if _is_bar(ka):
                ia, ib = ib, ia
            M = inverses[pos]
            if isinstance(M, MultiIndexTensor):
                M = M.data
            n = data.shape[ia]
            T = np.moveaxis(data, (ia, ib), (0, 1))
            rest = T.shape[2:]
            S = _metric_solve(M, T.reshape(n, -1)).reshape((n, n) + rest)
            data = np.trace(S, axis1=0, axis2=1)
        else:
            raised = ka.startswith("^") != kb.startswith("^")
            if not raised or ka.lstrip("^") != kb.lstrip("^"):
                raise ShapeMismatch(f"axes {a} ({ka}) and {b} ({kb}) cannot be contracted directly")
            data = np.trace(data, axis1=ia, axis2=ib)
        for i in sorted((ia, ib), reverse=True):
            del kinds[i]
            del axes[i]
    return MultiIndexTensor(tuple(kinds), data)
