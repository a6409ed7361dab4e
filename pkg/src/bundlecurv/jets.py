"""Truncated Taylor arithmetic in Wirtinger variables.

A smooth field ``f(z, conj(z))`` near a point ``p`` is represented by its
Taylor polynomial in the independent displacements ``dz_k`` and
``dzbar_k``, truncated at a fixed total degree.  Arithmetic on these
polynomials is exact up to the truncation degree, so every mixed Wirtinger
derivative ``d^a/dz^a d^b/dzbar^b f(p)`` is read off as
``a! b! * coefficient``.  This is the multivariate, arbitrary-order
generalisation of hyper-dual numbers: the nested dual construction and the
truncated polynomial algebra are the same ring.

Coefficients may carry a trailing value shape (matrices, batches of points),
which lets the curvature code keep the index structure of a tensor while
differentiating it.
"""

from __future__ import annotations

import math
from functools import lru_cache
from itertools import combinations_with_replacement

import numpy as np

from .errors import DomainError, NonFiniteValue


def _monomials(nsym, degree):
    out = []
    for combo in combinations_with_replacement(range(nsym), degree):
        e = [0] * nsym
        for s in combo:
            e[s] += 1
        out.append(tuple(e))
    return sorted(out, reverse=True)


class JetSpace:
    """Monomial bookkeeping for ``nvars`` complex variables up to ``order``.

    Symbols ``0..nvars-1`` are the holomorphic displacements and
    ``nvars..2*nvars-1`` their conjugates.
    """

    def __init__(self, nvars, order):
        self.nvars = nvars
        self.order = order
        nsym = 2 * nvars
        exps = [e for deg in range(order + 1) for e in _monomials(nsym, deg)]
        self.exps = np.array(exps, dtype=int).reshape(len(exps), nsym)
        self.size = len(exps)
        self.index = {e: i for i, e in enumerate(exps)}
        self.degree = self.exps.sum(axis=1)
        n_upto = np.searchsorted(self.degree, np.arange(order + 1), side="right")

        ia, ib, it = [], [], []
        for i, ei in enumerate(exps):
            for j in range(n_upto[order - self.degree[i]]):
                ia.append(i)
                ib.append(j)
                it.append(self.index[tuple(a + b for a, b in zip(ei, exps[j]))])
        perm = np.argsort(np.array(it), kind="stable")
        self.ia = np.array(ia)[perm]
        self.ib = np.array(ib)[perm]
        tgt = np.array(it)[perm]
        self.starts = np.searchsorted(tgt, np.arange(self.size))

        self.swap = np.array(
            [self.index[e[nvars:] + e[:nvars]] for e in exps], dtype=int)
        self.factorial = np.array(
            [math.prod(math.factorial(k) for k in e) for e in exps], dtype=float)

        self._dsrc = np.full((nsym, self.size), -1, dtype=int)
        self._dfac = np.zeros((nsym, self.size))
        for t, e in enumerate(exps):
            if self.degree[t] == order:
                continue
            for s in range(nsym):
                up = list(e)
                up[s] += 1
                self._dsrc[s, t] = self.index[tuple(up)]
                self._dfac[s, t] = e[s] + 1

    def monomial(self, hol, antihol):
        return self.index[tuple(hol) + tuple(antihol)]

    def variables(self, point):
        """Jets of the coordinate functions ``z_k`` at ``point``.

        ``point`` has shape ``(nvars,)`` or ``(nvars, *batch)``.
        """
        point = np.asarray(point, dtype=complex)
        if point.shape[0] != self.nvars:
            raise ValueError(f"point has {point.shape[0]} coordinates, expected {self.nvars}")
        out = []
        for k in range(self.nvars):
            coef = np.zeros((self.size,) + point.shape[1:], dtype=complex)
            coef[0] = point[k]
            e = [0] * (2 * self.nvars)
            e[k] = 1
            coef[self.index[tuple(e)]] = 1.0
            out.append(Jet(self, coef))
        return out


def _align(a, b):
    """Right-align the value dimensions of two coefficient arrays."""
    if a.ndim < b.ndim:
        a = a.reshape(a.shape[:1] + (1,) * (b.ndim - a.ndim) + a.shape[1:])
    elif b.ndim < a.ndim:
        b = b.reshape(b.shape[:1] + (1,) * (a.ndim - b.ndim) + b.shape[1:])
    return a, b


def _scale(coef, other):
    other = np.asarray(other)
    extra = other.ndim - (coef.ndim - 1)
    if extra > 0:
        coef = coef.reshape(coef.shape[:1] + (1,) * extra + coef.shape[1:])
    return coef, other


@lru_cache(maxsize=None)
def jet_space(nvars, order):
    return JetSpace(nvars, order)


class Jet:
    """Truncated Wirtinger-Taylor expansion of a (possibly tensor-valued) field."""

    __array_priority__ = 1000
    __array_ufunc__ = None

    def __init__(self, space, coef, order=None):
        self.space = space
        self.coef = np.asarray(coef)
        self.order = space.order if order is None else order

    @classmethod
    def constant(cls, space, value, order=None):
        value = np.asarray(value, dtype=complex)
        coef = np.zeros((space.size,) + value.shape, dtype=complex)
        coef[0] = value
        return cls(space, coef, order)

    @classmethod
    def from_derivatives(cls, space, derivs, shape=()):
        """Build a jet from a ``{(hol, antihol): value}`` derivative map."""
        coef = np.zeros((space.size,) + tuple(shape), dtype=complex)
        for (hol, antihol), val in derivs.items():
            i = space.monomial(hol, antihol)
            coef[i] = np.asarray(val) / space.factorial[i]
        return cls(space, coef)

    # -- basic accessors -------------------------------------------------
    @property
    def value(self):
        return self.coef[0]

    @property
    def shape(self):
        return self.coef.shape[1:]

    def __repr__(self):
        return f"Jet(order={self.order}, shape={self.shape}, value={self.value!r})"

    def _truncated(self, coef, order):
        if order < self.space.order:
            coef = coef.copy()
            coef[self.space.degree > order] = 0
        return Jet(self.space, coef, order)

    def _lift(self, other):
        if isinstance(other, Jet):
            if other.space is not self.space:
                raise ValueError("jets live in different spaces")
            return other
        return Jet.constant(self.space, other)

    # -- ring operations -------------------------------------------------
    def __add__(self, other):
        o = self._lift(other)
        a, b = _align(self.coef, o.coef)
        return Jet(self.space, a + b, min(self.order, o.order))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        a, b = _align(self.coef, o.coef)
        return Jet(self.space, a - b, min(self.order, o.order))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __neg__(self):
        return Jet(self.space, -self.coef, self.order)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            a, b = _scale(self.coef, other)
            return Jet(self.space, a * b, self.order)
        sp = self.space
        a, b = _align(self.coef, other.coef)
        prod = a[sp.ia] * b[sp.ib]
        return self._truncated(np.add.reduceat(prod, sp.starts, axis=0),
                               min(self.order, other.order))

    __rmul__ = __mul__

    def __matmul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.space, self.coef @ np.asarray(other), self.order)
        sp = self.space
        prod = np.matmul(self.coef[sp.ia], other.coef[sp.ib])
        return self._truncated(np.add.reduceat(prod, sp.starts, axis=0),
                               min(self.order, other.order))

    def __rmatmul__(self, other):
        return Jet(self.space, np.asarray(other) @ self.coef, self.order)

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * reciprocal(other)
        a, b = _scale(self.coef, other)
        return Jet(self.space, a / b, self.order)

    def __rtruediv__(self, other):
        return reciprocal(self) * other

    def __pow__(self, n):
        if int(n) != n:
            raise TypeError("only integer powers of jets are supported")
        n = int(n)
        if n < 0:
            return reciprocal(self) ** (-n)
        result = Jet.constant(self.space, np.ones(self.shape), self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- structure -------------------------------------------------------
    def conj(self):
        """Pointwise complex conjugate of the field."""
        return Jet(self.space, self.coef[self.space.swap].conj(), self.order)

    def __getitem__(self, idx):
        if not isinstance(idx, tuple):
            idx = (idx,)
        return Jet(self.space, self.coef[(slice(None),) + idx], self.order)

    def sum(self, axis=None):
        if axis is None:
            axis = tuple(range(1, self.coef.ndim))
        elif isinstance(axis, int):
            axis = axis + 1 if axis >= 0 else axis
        else:
            axis = tuple(a + 1 if a >= 0 else a for a in axis)
        return Jet(self.space, self.coef.sum(axis=axis), self.order)

    def trace(self):
        return Jet(self.space, np.trace(self.coef, axis1=-2, axis2=-1), self.order)

    @property
    def mT(self):
        return Jet(self.space, np.swapaxes(self.coef, -1, -2), self.order)

    def reshape(self, *shape):
        return Jet(self.space, self.coef.reshape((self.space.size,) + tuple(shape)),
                   self.order)

    # -- differentiation -------------------------------------------------
    def d(self, sym):
        """Derivative with respect to symbol ``sym`` (one order is lost)."""
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        sp = self.space
        src = sp._dsrc[sym]
        ok = src >= 0
        coef = np.zeros_like(self.coef)
        fac = sp._dfac[sym][ok].reshape((-1,) + (1,) * (self.coef.ndim - 1))
        coef[ok] = self.coef[src[ok]] * fac
        return self._truncated(coef, self.order - 1)

    def dz(self, k):
        return self.d(k)

    def dzbar(self, k):
        return self.d(self.space.nvars + k)

    def derivative(self, hol, antihol):
        """Mixed Wirtinger derivative ``d^hol d^antihol`` at the base point."""
        i = self.space.monomial(hol, antihol)
        if self.space.degree[i] > self.order:
            raise ValueError("derivative order exceeds jet order")
        return self.coef[i] * self.space.factorial[i]

    def derivs(self, max_order=None):
        """Map ``(hol, antihol) -> derivative`` for all orders up to ``max_order``."""
        sp = self.space
        top = self.order if max_order is None else min(max_order, self.order)
        n = sp.nvars
        return {(tuple(e[:n]), tuple(e[n:])): self.coef[i] * sp.factorial[i]
                for i, e in enumerate(map(tuple, sp.exps)) if sp.degree[i] <= top}

    def hessian(self):
        """Matrix ``d_A dbar_B f`` over all variables (value shape must be scalar)."""
        n = self.space.nvars
        H = np.empty((n, n) + self.shape, dtype=complex)
        for a in range(n):
            for b in range(n):
                hol = [0] * n
                anti = [0] * n
                hol[a] += 1
                anti[b] += 1
                H[a, b] = self.derivative(hol, anti)
        return H


def conj(x):
    """Conjugate that works on jets and plain numbers alike."""
    if isinstance(x, Jet):
        return x.conj()
    return np.conj(x)


def jeinsum(subscripts, a, b):
    """Two-operand einsum where either operand may be a jet."""
    ins, out = subscripts.split("->")
    s1, s2 = ins.split(",")
    if isinstance(a, Jet) and isinstance(b, Jet):
        sp = a.space
        prod = np.einsum(f"Z{s1},Z{s2}->Z{out}", a.coef[sp.ia], b.coef[sp.ib])
        return a._truncated(np.add.reduceat(prod, sp.starts, axis=0), min(a.order, b.order))
    if isinstance(a, Jet):
        return Jet(a.space, np.einsum(f"Z{s1},{s2}->Z{out}", a.coef, b), a.order)
    if isinstance(b, Jet):
        return Jet(b.space, np.einsum(f"{s1},Z{s2}->Z{out}", a, b.coef), b.order)
    return np.einsum(subscripts, a, b)


def _compose(x, derivs):
    """``f(x)`` from the derivatives ``f^(k)(x0)``, k = 0..order (Horner form)."""
    K = x.order
    h = x - x.value
    r = Jet.constant(x.space, derivs[K] / math.factorial(K), K)
    for k in range(K - 1, -1, -1):
        r = r * h + derivs[k] / math.factorial(k)
    return r


def _check_finite(arr, what):
    if not np.all(np.isfinite(arr)):
        raise NonFiniteValue(f"{what} produced a non-finite value")


def exp(x):
    if not isinstance(x, Jet):
        return np.exp(x)
    e = np.exp(x.value)
    _check_finite(e, "exp")
    return _compose(x, [e] * (x.order + 1))


def _log_guard(x0):
    x0 = np.asarray(x0)
    mod = np.abs(x0)
    bad = (mod <= 1e-12) | ((x0.real <= 0) & (np.abs(x0.imag) <= 1e-12 * np.maximum(1.0, mod)))
    if np.any(bad):
        raise DomainError("log evaluated at a non-positive or vanishing argument")


def log(x):
    if not isinstance(x, Jet):
        _log_guard(x)
        return np.log(np.asarray(x, dtype=complex))
    x0 = x.value
    _log_guard(x0)
    derivs = [np.log(x0.astype(complex))]
    for k in range(1, x.order + 1):
        derivs.append((-1) ** (k - 1) * math.factorial(k - 1) / x0 ** k)
    return _compose(x, derivs)


def reciprocal(x, guard=1e-12):
    x0 = x.value if isinstance(x, Jet) else np.asarray(x)
    if np.any(np.abs(x0) < guard):
        raise DomainError("division by a quantity smaller than %g" % guard)
    if not isinstance(x, Jet):
        return 1.0 / x0
    derivs = [(-1) ** k * math.factorial(k) / x0 ** (k + 1) for k in range(x.order + 1)]
    return _compose(x, derivs)


def inv(A):
    """Inverse of a square-matrix-valued jet (Neumann series about the value)."""
    A0inv = np.linalg.inv(A.value)
    Y = -((A - A.value) @ A0inv)
    eye = np.broadcast_to(np.eye(A.shape[-1]), A.shape)
    S = Jet.constant(A.space, eye, A.order)
    for _ in range(A.order):
        S = Y @ S + eye
    return A0inv @ S


def logdet(A):
    """``log det A`` for a square-matrix-valued jet."""
    A0 = A.value
    sign, ld = np.linalg.slogdet(A0)
    base = ld + np.log(sign.astype(complex))
    K = A.order
    if K == 0:
        return Jet.constant(A.space, base, 0)
    Y = np.linalg.inv(A0) @ (A - A0)
    eye = np.broadcast_to(np.eye(A.shape[-1]), A.shape)
    T = Jet.constant(A.space, eye * ((-1) ** (K + 1) / K), K)
    for k in range(K - 1, 0, -1):
        T = Y @ T + eye * ((-1) ** (k + 1) / k)
    return (Y @ T).trace() + base


def stack(items, shape=None):
    """Assemble scalar jets (or numbers) into one array-valued jet.

    ``items`` is a flat sequence reshaped to ``shape``; at least one item must
    be a jet so the space is known.
    """
    items = list(items)
    space = next(x.space for x in items if isinstance(x, Jet))
    order = min(x.order for x in items if isinstance(x, Jet))
    cols = []
    for x in items:
        if isinstance(x, Jet):
            cols.append(x.coef)
        else:
            cols.append(Jet.constant(space, x).coef)
    coef = np.stack(cols, axis=-1)
    if shape is not None:
        coef = coef.reshape(coef.shape[:-1] + tuple(shape))
    return Jet(space, coef, order)


def transpose(x, axes):
    """Permute the value axes of a jet (or array)."""
    if not isinstance(x, Jet):
        return np.transpose(x, axes)
    return Jet(x.space, np.transpose(x.coef, (0,) + tuple(a + 1 for a in axes)), x.order)


def value(x):
    """Base-point value of a jet; numbers pass through."""
    return x.value if isinstance(x, Jet) else np.asarray(x)
