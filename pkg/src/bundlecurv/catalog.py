"""Named model metrics with analytic facts used as test oracles.

Each entry is one of three kinds:

``bundle``
    Hermitian metric ``G`` on a trivialised bundle of rank ``r`` over an
    ``n``-dimensional chart, optionally paired with a default base potential.
``base``
    Kähler potential of a base metric.
``family``
    Weight ``phi(z, v)`` of a line bundle on a one-parameter family of
    curves, with ``z`` the base and ``v`` the fiber coordinate.

Entry names are stable strings; see :func:`names`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dsl import parse_expr


@dataclass(frozen=True)
class Fact:
    """A known value attached to a catalog entry.

    ``provenance`` is ``"derived"`` for a hand or symbolic computation,
    ``"trivial"`` for an immediate consequence of the definition.
    """

    quantity: str
    value: object
    provenance: str


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    kind: str
    base_dim: int
    fiber_rank: int
    metric: tuple = ()          # rows of entry strings for bundles
    potential: str = ""         # base potential or family weight
    base_potential: str = ""    # default base metric paired with a bundle
    z_radius: float = 0.9
    v_radius: float = 2.0
    griffiths_negative: bool = False
    description: str = ""
    facts: tuple = field(default_factory=tuple)

    @property
    def dims(self):
        return (self.base_dim, self.fiber_rank)

    def metric_asts(self):
        return tuple(tuple(parse_expr(e, (self.base_dim, 0)) for e in row) for row in self.metric)

    def potential_ast(self):
        dims = (self.base_dim, self.fiber_rank) if self.kind == "family" else (self.base_dim, 0)
        return parse_expr(self.potential, dims)

    def sample_points(self, rng, count):
        """Uniform samples ``(z, v)`` from the product of the chart disks."""
        def disk(dim, radius):
            pts = []
            for _ in range(count):
                x = rng.normal(size=2 * dim)
                x /= max(np.linalg.norm(x), 1e-300)
                x *= radius * rng.uniform() ** (1.0 / (2 * dim))
                pts.append(x[:dim] + 1j * x[dim:])
            return pts
        zs = disk(self.base_dim, self.z_radius)
        vs = disk(self.fiber_rank, self.v_radius) if self.fiber_rank else [np.zeros(0)] * count
        return list(zip(zs, vs))


def fs_potential(k=1, n=1):
    """Fubini-Study potential ``k log(1 + |z|^2)`` in ``n`` variables."""
    s = " + ".join(f"abs2(z{a + 1})" for a in range(n))
    return f"{k}*log(1 + {s})" if k != 1 else f"log(1 + {s})"


_ENTRIES = (
    CatalogEntry(
        "flat", "bundle", 1, 1, metric=(("1",),), base_potential=fs_potential(),
        griffiths_negative=True,
        description="trivial line bundle with the constant metric",
        facts=(Fact("R(z)", 0.0, "trivial"), Fact("Omega base block", "g", "trivial"))),
    CatalogEntry(
        "o_minus_one", "bundle", 1, 1, metric=(("1 + abs2(z1)",),),
        base_potential=fs_potential(), z_radius=0.9, v_radius=2.0, griffiths_negative=True,
        description="tautological-type line bundle, G = 1 + |z|^2",
        facts=(Fact("R(0)", -1.0, "derived"),
               Fact("R(z)", "-1/(1+|z|^2)", "derived"),
               Fact("Omega base block at (0, v=1) with FS base", 2.0, "derived"),
               Fact("tautological pairing at (0, v=1)", -0.5, "derived"))),
    CatalogEntry(
        "gauss", "bundle", 1, 1, metric=(("exp(-abs2(z1))",),),
        # |v| < 0.45 keeps the base block of Omega positive for |z| < 0.9
        base_potential=fs_potential(), z_radius=0.9, v_radius=0.45, griffiths_negative=False,
        description="Gaussian weight e^{-|z|^2}; Griffiths positive",
        facts=(Fact("R(0)", 1.0, "derived"), Fact("R(z)", "exp(-|z|^2)", "derived"))),
    CatalogEntry(
        "poincare", "bundle", 1, 1, metric=(("2/(1 - abs2(z1))^2",),),
        potential="-2*log(1 - abs2(z1))", base_potential="-2*log(1 - abs2(z1))",
        z_radius=0.7, v_radius=1.0, griffiths_negative=True,
        description="holomorphic tangent bundle of the Poincare disk with G = g",
        facts=(Fact("g(z)", "2/(1-|z|^2)^2", "derived"),
               Fact("Ric_g(xi, xi) for unit xi", -1.0, "derived"),
               Fact("restricted Ricci of the total space, unit xi", -2.0, "derived"))),
    CatalogEntry(
        "fs_k", "base", 1, 0, potential=fs_potential(1),
        description="Fubini-Study potential k log(1 + |z|^2) (k = 1 stored; see fs_potential)",
        facts=(Fact("g(0)", 1.0, "derived"),)),
    CatalogEntry(
        "subbundle_rank2", "bundle", 2, 2,
        metric=(("1 + abs2(z1) + abs2(z2)", "-i*abs2(z2)"),
                ("i*abs2(z2)", "1 + abs2(z1) + 2*abs2(z2)")),
        base_potential=fs_potential(1, 2), z_radius=0.6, v_radius=1.5, griffiths_negative=True,
        description="Gram metric of a holomorphic frame of a rank-2 subbundle of a flat bundle",
        facts=(Fact("Griffiths sign", "negative", "derived"),)),
    CatalogEntry(
        "theta_family", "family", 1, 1, potential="2*pi*im(v1)^2/im(z1)",
        description="theta line bundle weight on the elliptic curves C/(Z + tau Z); z1 = tau, v1 = w",
        facts=(Fact("c(phi)", 0.0, "derived"),
               Fact("|mu_tau|^2 at tau = i", 0.25, "derived"),
               Fact("direct-image curvature at tau = i", 0.125, "derived"))),
    CatalogEntry(
        "product_family", "family", 1, 1, potential="abs2(z1) + abs2(v1)",
        v_radius=1.0,
        description="product weight |z|^2 + |v|^2",
        facts=(Fact("c(phi)", 1.0, "derived"), Fact("mu", 0.0, "trivial"))),
    CatalogEntry(
        "disk_family", "family", 1, 1, potential="-2*log(1 - abs2(v1)) + log(2)",
        v_radius=0.7,
        description="constant family of hyperbolic disks; satisfies e^phi = det phi",
        facts=(Fact("c(phi)", 0.0, "trivial"), Fact("mu", 0.0, "trivial"))),
)

_BY_NAME = {e.name: e for e in _ENTRIES}


def names():
    return [e.name for e in _ENTRIES]


def get(name):
    """Look up a catalog entry by its stable name."""
    try:
        return _BY_NAME[name]
    except KeyError:
        raise KeyError(f"unknown catalog entry {name!r}; known: {', '.join(names())}") from None


def entries(kind=None):
    return [e for e in _ENTRIES if kind is None or e.kind == kind]


def fs_k(k):
    """Base entry for ``k log(1 + |z|^2)``."""
    base = get("fs_k")
    return CatalogEntry(base.name, "base", 1, 0, potential=fs_potential(k),
                        description=base.description,
                        facts=(Fact("g(0)", float(k), "derived"),))
