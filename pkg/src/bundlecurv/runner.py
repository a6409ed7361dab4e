"""Run configuration, the registry of verification checks and report output.

A run evaluates a list of named checks, each producing one or more
:class:`~bundlecurv.report.VerificationReport` records, and writes them to
``report.json`` (plus ``report.csv`` on request).  Exceptions raised inside a
check become FAIL records; nothing else aborts a run.

Configuration files are JSON objects or INI files::

    [run]
    checks = certify, total-curvature
    seed = 42
    points = 5
    csv = true

    [tolerances]
    frame_curvature = 1e-5
"""

from __future__ import annotations

import configparser
import csv
import json
import math
import time
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import catalog
from .errors import BundleCurvError, ConfigError
from .report import VerificationReport, discrepancy_report, failure_report, jsonable

# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass
class RunConfig:
    """Parameters of a verification run.

    Attributes
    ----------
    checks : list of str
        Check names or group names (see :data:`GROUPS`).
    seed : int
    points : int
        Seeded sample points per catalog entry in the curvature sweeps.
    l_max : int
        Sphere truncation.
    taus : list of complex
        Moduli at which the theta direct image is checked.
    tolerances : dict
        Per-check overrides of the default tolerance.
    out : str
        Output directory.
    csv : bool
        Also write ``report.csv``.
    threads : int or None
    """

    checks: list = field(default_factory=lambda: ["report"])
    seed: int = 42
    points: int = 5
    l_max: int = 48
    taus: list = field(default_factory=lambda: [1j, 1 + 1j, 2j, 0.5 + 0.8j])
    tolerances: dict = field(default_factory=dict)
    out: str = "bundlecurv-out"
    csv: bool = False
    threads: int | None = None

    def __post_init__(self):
        if isinstance(self.checks, str):
            self.checks = [c.strip() for c in self.checks.split(",") if c.strip()]
        for name in self.checks:
            if name not in GROUPS and name not in CHECKS:
                raise ConfigError(f"unknown check {name!r}", "checks")
        for key, val in (("seed", self.seed), ("points", self.points), ("l_max", self.l_max)):
            if not isinstance(val, (int, np.integer)) or isinstance(val, bool):
                raise ConfigError(f"{key} must be an integer", key)
        if self.points < 1:
            raise ConfigError("points must be positive", "points")
        if self.l_max < 4:
            raise ConfigError("l_max must be at least 4", "l_max")
        if self.threads is not None and (not isinstance(self.threads, int) or self.threads < 1):
            raise ConfigError("threads must be a positive integer", "threads")
        try:
            self.taus = [complex(t) if not isinstance(t, (list, tuple)) else complex(*t)
                         for t in self.taus]
        except (TypeError, ValueError):
            raise ConfigError("taus must be complex numbers", "taus") from None
        if any(t.imag <= 0 for t in self.taus):
            raise ConfigError("taus must lie in the upper half plane", "taus")
        for key, tol in self.tolerances.items():
            if key not in CHECKS:
                raise ConfigError(f"tolerance for unknown check {key!r}", f"tolerances.{key}")
            try:
                tol = float(tol)
            except (TypeError, ValueError):
                raise ConfigError("tolerance must be a number", f"tolerances.{key}") from None
            if not math.isfinite(tol) or tol < 0:
                raise ConfigError(f"tolerance must be nonnegative, got {tol}", f"tolerances.{key}")
            self.tolerances[key] = tol

    def tol(self, name, default):
        return self.tolerances.get(name, default)

    def rng(self, name):
        """Generator seeded from the run seed and the check name."""
        return np.random.default_rng([self.seed, zlib.crc32(name.encode())])

    def selected(self):
        out = []
        for name in self.checks:
            for c in GROUPS.get(name, [name]):
                if c not in out:
                    out.append(c)
        return out

    @classmethod
    def from_dict(cls, data):
        known = set(cls.__dataclass_fields__)
        bad = sorted(set(data) - known)
        if bad:
            raise ConfigError(f"unknown configuration keys: {', '.join(bad)}", bad[0])
        return cls(**data)

    @classmethod
    def load(cls, path):
        """Read a JSON (``.json``) or INI (any other suffix) configuration."""
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read configuration: {exc}", str(path)) from None
        if path.suffix == ".json":
            try:
                data = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"invalid JSON: {exc}", str(path)) from None
            if not isinstance(data, dict):
                raise ConfigError("configuration must be a JSON object", str(path))
            return cls.from_dict(data)
        parser = configparser.ConfigParser()
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"invalid INI file: {exc}", str(path)) from None
        data = {}
        if parser.has_section("run"):
            sec = parser["run"]
            for key in sec:
                if key in ("seed", "points", "l_max", "threads"):
                    try:
                        data[key] = sec.getint(key)
                    except ValueError:
                        raise ConfigError(f"{key} must be an integer", f"run.{key}") from None
                elif key == "csv":
                    data[key] = sec.getboolean(key)
                elif key == "taus":
                    data[key] = [complex(t.strip().replace(" ", "")) for t in sec[key].split(",")]
                else:
                    data[key] = sec[key]
        if parser.has_section("tolerances"):
            data["tolerances"] = dict(parser["tolerances"])
        return cls.from_dict(data)


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

CHECKS = {}
GROUPS = {}


def check(name, *groups):
    def deco(fn):
        CHECKS[name] = fn
        for gname in groups + ("report",):
            GROUPS.setdefault(gname, []).append(name)
        return fn
    return deco


def _bundle(name):
    from .bundle import BaseMetric, BundleMetric
    entry = catalog.get(name)
    G = BundleMetric.from_catalog(name)
    g = BaseMetric(entry.base_potential, entry.base_dim, "base of " + name)
    return G, g


def _value_report(name, value, oracle, tol, provenance="derived", **kw):
    disc = abs(value - oracle)
    return discrepancy_report(name, value, oracle, disc, tol, provenance, **kw)


# -- certify -----------------------------------------------------------------

@check("chern_reference", "certify")
def _chern_reference(cfg):
    from .bundle import BundleMetric, chern_curvature
    tol = cfg.tol("chern_reference", 1e-8)
    out = []
    for name, oracle in (("o_minus_one", -1.0), ("gauss", 1.0)):
        R = chern_curvature(BundleMetric.from_catalog(name), [0.0])
        out.append(_value_report(f"chern_reference[{name}]", R.data[0, 0, 0, 0], oracle, tol,
                                 inputs={"bundle": name, "z": [0.0]}))
    return out


@check("griffiths_vs_nakano", "certify")
def _griffiths_vs_nakano(cfg):
    from .bundle import chern_curvature, griffiths_extremum, nakano_certificate
    rng = cfg.rng("griffiths_vs_nakano")
    tol = cfg.tol("griffiths_vs_nakano", 1e-9)
    out = []
    for entry in catalog.entries("bundle"):
        G, g = _bundle(entry.name)
        worst = -np.inf
        for z, _ in entry.sample_points(rng, min(cfg.points, 5)):
            R = chern_curvature(G, z)
            gz = g.g(z)
            gr = griffiths_extremum(R, gz, G(z), seed=cfg.seed)
            nk = nakano_certificate(R, gz, G(z))
            scale = gr.scale
            worst = max(worst, (nk.extremal - gr.extremal) / scale)
            if G.n == 1 or G.r == 1:
                worst = max(worst, abs(nk.extremal - gr.extremal) / scale)
        out.append(VerificationReport(f"griffiths_vs_nakano[{entry.name}]", worst, 0.0, tol,
                                      tol - worst, "identity", inputs={"bundle": entry.name}))
    return out


@check("gap_example", "certify")
def _gap_example(cfg):
    from .bundle import gap_example, griffiths_extremum, griffiths_grid_minimum, nakano_certificate
    R = gap_example()
    I2 = np.eye(2)
    brute, count, _ = griffiths_grid_minimum(R, I2, I2)
    alt = griffiths_extremum(R, I2, I2, seed=cfg.seed)
    nak = nakano_certificate(R, I2, I2)
    tg = cfg.tol("gap_example", 1e-3)
    return [
        _value_report("gap_example[griffiths_brute_force]", brute, 0.25, tg,
                      details={"evaluations": count}),
        _value_report("gap_example[griffiths_alternating]", alt.extremal, 0.25, tg,
                      details={"heuristic": alt.heuristic}),
        _value_report("gap_example[nakano]", nak.extremal, -0.5, 1e-9),
    ]


@check("nehari_bound", "certify")
def _nehari(cfg):
    from .bundle import nehari_l2_bound
    val = nehari_l2_bound(2)
    ok = val == 9 * math.pi
    return [VerificationReport("nehari_bound[g=2]", val, 9 * math.pi, 0.0, 0.0 if ok else -1.0,
                               "derived", inputs={"genus": 2})]


@check("schwarzian", "certify")
def _schwarzian(cfg):
    from .dsl import parse_expr, schwarzian
    tol = cfg.tol("schwarzian", 1e-9)
    out = []
    for text, pt, oracle, prov in (("(2*z1 + 1)/(z1 + 3)", 0.4 + 0.2j, 0.0, "identity"),
                                   ("exp(z1)", 0.0, -0.5, "derived"),
                                   ("z1^2", 1.0, -1.5, "derived")):
        val = schwarzian(parse_expr(text), pt)
        out.append(_value_report(f"schwarzian[{text}]", val, oracle, tol, prov,
                                 inputs={"f": text, "point": pt}))
    return out


@check("linear_algebra", "certify")
def _linear_algebra(cfg):
    from .tensor import MultiIndexTensor, contract, hermitian_eigen
    w, _ = hermitian_eigen(np.array([[1.0, 1.5], [1.5, 1.0]]))
    psi = MultiIndexTensor(("base", "base-bar"), np.array([[1.0 + 0j]]))
    val = contract([psi, psi], [(1, 2)], {0: np.array([[2.0]])}).data[0, 0] - 1.0
    return [
        discrepancy_report("hermitian_eigen[[1,1.5],[1.5,1]]", w, [-0.5, 2.5],
                           float(np.max(np.abs(w - [-0.5, 2.5]))), 1e-12, "derived"),
        _value_report("contract[Psi Omega^-1 Psi - Psi]", val, -0.5, 1e-12),
    ]


# -- total space --------------------------------------------------------------

# every bundle entry; gauss is sampled where Omega stays positive
CURVATURE_ENTRIES = ("flat", "o_minus_one", "gauss", "poincare", "subbundle_rank2")
# entries with Griffiths semi-negative curvature, where the tautological sign applies
NEGATIVE_ENTRIES = ("flat", "o_minus_one", "poincare", "subbundle_rank2")


@check("frame_curvature", "total-curvature")
def _frame_curvature(cfg):
    from .total_space import total_curvature
    rng = cfg.rng("frame_curvature")
    tol = cfg.tol("frame_curvature", 1e-5)
    out = []
    for name in CURVATURE_ENTRIES:
        G, g = _bundle(name)
        entry = catalog.get(name)
        worst = 0.0
        vert = 0.0
        for p in entry.sample_points(rng, cfg.points):
            c = total_curvature(G, g, p, rtol=tol, raise_on_mismatch=False)
            worst = max(worst, c.discrepancy)
            vert = max(vert, c.vertical_max)
        out.append(discrepancy_report(f"frame_curvature[{name}]", worst, 0.0, worst, tol, "identity",
                                      inputs={"bundle": name, "points": cfg.points, "seed": cfg.seed},
                                      details={"vertical_max": vert}))
    return out


@check("vertical_block", "total-curvature")
def _vertical(cfg):
    from .total_space import total_curvature, vertical_block
    rng = cfg.rng("vertical_block")
    tol = cfg.tol("vertical_block", 1e-9)
    out = []
    for name in CURVATURE_ENTRIES:
        G, g = _bundle(name)
        worst = 0.0
        for p in catalog.get(name).sample_points(rng, min(cfg.points, 5)):
            c = total_curvature(G, g, p)
            worst = max(worst, float(np.max(np.abs(vertical_block(c)))), c.vertical_max)
        out.append(discrepancy_report(f"vertical_block[{name}]", worst, 0.0, worst, tol, "derived",
                                      inputs={"bundle": name}))
    return out


@check("decomposition", "total-curvature")
def _decomposition(cfg):
    from .total_space import decomposition_check, potential_crosscheck
    rng = cfg.rng("decomposition")
    out = []
    for entry in catalog.entries("bundle"):
        G, g = _bundle(entry.name)
        worst_d = worst_p = 0.0
        for p in entry.sample_points(rng, cfg.points):
            worst_d = max(worst_d, decomposition_check(G, p).details["discrepancy"])
            worst_p = max(worst_p, potential_crosscheck(G, g, p).details["discrepancy"])
        td = cfg.tol("decomposition", 1e-7)
        out.append(discrepancy_report(f"decomposition[{entry.name}]", worst_d, 0.0, worst_d, td,
                                      "identity", inputs={"bundle": entry.name}))
        out.append(discrepancy_report(f"potential_crosscheck[{entry.name}]", worst_p, 0.0, worst_p,
                                      1e-6, "identity", inputs={"bundle": entry.name}))
    return out


@check("omega_blocks", "total-curvature")
def _omega_blocks(cfg):
    from .total_space import assemble_omega
    G, g = _bundle("o_minus_one")
    b = assemble_omega(G, g, ([0.0], [1.0]))
    disc = max(abs(b.base[0, 0] - 2.0), abs(b.fiber[0, 0] - 1.0))
    return [discrepancy_report("omega_blocks[o_minus_one,(0,1)]", [b.base, b.fiber], [[[2.0]], [[1.0]]],
                               disc, 1e-12, "derived")]


@check("dG_norm", "total-curvature")
def _dG_norm(cfg):
    from .total_space import dG_norm_check
    tol = cfg.tol("dG_norm", 1e-8)
    out = []
    for name, z, v, oracle in (("o_minus_one", 0.0, 0.0, 0.0), ("o_minus_one", 0.0, 2.0, 4.0),
                               ("gauss", 1 + 1j, 3.0, 9 * math.exp(-2.0))):
        G, g = _bundle(name)
        r = dG_norm_check(G, g, ([z], [v]), tol=tol)
        r.check = f"dG_norm[{name},z={z},v={v}]"
        disc = max(r.details["discrepancy"],
                   abs(r.details["rows"][0]["G"] - oracle) / max(1.0, oracle))
        out.append(discrepancy_report(r.check, r.value, oracle, disc, tol, "identity",
                                      inputs=r.inputs, details=r.details))
    return out


@check("tautological_pairing", "total-curvature")
def _tautological(cfg):
    from .total_space import tautological_pairing
    out = []
    G, g = _bundle("o_minus_one")
    t = tautological_pairing(G, g, ([0.0], [1.0]), [1.0])
    out.append(_value_report("tautological_pairing[o_minus_one,(0,1)]", t.value, -0.5, 1e-8))
    rng = cfg.rng("tautological_pairing")
    for name in NEGATIVE_ENTRIES:
        G, g = _bundle(name)
        worst = -np.inf
        strict_ok = True
        for z, v in catalog.get(name).sample_points(rng, cfg.points):
            xi = rng.normal(size=G.n) + 1j * rng.normal(size=G.n)
            t = tautological_pairing(G, g, (z, v), xi)
            worst = max(worst, t.value / t.scale)
            if name != "flat":
                strict_ok &= t.strictly_negative
        tol = cfg.tol("tautological_pairing", 1e-10)
        margin = tol - worst if strict_ok else -1.0
        out.append(VerificationReport(f"tautological_pairing[{name}]", worst, 0.0, tol, margin,
                                      "derived", inputs={"bundle": name, "points": cfg.points},
                                      details={"strictly_negative_off_zero_section": strict_ok}))
    return out


@check("ricci", "total-curvature")
def _ricci(cfg):
    from .total_space import ricci_report, teichmuller_ricci_bound
    G, g = _bundle("poincare")
    out = []
    for z in (0.0, 0.3 + 0.2j):
        r = ricci_report(G, g, ([z], [0.0]), tol=cfg.tol("ricci", 1e-6))
        r.check = f"ricci[poincare,z={z}]"
        out.append(r)
    b = teichmuller_ricci_bound(2)
    out.append(_value_report("teichmuller_ricci_bound[g=2]", b, -1 / math.pi, 0.0))
    return out


@check("primitive", "total-curvature")
def _primitive(cfg):
    from .total_space import GridSpec, primitive_check
    out = []
    G, g = _bundle("flat")
    r = primitive_check(G, g)
    r.check = "primitive[flat]"
    out.append(r)
    G, g = _bundle("o_minus_one")
    r = primitive_check(G, g)
    r.check = "primitive[o_minus_one,R=4]"
    out.append(r)

    def bad_beta(zs):
        zs = np.asarray(zs, dtype=complex)
        return np.array([0.5 * zs[0]]), np.array([0.0 * zs[0]])
    r = primitive_check(G, g, beta=bad_beta, grid=GridSpec())
    detected = r.status == "FAIL" and "precondition" in r.message
    out.append(VerificationReport("primitive[bad_beta_rejected]", r.message, "precondition failure",
                                  0.0, 0.0 if detected else -1.0, "identity"))
    return out


# -- spectral -----------------------------------------------------------------

_SPHERE_CACHE = {}


def _sphere(k, l_max):
    from .spectral.sphere import build_sphere_basis
    if (k, l_max) not in _SPHERE_CACHE:
        _SPHERE_CACHE[(k, l_max)] = build_sphere_basis(k, l_max)
    return _SPHERE_CACHE[(k, l_max)]


@check("sphere_spectrum", "spectral-verify")
def _sphere_spectrum(cfg):
    from .spectral.sphere import _harmonics_in_chart, quadrature_eigenvalue
    b = _sphere(1, cfg.l_max)
    lam = quadrature_eigenvalue(b, lambda x: _harmonics_in_chart(x)[0][1])
    err = b.gram_error(25)
    return [_value_report("sphere_eigenvalue[l=1,k=1]", lam, 2.0, cfg.tol("sphere_spectrum", 1e-8)),
            discrepancy_report("sphere_gram[first 25]", err, 0.0, err, 1e-8, "identity")]


@check("sphere_positivity", "spectral-verify")
def _sphere_positivity(cfg):
    from .spectral.sphere import positivity_check
    return [positivity_check(_sphere(1, cfg.l_max), 100, seed=cfg.seed,
                             tol=cfg.tol("sphere_positivity", 1e-6))]


@check("sphere_sections", "spectral-verify")
def _sphere_sections(cfg):
    from .spectral.sphere import corollary_resolvent_check, section_bound_check, sphere_sections
    tol = cfg.tol("sphere_sections", 1e-6)
    b1 = _sphere(1, cfg.l_max)
    b2 = _sphere(2, cfg.l_max)
    r1 = section_bound_check(b1, sphere_sections(b1, 1), 50, cfg.seed, tol)
    r1.check = "section_bound[O(1),k=1]"
    r2 = section_bound_check(b2, sphere_sections(b2, 4), 50, cfg.seed, tol)
    r2.check = "section_bound[O(4),k=2]"
    r3 = corollary_resolvent_check(b2, sphere_sections(b2, 4), seed=cfg.seed, tol=tol)
    return [r1, r2, r3]


@check("torus_spectrum", "spectral-verify")
def _torus_spectrum(cfg):
    from .spectral.base import operator_apply, resolvent_apply
    from .spectral.torus import TorusBasis
    rng = cfg.rng("torus_spectrum")
    b = TorusBasis(1j)
    mask = (np.abs(b.k1) <= 6) & (np.abs(b.k2) <= 6)
    c = np.where(mask, rng.normal(size=mask.shape) + 1j * rng.normal(size=mask.shape), 0)
    d = np.where(mask, rng.normal(size=mask.shape) + 1j * rng.normal(size=mask.shape), 0)
    f, g = b.synthesis(c), b.synthesis(d)
    pars = abs(b.norm(f) ** 2 - np.sum(np.abs(c) ** 2)) / np.sum(np.abs(c) ** 2)
    sa = abs(b.inner(operator_apply(b, f), g) - b.inner(f, operator_apply(b, g)))
    sa /= b.norm(f) * b.norm(g) * np.max(b.eigenvalues[mask])
    contr = b.norm(resolvent_apply(b, f)) - b.norm(f)
    return [discrepancy_report("torus_parseval", pars, 0.0, pars, 1e-8, "identity"),
            discrepancy_report("torus_self_adjoint", sa, 0.0, sa, 1e-8, "identity"),
            VerificationReport("torus_resolvent_contraction", contr, 0.0, 0.0, -contr, "identity")]


FAMILY_POINTS = {"theta_family": [1j, 0.3 + 0.2j], "product_family": [0.2, 0.3j],
                 "disk_family": [0.1, 0.4 + 0.1j]}
FAMILY_C = {"theta_family": 0.0, "product_family": 1.0, "disk_family": 0.0}
FAMILY_MU = {"theta_family": 0.25, "product_family": 0.0, "disk_family": 0.0}


@check("family_geometry", "spectral-verify")
def _family_geometry(cfg):
    from .spectral.family import (FiberFamily, geodesic_curvature_report,
                                  hessian_decomposition_check, kodaira_spencer_report)
    out = []
    for name, pt in FAMILY_POINTS.items():
        fam = FiberFamily.from_catalog(name)
        out.append(geodesic_curvature_report(fam, pt, [[FAMILY_C[name]]]))
        out[-1].check = f"geodesic_curvature[{name}]"
        out.append(hessian_decomposition_check(fam, pt, cfg.tol("family_geometry", 1e-7)))
        out[-1].check = f"hessian_decomposition[{name}]"
        out.append(kodaira_spencer_report(fam, pt, FAMILY_MU[name]))
        out[-1].check = f"kodaira_spencer[{name}]"
    return out


@check("schumacher", "spectral-verify")
def _schumacher(cfg):
    from .spectral.family import FiberFamily, schumacher_identity_check
    out = []
    for name, pt in FAMILY_POINTS.items():
        r = schumacher_identity_check(FiberFamily.from_catalog(name), pt,
                                      cfg.tol("schumacher", 1e-6))
        r.check = f"schumacher[{name}]"
        out.append(r)
    return out


# -- direct image -------------------------------------------------------------

@check("theta_gram", "direct-image")
def _theta_gram(cfg):
    from .spectral.torus import direct_image_gram, gram_curvature
    tol = cfg.tol("theta_gram", 1e-6)
    out = []
    for tau, oracle in ((1j, 0.125), (2j, 1 / 32)):
        out.append(_value_report(f"gram_curvature[tau={tau}]", gram_curvature(tau), oracle, tol,
                                 inputs={"tau": tau}))
    h0, h1 = direct_image_gram(0.3 + 1.1j), direct_image_gram(1.3 + 1.1j)
    out.append(_value_report("theta_gram_periodicity[tau -> tau + 1]", h1, h0, 1e-10))
    out.append(_value_report("theta_gram[tau=i]", direct_image_gram(1j), math.sqrt(2), 1e-10))
    return out


@check("berndtsson", "direct-image")
def _berndtsson(cfg):
    from .spectral.torus import berndtsson_check, berndtsson_curvature
    out = []
    for tau in cfg.taus:
        r = berndtsson_check(tau, cfg.tol("berndtsson", 1e-3))
        r.check = f"berndtsson_vs_gram[tau={tau}]"
        out.append(r)
    out.append(_value_report("berndtsson[u=0]", berndtsson_curvature(1j, 0.0), 0.0, 0.0))
    return out


@check("nakano_bound", "direct-image")
def _nakano_bound(cfg):
    from .spectral.torus import nakano_bound_check
    return [nakano_bound_check(1j)]


# ---------------------------------------------------------------------------
# running
# ---------------------------------------------------------------------------

def run_checks(cfg):
    """Evaluate the selected checks; exceptions become FAIL records."""
    reports = []
    for name in cfg.selected():
        t0 = time.perf_counter()
        try:
            got = CHECKS[name](cfg)
        except (BundleCurvError, ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
            got = [failure_report(name, exc, {"seed": cfg.seed})]
        dt = (time.perf_counter() - t0) / max(len(got), 1)
        for r in got:
            r.wall_time = r.wall_time or dt
            r.inputs.setdefault("group_check", name)
        reports.extend(got)
    return reports


def summarize(reports):
    counts = {s: 0 for s in ("PASS", "FAIL", "REPORT-ONLY")}
    for r in reports:
        counts[r.status] += 1
    return counts


def _coordinates(inputs):
    for key in ("point", "tau", "z"):
        if key in inputs:
            val = jsonable(inputs[key])
            if key == "z" and "v" in inputs:
                val = [val, jsonable(inputs["v"])]
            return json.dumps(val)
    return ""


def run(cfg):
    """Run, write ``report.json`` (and ``report.csv``) into ``cfg.out``.

    Returns
    -------
    int
        Exit code: 0 iff no check failed.
    """
    t0 = time.perf_counter()
    reports = run_checks(cfg)
    counts = summarize(reports)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    doc = {
        "seed": cfg.seed,
        "checks": cfg.selected(),
        "summary": counts,
        "reports": [r.to_dict() for r in reports],
        "wall_time": time.perf_counter() - t0,
    }
    (out / "report.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    if cfg.csv:
        with open(out / "report.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["coordinates", "quantity", "value"])
            for r in reports:
                w.writerow([_coordinates(r.inputs), r.check, json.dumps(jsonable(r.value))])
    return 0 if counts["FAIL"] == 0 else 1


def list_catalog():
    """Lines describing every catalog entry and its known facts."""
    lines = []
    for e in catalog.entries():
        lines.append(f"{e.name} [{e.kind}, base dim {e.base_dim}, rank {e.fiber_rank}]: {e.description}")
        if e.metric:
            lines.append("  metric: " + "; ".join(", ".join(row) for row in e.metric))
        if e.potential:
            lines.append(f"  potential: {e.potential}")
        for f in e.facts:
            lines.append(f"  {f.quantity} = {f.value}  ({f.provenance})")
    return lines
