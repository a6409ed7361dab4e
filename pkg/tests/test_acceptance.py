"""Acceptance criteria, one test each, at their stated tolerances.

Every test prints a line ``[criterion N] PASS|FAIL ...``; run with
``pytest tests/test_acceptance.py -v -s`` (or ``python3 tests/test_acceptance.py``)
to see them.
"""

import json
import math
import time

import numpy as np
import pytest

from bundlecurv import catalog
from bundlecurv.bundle import (BaseMetric, BundleMetric, chern_curvature, gap_example,
                               griffiths_extremum, griffiths_grid_minimum, nakano_certificate,
                               nehari_l2_bound)
from bundlecurv.dsl import schwarzian
from bundlecurv.runner import RunConfig, run
from bundlecurv.spectral.family import (FiberFamily, hessian_decomposition_check,
                                        schumacher_identity_check)
from bundlecurv.spectral.sphere import (build_sphere_basis, positivity_check, section_bound_check,
                                        sphere_sections)
from bundlecurv.spectral.torus import (berndtsson_curvature, berndtsson_check, direct_image_gram,
                                       gram_curvature)
from bundlecurv.total_space import (decomposition_check, dG_norm, dG_norm_check, ricci_report,
                                    tautological_pairing, teichmuller_ricci_bound,
                                    total_curvature, vertical_block)

SEED = 42
POINTS = 50
BUNDLES = [e.name for e in catalog.entries("bundle")]
STRICTLY_NEGATIVE = ["o_minus_one", "poincare", "subbundle_rank2"]


@pytest.fixture
def verdict(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {number:2d}] {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail
    return emit


def pair(name):
    e = catalog.get(name)
    return BundleMetric.from_catalog(name), BaseMetric(e.base_potential, e.base_dim)


def sweep(name):
    rng = np.random.default_rng([SEED, BUNDLES.index(name)])
    return catalog.get(name).sample_points(rng, POINTS)


def family_points(name, count=20):
    rng = np.random.default_rng([SEED, 100 + len(name)])
    pts = []
    for _ in range(count):
        if name == "theta_family":
            tau = rng.uniform(-0.5, 0.5) + 1j * rng.uniform(0.6, 2.0)
            w = rng.uniform() + tau * rng.uniform()
            pts.append([tau, w])
        else:
            radius = catalog.get(name).v_radius
            z = rng.uniform(-0.5, 0.5) + 1j * rng.uniform(-0.5, 0.5)
            v = radius * math.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
            pts.append([z, v])
    return pts


def test_criterion_01_curvature_oracle(verdict):
    t0 = time.perf_counter()
    worst = 0.0
    for name in BUNDLES:
        G, g = pair(name)
        for p in sweep(name):
            worst = max(worst, total_curvature(G, g, p, raise_on_mismatch=False).discrepancy)
    dt = time.perf_counter() - t0
    verdict(1, worst <= 1e-5 and dt <= 60,
            f"max relative discrepancy {worst:.2e} (tol 1e-5) over {len(BUNDLES)} x {POINTS} points in {dt:.1f} s")


def test_criterion_02_decompositions(verdict):
    worst_bundle = 0.0
    for name in BUNDLES:
        G, _ = pair(name)
        for p in sweep(name):
            worst_bundle = max(worst_bundle, decomposition_check(G, p).details["discrepancy"])
    worst_family = 0.0
    for name in ("theta_family", "product_family", "disk_family"):
        fam = FiberFamily.from_catalog(name)
        for p in family_points(name):
            worst_family = max(worst_family, hessian_decomposition_check(fam, p).details["discrepancy"])
    verdict(2, max(worst_bundle, worst_family) <= 1e-7,
            f"bundle splitting {worst_bundle:.2e}, family splitting {worst_family:.2e} (tol 1e-7)")


def test_criterion_03_dG_norm(verdict):
    worst = 0.0
    for name in BUNDLES:
        G, g = pair(name)
        for p in sweep(name):
            worst = max(worst, dG_norm_check(G, g, p).details["discrepancy"])
    G, g = pair("o_minus_one")
    _, coord, _ = dG_norm(G, g, ([0.0], [2.0]))
    ok = worst <= 1e-8 and abs(coord - 4.0) <= 1e-8
    verdict(3, ok, f"max relative |dG|^2 - G {worst:.2e} under two base metrics; (0, 2) gives {coord:.12f}")


def test_criterion_04_tautological(verdict):
    worst = -np.inf
    strict_worst = -np.inf
    for name in ["flat"] + STRICTLY_NEGATIVE:
        G, g = pair(name)
        rng = np.random.default_rng([SEED, 7, BUNDLES.index(name)])
        for z, v in sweep(name):
            xi = rng.normal(size=G.n) + 1j * rng.normal(size=G.n)
            t = tautological_pairing(G, g, (z, v), xi)
            worst = max(worst, t.value / t.scale)
            if name in STRICTLY_NEGATIVE and np.linalg.norm(v) > 1e-6:
                strict_worst = max(strict_worst, t.value / t.scale)
    G, g = pair("o_minus_one")
    inst = tautological_pairing(G, g, ([0.0], [1.0]), [1.0]).value
    ok = worst <= 1e-10 and strict_worst < -1e-8 and abs(inst + 0.5) <= 1e-8
    verdict(4, ok, f"max pairing/scale {worst:.2e} (<= 1e-10), max off zero section {strict_worst:.2e} "
                   f"(< -1e-8), instance {inst:.12f} (-1/2)")


def test_criterion_05_vertical_block(verdict):
    worst = 0.0
    for name in BUNDLES:
        G, g = pair(name)
        for p in sweep(name):
            c = total_curvature(G, g, p)
            worst = max(worst, float(np.max(np.abs(vertical_block(c)))), c.vertical_max)
    verdict(5, worst <= 1e-9, f"max |vertical-vertical curvature| {worst:.2e} (tol 1e-9)")


def test_criterion_06_ricci(verdict):
    G, g = pair("poincare")
    rng = np.random.default_rng([SEED, 6])
    worst = 0.0
    for _ in range(10):
        z = 0.6 * math.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        r = ricci_report(G, g, ([z], [0.0]), tangent=True)
        worst = max(worst, r.details["discrepancy"])
    bound = teichmuller_ricci_bound(2)
    ok = worst <= 1e-6 and bound == -1 / math.pi
    verdict(6, ok, f"restricted Ricci vs 2 Ric_g: {worst:.2e} relative (tol 1e-6); "
                   f"Teichmuller bound g=2: {bound:.15f} = -1/pi")


def test_criterion_07_sphere(verdict):
    t0 = time.perf_counter()
    b1 = build_sphere_basis(1, 48)
    pos = positivity_check(b1, trials=100, seed=SEED)
    s1 = section_bound_check(b1, sphere_sections(b1, 1), trials=50, seed=SEED)
    b2 = build_sphere_basis(2, 48)
    s2 = section_bound_check(b2, sphere_sections(b2, 4), trials=50, seed=SEED)
    dt = time.perf_counter() - t0
    ok = all(r.status == "PASS" for r in (pos, s1, s2)) and dt <= 120
    verdict(7, ok, f"positivity min/|f| {pos.value:.2e}; O(1)/k=1 margins {s1.value}; "
                   f"O(4)/k=2 margins {s2.value}; {dt:.1f} s")


def test_criterion_08_berndtsson(verdict):
    h = direct_image_gram(1j)
    theta_i = berndtsson_curvature(1j) / h
    rows = [berndtsson_check(tau) for tau in (1j, 1 + 1j, 2j, 0.5 + 0.8j)]
    worst = max(r.details["discrepancy"] for r in rows)
    ok = abs(h - math.sqrt(2)) <= 1e-8 and abs(theta_i - 0.125) <= 1e-3 * 0.125 and worst <= 1e-3
    verdict(8, ok, f"h(i) = {h:.12f} (sqrt 2); curvature at i {theta_i:.10f} (1/8); "
                   f"max relative mismatch with Gram {worst:.2e} (tol 1e-3); "
                   f"Gram curvature at i {gram_curvature(1j):.10f}")


def test_criterion_09_schumacher(verdict):
    worst = 0.0
    for name in ("product_family", "theta_family", "disk_family"):
        fam = FiberFamily.from_catalog(name)
        for p in family_points(name, 10):
            worst = max(worst, schumacher_identity_check(fam, p).details["discrepancy"])
    verdict(9, worst <= 1e-6, f"max identity discrepancy {worst:.2e} on three families (tol 1e-6)")


def test_criterion_10_gap(verdict):
    R = gap_example()
    I2 = np.eye(2)
    brute, count, _ = griffiths_grid_minimum(R, I2, I2)
    alt = griffiths_extremum(R, I2, I2, seed=SEED).extremal
    nak = nakano_certificate(R, I2, I2).extremal
    ok = count >= 10 ** 6 and abs(brute - 0.25) <= 1e-3 and abs(alt - 0.25) <= 1e-3 \
        and abs(nak + 0.5) <= 1e-9
    verdict(10, ok, f"Griffiths brute force {brute:.6f} over {count} tensors, alternating {alt:.12f}; "
                    f"Nakano {nak:.12f}")


def test_criterion_11_constants(verdict):
    rng = np.random.default_rng([SEED, 11])
    worst = 0.0
    for _ in range(20):
        a, b, c, d = rng.normal(size=4) + 1j * rng.normal(size=4)
        z = 0.3 * (rng.normal() + 1j * rng.normal())
        if abs(c * z + d) < 0.3:
            continue
        lit = lambda x: f"({float(x.real)!r} + {float(x.imag)!r}*i)"
        text = f"({lit(a)}*z1 + {lit(b)})/({lit(c)}*z1 + {lit(d)})"
        worst = max(worst, abs(schwarzian(text, z)))
    r1 = chern_curvature(BundleMetric.from_catalog("o_minus_one"), [0.0]).data[0, 0, 0, 0]
    r2 = chern_curvature(BundleMetric.from_catalog("gauss"), [0.0]).data[0, 0, 0, 0]
    nehari = nehari_l2_bound(2)
    ok = worst <= 1e-9 and nehari == 9 * math.pi and abs(r1 + 1) <= 1e-8 and abs(r2 - 1) <= 1e-8
    verdict(11, ok, f"Mobius Schwarzian max {worst:.2e}; nehari(2) = {nehari!r}; "
                    f"R = {r1.real:.12f}, {r2.real:.12f}")


def _strip(doc):
    if isinstance(doc, dict):
        return {k: _strip(v) for k, v in doc.items() if k != "wall_time"}
    if isinstance(doc, list):
        return [_strip(v) for v in doc]
    return doc


def test_criterion_12_determinism(verdict, tmp_path):
    docs, codes = [], []
    for k in range(2):
        out = tmp_path / f"run{k}"
        codes.append(run(RunConfig(out=str(out), seed=SEED)))
        docs.append(json.loads((out / "report.json").read_text()))
    same = _strip(docs[0]) == _strip(docs[1])
    passes = docs[0]["summary"]["PASS"]
    verdict(12, same and passes >= 20 and codes == [0, 0],
            f"identical JSON modulo timing: {same}; {passes} PASS entries; exit codes {codes}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
