"""Spectral checks on the round sphere.

A band-limited eigenbasis of the Laplacian is built on a Gauss-Legendre by
uniform grid.  The resolvent ``(1 + Box)^{-1}`` keeps nonnegative functions
nonnegative, and for holomorphic sections of ``O(d)`` with ``omega = k omega_FS``
the pointwise norms satisfy ``Box |u|^2 <= (d/k) |u|^2``.
"""

from bundlecurv.spectral.sphere import (build_sphere_basis, positivity_check, section_bound_check,
                                        sphere_sections)

basis = build_sphere_basis(1, 48)
print(f"basis: {int(basis.valid.sum())} modes, Gram error {basis.gram_error(50):.1e}")
pos = positivity_check(basis, trials=100, seed=0)
print(f"resolvent positivity: {pos.status}, worst min/sup ratio {pos.value:.3e}")

for k, d in ((1, 1), (2, 4)):
    b = build_sphere_basis(k, 48)
    rep = section_bound_check(b, sphere_sections(b, d), trials=50, seed=0)
    print(f"O({d}) with k={k}: {rep.status}, bound 1/(1+d/k) = {rep.oracle['bound']:.4f}, margins {rep.value}")
