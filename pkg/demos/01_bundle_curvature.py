"""Chern curvature of a few Hermitian line and vector bundles.

The tautological line bundle over the plane, with fiber metric
``(1 + |z|^2) |v|^2``, has curvature -1 at the origin.  The Gaussian weight
``exp(-|z|^2)`` gives +1.  A rank-two example then shows that Griffiths and
Nakano positivity are different notions.
"""

import numpy as np

from bundlecurv.bundle import (BundleMetric, chern_curvature, gap_example, griffiths_extremum,
                               nakano_certificate)

for name in ("o_minus_one", "gauss", "poincare"):
    R = chern_curvature(BundleMetric.from_catalog(name), [0.0]).data
    print(f"{name:12s} curvature at 0: {R[0, 0, 0, 0].real:+.12f}")

R = gap_example()
I2 = np.eye(2)
print("rank-two example")
print(f"  min over unit simple tensors (Griffiths): {griffiths_extremum(R, I2, I2, seed=0).extremal:.6f}")
print(f"  min over all unit tensors (Nakano):       {nakano_certificate(R, I2, I2).extremal:.6f}")
