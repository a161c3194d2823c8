"""Boundary period matrix of harmonic measures.

For the annulus 1/4 < |z| < 1 the harmonic measure of the inner circle is
log|z| / log(1/4) and its period is 2 pi / log 4.  A three-cap example shows
that the period matrix with one index dropped is symmetric positive definite.
"""

import numpy as np

from riemscatter import build_complex, harmonic_measures

annulus = build_complex([(0, [0.25]), (0, [1.0], True)], 16)
hm = harmonic_measures(annulus)
print("annulus period matrix\n", hm.period_matrix)
print("2 pi / log 4 =", 2 * np.pi / np.log(4))

three = build_complex([(0, [0.3, 0.03]), (1, [0.25, -0.02j]), (0.4 + 0.9j, [0.2, 0.01])], 16)
hm3 = harmonic_measures(three)
print("\nthree caps, reduced matrix\n", hm3.reduced())
print("eigenvalues", np.linalg.eigvalsh(hm3.reduced()))
print(f"boundary error {hm3.boundary_error:.1e}, collocation condition {hm3.condition:.1e}")
