"""Manufacture an admissible boundary datum, solve, and check the boundary.

The datum delta = (I - T11) gamma_bar is built from a random antiholomorphic
form gamma_bar.  The solver recovers gamma_bar, returns beta = -T12 gamma_bar
on the complement and compares the Fourier coefficients of beta and delta on
every boundary curve.  A purely holomorphic datum is rejected.
"""

import numpy as np

from riemscatter import BasisId, CoeffVector, HarmonicPair, HbvpData, Unsolvable, build_complex
from riemscatter import manufacture, solve

cx = build_complex([(0, [0.5]), (1.2, [0.4, 0.05])], 16)
rng = np.random.default_rng(0)
basis = BasisId.sigma1(cx, 16)
gamma = CoeffVector(basis, rng.standard_normal(basis.dim) + 1j * rng.standard_normal(basis.dim), True)

sol = solve(cx, manufacture(cx, gamma))
print(f"residual            {sol.residual:.2e}")
print(f"gamma recovery      {np.abs(sol.gamma_bar.coeffs - gamma.coeffs).max():.2e}")
print(f"boundary mismatch   {sol.boundary_mismatch:.2e}")
print(f"||beta|| / ||gamma|| {sol.beta.norm() / gamma.norm():.4f}")

bad = HbvpData(HarmonicPair(CoeffVector.unit(basis, 0), CoeffVector.zeros(basis, True)))
try:
    solve(cx, bad)
except Unsolvable as exc:
    print(f"rejected: residual {exc.residual:.3f}, least-squares distance {exc.distance:.3f}")
