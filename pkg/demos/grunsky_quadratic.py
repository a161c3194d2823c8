"""Grunsky coefficients of f(z) = z + t z**2 and the Grunsky inequality.

For this map the kernel (f(z) - f(w)) / (z - w) is 1 + t (z + w), so every
coefficient has a closed form.  The script prints a few of them next to the
computed values and then shows how the spectral norm grows with t.
"""

from math import comb

from riemscatter import build_complex, grunsky_generating, grunsky_matrix, spectral_norm

t = 0.3
cx = build_complex([(0, [1.0, t])], 12)
b = grunsky_generating(cx.caps[0], cx.caps[0], True, 12).mixed
print("m n   computed b_mn        closed form")
for m, n in [(1, 1), (2, 1), (2, 2), (3, 4)]:
    k = m + n
    exact = (-1) ** (k + 1) * t ** k * comb(k, m) / k
    print(f"{m} {n}  {b[m - 1, n - 1].real: .12e}  {exact: .12e}")

print("\n t     ||Gr||   (the map stops being univalent at t = 0.5)")
for t in (0.1, 0.2, 0.3, 0.4, 0.45, 0.49):
    cx = build_complex([(0, [1.0, t])], 32)
    print(f"{t:4.2f}  {spectral_norm(grunsky_matrix(cx, 32)):.6f}")
