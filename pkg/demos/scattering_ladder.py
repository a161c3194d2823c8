"""Unitarity of the scattering matrix along a refinement ladder.

Three caps with polynomial maps.  The defect ||S^H S - I|| falls
geometrically until it reaches roundoff.
"""

from riemscatter import build_complex, refinement_ladder

caps = [
    (0, [0.3, 0.03]),
    (1, [0.25, -0.02j]),
    (0.4 + 0.9j, [0.2, 0.01]),
]
cx = build_complex(caps, 24)
report = refinement_ladder(cx, (4, 8, 12, 16, 24))
for row in report.refinement_history:
    print(f"N = {row['N']:2d}   defect = {row['defect']:.3e}")
print("block norms", [round(x, 6) for x in report.block_norms])
