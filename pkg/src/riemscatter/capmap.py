"""Cap maps, the separating complex of their boundary curves, and quadrature.

A cap is the image of the unit disk under a univalent map given by a
convergent power series.  A :class:`CapComplex` holds ``n`` caps with
disjoint closures; their union is the first piece of the sphere and the
(connected) complement the second piece.

At most one cap may contain the point at infinity.  Such a cap is specified
in the chart ``zeta = 1/(w - center)`` by a series ``g`` with ``g(0) = 0``, so
that the cap map is ``w = center + 1/g(z)``.  Internally every complex is
Moebius-normalized so that all caps are bounded and infinity lies in the
complement; :attr:`CapComplex.mobius` records the normalizing map.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import shapely
from scipy.special import roots_jacobi

from .series import TruncatedSeries, quotient

__all__ = [
    "UnivalenceViolation",
    "OverlapViolation",
    "CapMap",
    "CapComplex",
    "QuadratureRule",
    "build_complex",
    "load_complex",
    "complex_from_json",
    "apply_mobius",
    "gauss_area_rule",
    "boundary_polygon",
    "winding_number",
]

DEFAULT_SAMPLES = 1024
_TAIL_TOL = 1e-16
_MAX_SERIES = 1 << 14


class UnivalenceViolation(ValueError):
    """A cap map fails the sampled univalence test."""


class OverlapViolation(ValueError):
    """Two cap closures intersect (or come closer than the resolution margin)."""


@dataclass(frozen=True, eq=False)
class CapMap:
    """Univalent map ``f: D -> cap`` with ``f(0) = center``.

    ``series`` holds ``f`` itself (constant term equal to ``center``).
    """

    center: complex
    series: TruncatedSeries
    derivative: TruncatedSeries = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "derivative", self.series.deriv())

    @classmethod
    def from_coefficients(cls, center, coeffs: Sequence[complex], trunc: int | None = None):
        """Polynomial map ``center + a1 z + a2 z**2 + ...`` (coefficients exact)."""
        c = np.concatenate([[center], np.asarray(coeffs, dtype=complex)])
        return cls(center, TruncatedSeries(c, trunc=max(len(c), trunc or 0)))

    @property
    def a1(self) -> complex:
        return self.series.coeff(1)

    def coefficients(self, n: int) -> np.ndarray:
        """``[a_0 - center, a_1, ..., a_{n-1}]`` (first entry zero)."""
        c = self.series.dense(n).copy()
        c[0] = 0.0
        return c

    def __call__(self, z):
        return self.series(z)

    def deriv(self, z):
        return self.derivative(z)

    def boundary(self, samples: int) -> np.ndarray:
        return boundary_polygon(self, samples)

    @cached_property
    def radius(self) -> float:
        """``max |f(e^{it}) - center|`` on a fine grid."""
        return float(np.abs(self.boundary(DEFAULT_SAMPLES) - self.center).max())


def boundary_polygon(cap: CapMap, samples: int) -> np.ndarray:
    """Boundary samples ``f(exp(2 pi i j / M))`` for ``j = 0..M-1``."""
    if samples < 4:
        raise ValueError("need at least 4 boundary samples")
    w = np.exp(2j * np.pi * np.arange(samples) / samples)
    return cap(w)


def winding_number(points: np.ndarray, about: complex) -> int:
    """Discrete winding number of the closed polygon ``points`` about a point."""
    d = np.asarray(points) - about
    dphi = np.angle(np.roll(d, -1) / d)
    return int(np.rint(dphi.sum() / (2 * np.pi)))


# -- quadrature -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Tensor rule on the unit disk plus a trapezoid rule on the circle.

    The same disk rule serves every cap after pulling back by the cap map.
    """

    radial_order: int
    angular_order: int
    area_points: np.ndarray
    area_weights: np.ndarray
    contour_angles: np.ndarray
    contour_weights: np.ndarray

    def area_nodes(self) -> list[tuple[complex, float]]:
        return list(zip(self.area_points.tolist(), self.area_weights.tolist()))

    def contour_nodes(self) -> list[tuple[float, float]]:
        return list(zip(self.contour_angles.tolist(), self.contour_weights.tolist()))

    def integrate_disk(self, values) -> complex:
        return complex(np.dot(self.area_weights, values))


def gauss_area_rule(
    radial_order: int,
    angular_order: int,
    contour_samples: int | None = None,
    angle_offset: float = 0.0,
) -> QuadratureRule:
    """Gauss-Jacobi (weight ``r``) in the radius times trapezoid in the angle.

    Integrates ``w**a * conj(w)**b`` over the disk exactly whenever
    ``a + b <= 2*radial_order - 1`` and ``|a - b| < angular_order``.
    """
    if radial_order < 1 or angular_order < 1:
        raise ValueError("quadrature orders must be >= 1")
    x, wx = roots_jacobi(radial_order, 0.0, 1.0)
    r = (1 + x) / 2
    wr = wx / 4
    theta = 2 * np.pi * np.arange(angular_order) / angular_order + angle_offset
    pts = (r[:, None] * np.exp(1j * theta)[None, :]).ravel()
    wts = (wr[:, None] * np.full(angular_order, 2 * np.pi / angular_order)[None, :]).ravel()
    m = contour_samples or angular_order
    ang = 2 * np.pi * np.arange(m) / m
    return QuadratureRule(
        radial_order, angular_order, pts, wts, ang, np.full(m, 2 * np.pi / m)
    )


# -- the complex ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CapComplex:
    """Validated caps with pairwise disjoint closures (internal, bounded chart).

    ``mobius = (a, b, c, d)`` maps user coordinates to the internal chart,
    ``z = (a w + b) / (c w + d)``.
    """

    caps: tuple[CapMap, ...]
    truncation: int
    samples: int = DEFAULT_SAMPLES
    mobius: tuple[complex, complex, complex, complex] = (1, 0, 0, 1)
    specs: tuple = ()

    @property
    def n(self) -> int:
        return len(self.caps)

    @property
    def centers(self) -> np.ndarray:
        return np.array([c.center for c in self.caps])

    def boundary(self, k: int, samples: int | None = None) -> np.ndarray:
        return boundary_polygon(self.caps[k], samples or self.samples)

    def to_internal(self, w):
        a, b, c, d = self.mobius
        return (a * np.asarray(w) + b) / (c * np.asarray(w) + d)

    def to_user(self, z):
        a, b, c, d = self.mobius
        return (d * np.asarray(z) - b) / (-c * np.asarray(z) + a)

    def with_truncation(self, truncation: int, samples: int | None = None) -> "CapComplex":
        return CapComplex(
            self.caps, truncation, samples or self.samples, self.mobius, self.specs
        )

    def in_complement(self, z) -> np.ndarray:
        """Boolean mask of points lying outside every (sampled) cap."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        pts = shapely.points(z.real, z.imag)
        inside = np.zeros(z.shape, dtype=bool)
        for k in range(self.n):
            poly = shapely.Polygon(_xy(self.boundary(k)))
            inside |= shapely.contains(poly, pts) | shapely.touches(poly, pts)
        return ~inside


def _xy(z: np.ndarray) -> np.ndarray:
    return np.column_stack([z.real, z.imag])


def _check_univalent(series: TruncatedSeries, samples: int, label: str) -> None:
    if abs(series.coeff(1)) == 0:
        raise UnivalenceViolation(f"{label}: vanishing linear coefficient")
    w = np.exp(2j * np.pi * np.arange(samples) / samples)
    df = series.deriv()(w)
    if np.abs(df).min() <= 1e-10 * np.abs(df).max():
        raise UnivalenceViolation(f"{label}: derivative vanishes on the boundary grid")
    if winding_number(df, 0.0) != 0:
        raise UnivalenceViolation(f"{label}: derivative has zeros inside the disk")
    ring = shapely.LinearRing(_xy(series(w)))
    if not ring.is_simple:
        raise UnivalenceViolation(f"{label}: boundary curve self-intersects")


def _normalized_series(make, min_len: int) -> TruncatedSeries:
    """Evaluate ``make(L)`` for growing ``L`` until the coefficient tail vanishes."""
    L = max(min_len, 64)
    while True:
        s = make(L)
        c = np.abs(s.dense(L))
        if c[-8:].max() <= _TAIL_TOL * c.max() or L >= _MAX_SERIES:
            return s
        L *= 2


def _mobius_series(series: TruncatedSeries, mob, min_len: int) -> TruncatedSeries:
    """Power series of ``(a f + b)/(c f + d)`` for a bounded power series ``f``."""
    a, b, c, d = (complex(v) for v in mob)
    poly = series.dense()

    def make(L):
        # stored coefficients are treated as exact (their tails are below 1e-16)
        f = TruncatedSeries(poly, trunc=max(L, len(poly)))
        return TruncatedSeries(quotient(a * f + b, c * f + d).dense(L))

    if c == 0:
        return TruncatedSeries((a * series + b).dense() / d)
    return _normalized_series(make, min_len)


def _infinity_series(g: TruncatedSeries, center: complex, mob, min_len: int) -> TruncatedSeries:
    """Series of ``M(center + 1/g)`` for ``M(w) = (a w + b)/(c w + d)``.

    ``M(center + 1/g) = ((a center + b) g + a) / ((c center + d) g + c)``.
    """
    a, b, c, d = (complex(v) for v in mob)
    poly = g.dense()

    def make(L):
        gg = TruncatedSeries(poly, trunc=max(L, len(poly)))
        num = (a * center + b) * gg + a
        den = (c * center + d) * gg + c
        return TruncatedSeries(quotient(num, den).dense(L))

    return _normalized_series(make, min_len)


def _parse_spec(spec) -> tuple[complex, np.ndarray, bool]:
    if isinstance(spec, dict):
        center = spec.get("center", 0.0)
        if isinstance(center, (list, tuple)):
            center = complex(center[0], center[1])
        coeffs = [complex(c[0], c[1]) if isinstance(c, (list, tuple)) else complex(c)
                  for c in spec["coeffs"]]
        return complex(center), np.asarray(coeffs, dtype=complex), bool(spec.get("at_infinity", False))
    center, coeffs, *rest = spec
    return complex(center), np.asarray(coeffs, dtype=complex), bool(rest[0]) if rest else False


def _pick_complement_point(inf_ring: np.ndarray, others: list[np.ndarray]) -> complex:
    """Point inside the curve around the infinite cap, outside all other caps,
    maximizing the distance to every boundary curve."""
    outer = shapely.Polygon(_xy(inf_ring))
    holes = [shapely.Polygon(_xy(o)) for o in others]
    x0, y0, x1, y1 = outer.bounds
    gx, gy = np.meshgrid(np.linspace(x0, x1, 81), np.linspace(y0, y1, 81))
    pts = shapely.points(gx.ravel(), gy.ravel())
    ok = shapely.contains(outer, pts)
    for h in holes:
        ok &= ~shapely.contains(h, pts)
    if not ok.any():
        raise OverlapViolation("no room between the caps: complement not found")
    cand = pts[ok]
    dist = shapely.distance(cand, shapely.LinearRing(_xy(inf_ring)))
    for o in others:
        dist = np.minimum(dist, shapely.distance(cand, shapely.LinearRing(_xy(o))))
    best = cand[int(np.argmax(dist))]
    return complex(shapely.get_x(best), shapely.get_y(best))


def _validate_complex(caps: Sequence[CapMap], samples: int) -> None:
    polys = [boundary_polygon(c, samples) for c in caps]
    for k, (cap, poly) in enumerate(zip(caps, polys)):
        if winding_number(poly, cap.center) != 1:
            raise UnivalenceViolation(f"cap {k}: boundary curve is not positively oriented")
    if len(caps) < 2:
        return
    # the polygons differ from the curves by at most the chord deviation
    theta = 2 * np.pi * np.arange(samples) / samples
    mid = np.exp(1j * (theta + np.pi / samples))
    dev = 0.0
    for c in caps:
        a = c(np.exp(1j * theta))
        dev = max(dev, float(np.abs(c(mid) - 0.5 * (a + np.roll(a, -1))).max()))
    margin = 10 * dev
    shapes = [shapely.Polygon(_xy(p)) for p in polys]
    rings = [shapely.LinearRing(_xy(p)) for p in polys]
    for j in range(len(caps)):
        for k in range(j + 1, len(caps)):
            if shapes[j].intersects(shapes[k]):
                raise OverlapViolation(f"caps {j} and {k} intersect")
            gap = rings[j].distance(rings[k])
            if gap <= margin:
                raise OverlapViolation(
                    f"caps {j} and {k} are {gap:.3g} apart, below the margin {margin:.3g}"
                )


def build_complex(
    cap_specs: Iterable,
    truncation: int,
    samples: int = DEFAULT_SAMPLES,
) -> CapComplex:
    """Validate cap specifications and build the (normalized) complex.

    Each spec is ``(center, coeffs)``, ``(center, coeffs, at_infinity)`` or a
    dict with keys ``center``, ``coeffs``, ``at_infinity``.  ``coeffs`` lists
    ``a1, a2, ...``; the map is ``center + sum a_k z**k``, or for a cap at
    infinity ``center + 1/sum a_k z**k``.
    """
    parsed = [_parse_spec(s) for s in cap_specs]
    if not parsed:
        raise ValueError("need at least one cap")
    n_inf = sum(p[2] for p in parsed)
    if n_inf > 1:
        raise ValueError("at most one cap may contain infinity")
    min_len = 2 * truncation + 4
    raw = []
    for k, (center, coeffs, at_inf) in enumerate(parsed):
        if len(coeffs) == 0 or coeffs[0] == 0:
            raise UnivalenceViolation(f"cap {k}: vanishing linear coefficient")
        s = TruncatedSeries(np.concatenate([[0.0], coeffs]), trunc=max(len(coeffs) + 1, min_len))
        _check_univalent(s, samples, f"cap {k}")
        raw.append((center, s, at_inf))

    if n_inf == 0:
        mob = (1, 0, 0, 1)
        caps = [CapMap(c, s + c) for c, s, _ in raw]
    else:
        w = np.exp(2j * np.pi * np.arange(samples) / samples)
        inf_ring = next(c + 1 / s(w) for c, s, inf in raw if inf)
        others = [c + s(w) for c, s, inf in raw if not inf]
        q = _pick_complement_point(inf_ring, others)
        mob = (0, 1, 1, -q)
        caps = []
        for c, s, inf in raw:
            if inf:
                ser = _infinity_series(s, c, mob, min_len)
                caps.append(CapMap(0.0, ser))
            else:
                ser = _mobius_series(s + c, mob, min_len)
                caps.append(CapMap(1 / (c - q), ser))
    _validate_complex(caps, samples)
    specs = tuple((c, tuple(s.dense()[1:]), bool(inf)) for c, s, inf in raw)
    return CapComplex(tuple(caps), int(truncation), int(samples), mob, specs)


def apply_mobius(cx: CapComplex, mob) -> CapComplex:
    """Post-compose every cap of ``cx`` with ``z -> (a z + b)/(c z + d)``.

    The pole ``-d/c`` must lie in the complement so all images stay bounded.
    """
    a, b, c, d = (complex(v) for v in mob)
    if abs(a * d - b * c) == 0:
        raise ValueError("degenerate Moebius map")
    if c != 0 and not cx.in_complement(-d / c)[0]:
        raise ValueError("the pole of the Moebius map lies inside a cap")
    min_len = 2 * cx.truncation + 4
    caps = []
    for cap in cx.caps:
        ser = _mobius_series(cap.series, (a, b, c, d), min_len)
        caps.append(CapMap((a * cap.center + b) / (c * cap.center + d), ser))
    _validate_complex(caps, cx.samples)
    # compose the user->internal chart with the new map
    A = np.array([[a, b], [c, d]]) @ np.array(cx.mobius, dtype=complex).reshape(2, 2)
    return CapComplex(tuple(caps), cx.truncation, cx.samples, tuple(A.ravel()), cx.specs)


def complex_from_json(data: dict) -> CapComplex:
    return build_complex(
        data["caps"], int(data["truncation"]), int(data.get("samples", DEFAULT_SAMPLES))
    )


def load_complex(path) -> CapComplex:
    with open(path) as fh:
        return complex_from_json(json.load(fh))
