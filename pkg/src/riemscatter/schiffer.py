"""Truncated matrices of the Schiffer comparison operators in genus zero.

On the sphere the operators are

    T conj(h dw)(z) = (1/pi) iint conj(h(w)) / (w - z)**2 dA_w  dz,

integrated over the caps.  ``T_{1,2}`` evaluates this for ``z`` in the
complement and ``T_{1,1}`` for ``z`` in the caps, where the diagonal
(same-cap) part is a principal value.  With the inner product of
:mod:`riemscatter.spaces`:

* ``T_{1,2} conj((f_k^{-1})^* e_n) = sqrt(n/pi) sum_{j<=n} a^k_{nj} (z - p_k)**(-j-1) dz``
  with ``a^k_{nj} = [w**n] (f_k(w) - p_k)**j``.  On the boundary curve
  ``conj(f_k^{-1}) = 1/f_k^{-1}``, so the area integral collapses to a residue
  at ``p_k`` and the matrix is exact.
* ``T_{1,1}`` in the cap-pullback bases has block entries ``sqrt(m n) b^{jk}_{mn}``
  where ``b`` are the mixed coefficients of the generating functions of
  :mod:`riemscatter.grunsky`.  The principal value is removed by subtracting
  the cap's own kernel, which is what the regularized kernel
  ``f'(z) f'(w)/(f(z) - f(w))**2 - 1/(z - w)**2`` does.

Two independent routes are provided for each operator: a contour route
(FFT on the boundary torus, or the exact residue formula) and an area route
(tensor Gauss quadrature over the disk), the latter serving as a cross-check.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .capmap import CapComplex, QuadratureRule, gauss_area_rule
from .spaces import BasisId, complement_gram, laurent_images

__all__ = [
    "OperatorMatrix",
    "QuadratureError",
    "ThetaMatrix",
    "t_matrix",
    "t11_blocks",
    "t12_laurent",
    "theta_matrix",
    "adjoint_check",
    "quadrature_self_test",
    "default_quadrature",
]


class QuadratureError(ValueError):
    """The quadrature rule is too coarse for the requested truncation."""


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Matrix of an operator between truncated (conjugate) Bergman spaces.

    ``entries[i, j]`` is the coefficient along codomain basis element ``i`` of
    the image of domain basis element ``j``.
    """

    domain: BasisId
    codomain: BasisId
    entries: np.ndarray
    domain_conjugated: bool = True
    codomain_conjugated: bool = False
    meta: dict = field(default_factory=dict)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.entries, compute_uv=False)

    def __neg__(self) -> "OperatorMatrix":
        return OperatorMatrix(self.domain, self.codomain, -self.entries,
                              self.domain_conjugated, self.codomain_conjugated, dict(self.meta))

    def to_json(self) -> dict:
        E = self.entries
        return {
            "domain": {**self.domain.to_dict(), "conjugated": self.domain_conjugated},
            "codomain": {**self.codomain.to_dict(), "conjugated": self.codomain_conjugated},
            "convention": (
                "<h dz, k dz> = iint h conj(k) dA; T conj(h)(z) = (1/pi) iint conj(h(w))/(w-z)^2 dA_w dz"
            ),
            "shape": list(E.shape),
            "re": E.real.ravel().tolist(),
            "im": E.imag.ravel().tolist(),
            "meta": self.meta,
        }

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, sort_keys=True, indent=1)


# -- quadrature ------------------------------------------------------------------


def _effective_degree(cx: CapComplex | None, tol: float = 1e-15) -> int:
    """Degree beyond which every cap series is negligible."""
    if cx is None:
        return 0
    deg = 0
    for cap in cx.caps:
        c = np.abs(cap.coefficients(len(cap.series)))
        big = np.flatnonzero(c > tol * c.max())
        deg = max(deg, int(big[-1]) if len(big) else 0)
    return deg


def default_quadrature(N: int, cx: CapComplex | None = None) -> QuadratureRule:
    """Disk rule resolving ``conj(w)**(N-1)`` times the cap maps' own spectrum."""
    d = _effective_degree(cx)
    return gauss_area_rule(N + d // 2 + 12, 2 * (N + d) + 24)


def quadrature_self_test(quad: QuadratureRule, N: int, tol: float = 1e-10) -> None:
    """Check that the disk rule reproduces ``<e_n, e_n> = 1`` for ``n = 1, N``."""
    for n in sorted({1, N}):
        vals = (n / np.pi) * np.abs(quad.area_points) ** (2 * n - 2)
        err = abs(quad.integrate_disk(vals) - 1.0)
        if err > tol:
            raise QuadratureError(
                f"quadrature ({quad.radial_order}x{quad.angular_order}) reproduces "
                f"<e_{n}, e_{n}> with error {err:.2e}; increase the order"
            )


# -- T_{1,1} -----------------------------------------------------------------------


def _fft_size(*orders: int) -> int:
    need = max(256, 4 * max(orders) + 8)
    return int(2 ** int(np.ceil(np.log2(need))))


def _unwrapped_log(Q: np.ndarray) -> np.ndarray:
    """Continuous logarithm of a nonvanishing function on the torus grid."""
    phase = np.unwrap(np.angle(Q), axis=1)
    first = np.unwrap(phase[:, 0])
    phase += (first - phase[:, 0])[:, None]
    return np.log(np.abs(Q)) + 1j * phase


def _torus_mixed(cx: CapComplex, j: int, k: int, rows: int, cols: int) -> np.ndarray:
    """Mixed coefficients ``b[m-1, n-1]`` of the log kernel by a 2-D FFT."""
    M = _fft_size(rows, cols)
    delta = np.pi / M  # offset keeps z != w on the diagonal block
    z = np.exp(2j * np.pi * np.arange(M) / M)
    w = np.exp(1j * (2 * np.pi * np.arange(M) / M + delta))
    fz = cx.caps[j](z)[:, None]
    fw = cx.caps[k](w)[None, :]
    if j == k:
        Q = (fz - fw) / (z[:, None] - w[None, :])
    else:
        Q = fz - fw
    c = np.fft.fft2(_unwrapped_log(Q)) / M**2
    n = np.arange(1, cols + 1)
    return c[1:rows + 1, 1:cols + 1] * np.exp(-1j * n * delta)[None, :]


def _area_mixed(cx: CapComplex, j: int, k: int, rows: int, cols: int,
                quad: QuadratureRule) -> np.ndarray:
    """Mixed coefficients from the (regularized) kernel by area quadrature.

    ``m n b_mn`` are the Taylor coefficients of ``d_z d_w log(kernel)``, so
    ``b_mn = pi**-2 iint iint K(z, w) conj(z)**(m-1) conj(w)**(n-1)``.
    """
    zq = quad.area_points
    wq_rule = gauss_area_rule(quad.radial_order + 1, quad.angular_order,
                              angle_offset=np.pi / quad.angular_order)
    wq = wq_rule.area_points
    fj, fk = cx.caps[j], cx.caps[k]
    Fz, Dz = fj(zq)[:, None], fj.deriv(zq)[:, None]
    Fw, Dw = fk(wq)[None, :], fk.deriv(wq)[None, :]
    K = Dz * Dw / (Fz - Fw) ** 2
    if j == k:
        K = K - 1.0 / (zq[:, None] - wq[None, :]) ** 2
    Vz = np.conj(zq[:, None] ** np.arange(rows)[None, :]) * quad.area_weights[:, None]
    Vw = np.conj(wq[:, None] ** np.arange(cols)[None, :]) * wq_rule.area_weights[:, None]
    return (Vz.T @ K @ Vw) / np.pi**2


def t11_blocks(cx: CapComplex, N: int | None = None, rows: int | None = None,
               method: str = "contour", quad: QuadratureRule | None = None) -> np.ndarray:
    """Unnormalized coefficient array ``b[j, k, m-1, n-1]``.

    ``z`` (index ``m``) belongs to the output cap ``j`` and ``w`` (index
    ``n``) to the input cap ``k``.
    """
    N = N or cx.truncation
    rows = rows or N
    if method == "area":
        quad = quad or default_quadrature(max(rows, N), cx)
        quadrature_self_test(quad, max(rows, N))
    elif method != "contour":
        raise ValueError(f"unknown method {method!r}")
    out = np.zeros((cx.n, cx.n, rows, N), dtype=complex)
    for j in range(cx.n):
        for k in range(cx.n):
            if method == "contour":
                out[j, k] = _torus_mixed(cx, j, k, rows, N)
            else:
                out[j, k] = _area_mixed(cx, j, k, rows, N, quad)
    return out


def _t11(cx: CapComplex, N: int, rows: int, method: str, quad) -> OperatorMatrix:
    b = t11_blocks(cx, N, rows, method, quad)
    W = np.sqrt(np.outer(np.arange(1, rows + 1), np.arange(1, N + 1)))
    E = np.block([[W * b[j, k] for k in range(cx.n)] for j in range(cx.n)])
    return OperatorMatrix(BasisId.sigma1(cx, N), BasisId.sigma1(cx, rows), E,
                          meta={"operator": "T11", "method": method})


# -- T_{1,2} -----------------------------------------------------------------------


def t12_laurent(cx: CapComplex, N: int | None = None) -> np.ndarray:
    """Exact ``T_{1,2}`` in (conjugated cap pullback) -> Laurent coordinates.

    Block diagonal over caps; within a block upper triangular in (row ``j``,
    column ``n``) with entries ``sqrt(n/j) a_nj``.
    """
    return laurent_images(cx, N or cx.truncation)


def _t12_area(cx: CapComplex, N: int, quad: QuadratureRule) -> np.ndarray:
    """``T_{1,2}`` in Laurent coordinates by area quadrature.

    The image of each basis form is sampled on the circle
    ``|z - p_k| = 2 r_k`` (outside the cap) and expanded in powers of
    ``1/(z - p_k)`` by FFT; the expansion about ``p_k`` is valid on the
    whole exterior of the cap.
    """
    quadrature_self_test(quad, N)
    C = np.zeros((cx.n * N, cx.n * N), dtype=complex)
    M = _fft_size(N)
    phi = 2 * np.pi * np.arange(M) / M
    w = quad.area_points
    n = np.arange(1, N + 1)
    for k, cap in enumerate(cx.caps):
        rho = 2.0 * cap.radius
        z = cap.center + rho * np.exp(1j * phi)
        fw, dfw = cap(w), cap.deriv(w)
        # V[s, n-1] = (1/pi) sqrt(n/pi) iint conj(w)**(n-1) f'(w)/(f(w) - z_s)**2
        K = dfw[None, :] / (fw[None, :] - z[:, None]) ** 2 * quad.area_weights[None, :]
        V = K @ (np.conj(w)[:, None] ** (n - 1)[None, :]) * np.sqrt(n / np.pi)[None, :] / np.pi
        c = np.fft.fft(V, axis=0) / M
        # coefficient of e^{-i(j+1) phi} is d_j rho**(-j-1)
        modes = (-(n + 1)) % M
        d = c[modes, :] * (rho ** (n + 1))[:, None]
        C[k * N:(k + 1) * N, k * N:(k + 1) * N] = d / np.sqrt(n / np.pi)[:, None]
    return C


def _t12(cx: CapComplex, N: int, method: str, quad, orthonormal: bool) -> OperatorMatrix:
    if method == "contour":
        C = t12_laurent(cx, N)
    elif method == "area":
        C = _t12_area(cx, N, quad or default_quadrature(N, cx))
    else:
        raise ValueError(f"unknown method {method!r}")
    if orthonormal:
        gram = complement_gram(cx, N)
        # the exact route reads the factor directly; converting through the
        # Laurent Gram matrix would reintroduce its ill-conditioning
        C = gram.image_factor if method == "contour" else gram.to_orthonormal(C)
    return OperatorMatrix(BasisId.sigma1(cx, N), BasisId.sigma2(cx, N, orthonormal), C,
                          meta={"operator": "T12", "method": method})


def t_matrix(cx: CapComplex, to_piece: str = "sigma2", quad: QuadratureRule | None = None,
             method: str = "contour", N: int | None = None, rows: int | None = None,
             orthonormal: bool = True) -> OperatorMatrix:
    """Matrix of ``T_{1,1}`` (``to_piece="sigma1"``) or ``T_{1,2}`` (``"sigma2"``).

    Parameters
    ----------
    cx : CapComplex
    to_piece : {"sigma1", "sigma2"}
    quad : QuadratureRule, optional
        Used by ``method="area"``; must pass :func:`quadrature_self_test`.
    method : {"contour", "area"}
        ``"contour"`` is the primary (spectrally accurate) route.
    N : int, optional
        Domain truncation per cap, default ``cx.truncation``.
    rows : int, optional
        Codomain truncation per cap for ``T_{1,1}``, default ``N``.
    orthonormal : bool
        For ``T_{1,2}``, express the image in the orthonormalized complement
        basis (default) or in Laurent coordinates.
    """
    N = N or cx.truncation
    if to_piece == "sigma1":
        return _t11(cx, N, rows or N, method, quad)
    if to_piece == "sigma2":
        return _t12(cx, N, method, quad, orthonormal)
    raise ValueError(f"unknown piece {to_piece!r}")


# -- Theta and the norm identity --------------------------------------------------


@dataclass(frozen=True, eq=False)
class ThetaMatrix:
    matrix: OperatorMatrix
    sigma_min: float
    sigma_max: float


def theta_matrix(cx: CapComplex, quad: QuadratureRule | None = None,
                 N: int | None = None, method: str = "contour") -> ThetaMatrix:
    """``Theta = -T_{1,2}`` with the extreme singular values of its truncation."""
    T = -t_matrix(cx, "sigma2", quad, method, N)
    s = T.singular_values()
    return ThetaMatrix(T, float(s.min()), float(s.max()))


def adjoint_check(cx: CapComplex, N: int | None = None, rows: int | None = None) -> dict:
    """Column defect of ``||T11 v||**2 + ||T12 v||**2 = ||v||**2`` for basis ``v``.

    ``T_{1,1}`` is evaluated with ``rows`` (default ``4 N``) output modes per
    cap so that its truncation tail does not dominate the defect.
    """
    N = N or cx.truncation
    rows = rows or 4 * N
    T11 = t_matrix(cx, "sigma1", N=N, rows=rows).entries
    T12 = t_matrix(cx, "sigma2", N=N).entries
    cols = np.sum(np.abs(T11) ** 2, axis=0) + np.sum(np.abs(T12) ** 2, axis=0) - 1.0
    return {
        "truncation": N,
        "rows": rows,
        "column_defects": cols.tolist(),
        "max_defect": float(np.abs(cols).max()),
    }
