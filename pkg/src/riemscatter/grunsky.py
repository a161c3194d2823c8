"""Grunsky coefficients from generating functions, and the Grunsky operator.

For a single cap map ``f`` the coefficients ``b_mn`` are the mixed Taylor
coefficients of

    log((f(z) - f(w)) / (z - w)) = pure terms + sum_{m,n>=1} b_mn z**m w**n,

and for two different caps ``j != k`` of one complex they are the mixed
coefficients of ``log(f_j(z) - f_k(w))``.  The Grunsky matrix has entries
``-sqrt(m n) b_mn``; with the classical expansion
``log((f(z)-f(w))/(z-w)) = -sum c_mn z**m w**n`` this is ``sqrt(m n) c_mn``,
and it equals minus the matrix of the principal-value Schiffer operator on
the caps (see :mod:`riemscatter.schiffer`).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from numbers import Number

import numpy as np
from scipy.signal import convolve2d

from .capmap import CapComplex, CapMap
from .series import TruncatedSeries

__all__ = [
    "BivariateSeries",
    "GrunskyMatrix",
    "NonConvergence",
    "grunsky_generating",
    "generating_kernel",
    "log_series",
    "grunsky_matrix",
    "spectral_norm",
]


class NonConvergence(RuntimeError):
    """Power iteration did not reach its tolerance."""

    def __init__(self, msg: str, residual: float):
        super().__init__(f"{msg} (final residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True, eq=False)
class BivariateSeries:
    """Truncated double power series ``sum c[i, j] z**i w**j`` for ``i, j <= N``.

    All coefficients with ``i > N`` or ``j > N`` are unknown.  Products stay
    exact on the square window because every factor is a power series.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValueError("coefficients must be a square array")
        object.__setattr__(self, "coeffs", c)

    @property
    def N(self) -> int:
        return self.coeffs.shape[0] - 1

    @classmethod
    def from_function_of_z(cls, s: TruncatedSeries, N: int) -> "BivariateSeries":
        c = np.zeros((N + 1, N + 1), dtype=complex)
        c[:, 0] = s.dense(N + 1)
        return cls(c)

    @property
    def constant_term(self) -> complex:
        return complex(self.coeffs[0, 0])

    def nilpotency_order(self) -> int:
        if self.constant_term != 0:
            raise ValueError("series with a nonzero constant term is not nilpotent")
        # every power raises the total degree by at least one
        return 2 * self.N + 1

    def __add__(self, other):
        if isinstance(other, Number):
            c = self.coeffs.copy()
            c[0, 0] += other
            return BivariateSeries(c)
        if isinstance(other, BivariateSeries):
            return BivariateSeries(self.coeffs + other.coeffs)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return BivariateSeries(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Number):
            return BivariateSeries(self.coeffs * other)
        if isinstance(other, BivariateSeries):
            n = self.N + 1
            return BivariateSeries(convolve2d(self.coeffs, other.coeffs)[:n, :n])
        return NotImplemented

    __rmul__ = __mul__

    @property
    def mixed(self) -> np.ndarray:
        """``b[m-1, n-1]`` for ``1 <= m, n <= N``."""
        return self.coeffs[1:, 1:]

    @property
    def pure_z(self) -> TruncatedSeries:
        return TruncatedSeries(self.coeffs[:, 0])

    @property
    def pure_w(self) -> TruncatedSeries:
        return TruncatedSeries(self.coeffs[0, :])


def log_series(Q: BivariateSeries) -> BivariateSeries:
    """``log(Q / Q(0, 0))`` for a series with nonzero constant term.

    Solves ``Q * L_z = Q_z`` degree by degree (and the same in ``w`` on the
    line ``z = 0``).  Unlike Horner evaluation of ``log1p`` this never forms
    powers of ``Q - 1``, whose coefficients can be far larger than the result
    when the cap map is a Moebius image of a disk.
    """
    c = Q.coeffs
    n = c.shape[0]
    q0 = c[0, 0]
    if q0 == 0:
        raise ValueError("log_series needs a nonzero constant term")
    cz = np.zeros_like(c)
    cz[:-1, :] = c[1:, :] * np.arange(1, n)[:, None]
    G = np.zeros_like(c)  # coefficients of L_z
    for i in range(n - 1):
        for j in range(n):
            acc = np.sum(c[:i + 1, :j + 1][::-1, ::-1] * G[:i + 1, :j + 1])
            G[i, j] = (cz[i, j] - acc) / q0
    L = np.zeros_like(c)
    L[1:, :] = G[:-1, :] / np.arange(1, n)[:, None]
    # pure w terms from the univariate logarithmic derivative of Q(0, w)
    row = c[0, :]
    drow = row[1:] * np.arange(1, n)
    g = np.zeros(n - 1, dtype=complex)
    for j in range(n - 1):
        g[j] = (drow[j] - np.dot(row[1:j + 1], g[:j][::-1])) / q0
    L[0, 1:] = g / np.arange(1, n)
    return BivariateSeries(L)


def _difference_quotient(coeffs: np.ndarray, N: int) -> BivariateSeries:
    """``(f(z) - f(w)) / (z - w)`` for ``f = sum coeffs[k] z**k``."""
    c = np.zeros((N + 1, N + 1), dtype=complex)
    for k in range(1, min(len(coeffs), 2 * N + 2)):
        # (z**k - w**k)/(z - w) = sum_{i+j=k-1} z**i w**j
        for i in range(max(0, k - 1 - N), min(k - 1, N) + 1):
            c[i, k - 1 - i] += coeffs[k]
    return BivariateSeries(c)


def grunsky_generating(cap_j: CapMap, cap_k: CapMap, same: bool, N: int) -> BivariateSeries:
    """Generating function whose mixed coefficients are the Grunsky coefficients.

    Parameters
    ----------
    cap_j, cap_k : CapMap
        ``z`` is the variable of ``cap_j`` and ``w`` the variable of ``cap_k``.
    same : bool
        ``True`` for the diagonal kernel ``log((f(z)-f(w))/(z-w))``
        (``cap_k`` is ignored), ``False`` for ``log(f_j(z) - f_k(w))``.
    N : int
        Truncation of both variables.

    Returns
    -------
    BivariateSeries
        ``log`` of the kernel up to its constant term, which is dropped.
    """
    return log_series(generating_kernel(cap_j, cap_k, same, N))


def generating_kernel(cap_j: CapMap, cap_k: CapMap, same: bool, N: int) -> BivariateSeries:
    """The kernel whose logarithm generates the coefficients (not its log)."""
    if same:
        return _difference_quotient(cap_j.series.dense(2 * N + 2), N)
    d = cap_j.center - cap_k.center
    if d == 0:
        raise ValueError("caps share a center; they cannot be disjoint")
    c = np.zeros((N + 1, N + 1), dtype=complex)
    c[0, 0] = d
    c[1:, 0] = cap_j.coefficients(N + 1)[1:]
    c[0, 1:] -= cap_k.coefficients(N + 1)[1:]
    # the branch of log(f_j(z) - f_k(w)) only affects the dropped constant
    return BivariateSeries(c)


@dataclass(frozen=True, eq=False)
class GrunskyMatrix:
    """Block Grunsky matrix with entries ``-sqrt(m n) b^{jk}_{mn}``.

    ``blocks[j][k]`` maps the conjugate Bergman space of cap ``k`` to the
    Bergman space of cap ``j`` in the disk bases.
    """

    blocks: tuple[tuple[np.ndarray, ...], ...]
    truncation: int

    @property
    def n(self) -> int:
        return len(self.blocks)

    def assembled(self) -> np.ndarray:
        return np.block([[np.asarray(b) for b in row] for row in self.blocks])

    def max_entry(self) -> float:
        return float(np.abs(self.assembled()).max()) if self.n else 0.0

    def symmetry_defect(self) -> float:
        return float(max(
            np.abs(self.blocks[j][k].T - self.blocks[k][j]).max()
            for j in range(self.n) for k in range(self.n)
        ))

    def rows(self):
        """``(j, k, m, n, re, im)`` with 1-based ``m, n``."""
        for j in range(self.n):
            for k in range(self.n):
                B = self.blocks[j][k]
                for m in range(B.shape[0]):
                    for n in range(B.shape[1]):
                        v = B[m, n]
                        yield j, k, m + 1, n + 1, float(v.real), float(v.imag)

    def to_json(self) -> dict:
        return {
            "convention": "entry = -sqrt(m n) b_mn, b_mn mixed coefficients of the log kernel",
            "truncation": self.truncation,
            "n": self.n,
            "rows": [list(r) for r in self.rows()],
        }

    def dump(self, path) -> None:
        path = str(path)
        if path.endswith(".csv"):
            with open(path, "w", newline="") as fh:
                wr = csv.writer(fh)
                wr.writerow(["j", "k", "m", "n", "re", "im"])
                for r in self.rows():
                    wr.writerow([r[0], r[1], r[2], r[3], repr(r[4]), repr(r[5])])
        else:
            with open(path, "w") as fh:
                json.dump(self.to_json(), fh, sort_keys=True, indent=1)


def _weights(N: int) -> np.ndarray:
    m = np.arange(1, N + 1)
    return np.sqrt(np.outer(m, m))


def grunsky_matrix(cx: CapComplex, N: int | None = None) -> GrunskyMatrix:
    """Assemble the block Grunsky matrix of a complex at truncation ``N``."""
    N = N or cx.truncation
    W = _weights(N)
    blocks = []
    for j in range(cx.n):
        row = []
        for k in range(cx.n):
            b = grunsky_generating(cx.caps[j], cx.caps[k], j == k, N).mixed
            row.append(-W * b)
        blocks.append(tuple(row))
    return GrunskyMatrix(tuple(blocks), N)


def spectral_norm(M, tol: float = 1e-10, max_iter: int = 10_000, seed: int = 0) -> float:
    """Largest singular value by power iteration on ``M^H M``.

    Parameters
    ----------
    M : GrunskyMatrix or array_like
    tol : float
        Stop when successive estimates of ``sigma**2`` differ by at most
        ``tol * max(sigma**2, tiny)``.
    """
    A = M.assembled() if isinstance(M, GrunskyMatrix) else np.asarray(M, dtype=complex)
    if A.size == 0 or not np.any(A):
        return 0.0
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(A.shape[1]) + 1j * rng.standard_normal(A.shape[1])
    v /= np.linalg.norm(v)
    lam = 0.0
    resid = np.inf
    for _ in range(max_iter):
        u = A.conj().T @ (A @ v)
        new = float(np.vdot(v, u).real)
        nu = np.linalg.norm(u)
        if nu == 0:
            return 0.0
        v = u / nu
        resid = abs(new - lam)
        lam = new
        if resid <= tol * max(lam, 1e-300):
            return float(np.sqrt(max(lam, 0.0)))
    raise NonConvergence("power iteration for the spectral norm", resid)
