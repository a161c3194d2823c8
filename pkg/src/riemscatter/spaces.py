"""Coefficient realizations of the Bergman spaces and of boundary one-forms.

All inner products are normalized so that ``<h dz, k dz> = \\iint h conj(k) dA``.
With this normalization the forms ``e_n = sqrt(n/pi) z**(n-1) dz`` are an
orthonormal basis of the Bergman space of the unit disk.

Bases
-----
``DISK_INTERIOR``
    ``e_n`` on the unit disk, ``n = 1..N``.
``DISK_EXTERIOR``
    ``sqrt(n/pi) z**(-n-1) dz`` on ``|z| > 1``.
``CAP_PULLBACK``
    The transport ``(f_k^{-1})^* e_n`` to each cap, stacked cap by cap.  It is
    orthonormal because pullback by a conformal map is an isometry.
``COMPLEMENT_LAURENT``
    ``sqrt(j/pi) (z - p_k)**(-j-1) dz`` for every cap ``k``.  These are exact
    forms on the complement; they are *not* orthonormal there.
``COMPLEMENT_ORTHONORMAL``
    The Gram-Schmidt (Cholesky) orthonormalization of ``COMPLEMENT_LAURENT``
    with respect to the Bergman inner product of the complement.

Elements of conjugate spaces carry ``conjugated=True``; the coefficient of
``conj(phi)`` is stored as is, so ``conj(sum c_n phi_n)`` has coefficients
``conj(c_n)``.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.linalg import cholesky, solve_triangular

from .capmap import CapComplex
from .series import TruncatedSeries

__all__ = [
    "BasisKind",
    "BasisId",
    "CoeffVector",
    "HarmonicPair",
    "BoundaryOneForm",
    "ComplementGram",
    "AliasingError",
    "BasisMismatch",
    "SIGMA1",
    "SIGMA2",
    "inner_product",
    "boundary_restriction",
    "restrict_callable",
    "restrict_vector",
    "project",
    "partial_overfare",
    "complement_gram",
    "laurent_images",
    "boundary_mismatch",
    "write_csv",
]

SIGMA1 = +1
SIGMA2 = -1
ALIAS_TOL = 1e-8


class AliasingError(ValueError):
    """Too few boundary samples for the requested Fourier cutoff."""


class BasisMismatch(ValueError):
    """Operands live in different bases or conjugation classes."""


class BasisKind(enum.Enum):
    DISK_INTERIOR = "disk_interior"
    DISK_EXTERIOR = "disk_exterior"
    CAP_PULLBACK = "cap_pullback"
    COMPLEMENT_LAURENT = "complement_laurent"
    COMPLEMENT_ORTHONORMAL = "complement_orthonormal"

    @property
    def side(self) -> int:
        """``+1`` for forms on the caps (or the disk), ``-1`` for the complement."""
        if self in (BasisKind.DISK_INTERIOR, BasisKind.CAP_PULLBACK):
            return SIGMA1
        return SIGMA2


@dataclass(frozen=True)
class BasisId:
    """A basis of ``truncation`` forms per cap, for the caps listed in ``caps``."""

    kind: BasisKind
    truncation: int
    caps: tuple[int, ...] = (0,)

    @property
    def dim(self) -> int:
        return self.truncation * len(self.caps)

    def block(self, cap: int) -> slice:
        """Slice of the coefficient vector that belongs to ``cap``."""
        i = self.caps.index(cap)
        return slice(i * self.truncation, (i + 1) * self.truncation)

    def with_truncation(self, truncation: int) -> "BasisId":
        return BasisId(self.kind, truncation, self.caps)

    @classmethod
    def sigma1(cls, cx: CapComplex, truncation: int | None = None) -> "BasisId":
        return cls(BasisKind.CAP_PULLBACK, truncation or cx.truncation, tuple(range(cx.n)))

    @classmethod
    def sigma2(cls, cx: CapComplex, truncation: int | None = None, orthonormal: bool = True):
        kind = BasisKind.COMPLEMENT_ORTHONORMAL if orthonormal else BasisKind.COMPLEMENT_LAURENT
        return cls(kind, truncation or cx.truncation, tuple(range(cx.n)))

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "truncation": self.truncation, "caps": list(self.caps)}


@dataclass(frozen=True, eq=False)
class CoeffVector:
    """Coefficients of a form in an orthonormal (or Laurent) basis."""

    basis: BasisId
    coeffs: np.ndarray
    conjugated: bool = False

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex).ravel()
        if c.size != self.basis.dim:
            raise BasisMismatch(f"expected {self.basis.dim} coefficients, got {c.size}")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, basis: BasisId, conjugated: bool = False) -> "CoeffVector":
        return cls(basis, np.zeros(basis.dim, dtype=complex), conjugated)

    @classmethod
    def unit(cls, basis: BasisId, index: int, conjugated: bool = False) -> "CoeffVector":
        c = np.zeros(basis.dim, dtype=complex)
        c[index] = 1.0
        return cls(basis, c, conjugated)

    def _check(self, other: "CoeffVector") -> None:
        if self.basis != other.basis or self.conjugated != other.conjugated:
            raise BasisMismatch(f"{self.basis}/{self.conjugated} vs {other.basis}/{other.conjugated}")

    def __add__(self, other: "CoeffVector") -> "CoeffVector":
        self._check(other)
        return CoeffVector(self.basis, self.coeffs + other.coeffs, self.conjugated)

    def __sub__(self, other: "CoeffVector") -> "CoeffVector":
        self._check(other)
        return CoeffVector(self.basis, self.coeffs - other.coeffs, self.conjugated)

    def __neg__(self) -> "CoeffVector":
        return CoeffVector(self.basis, -self.coeffs, self.conjugated)

    def __mul__(self, scalar) -> "CoeffVector":
        return CoeffVector(self.basis, scalar * self.coeffs, self.conjugated)

    __rmul__ = __mul__

    def norm(self) -> float:
        """Bergman norm; only meaningful for orthonormal bases."""
        if self.basis.kind is BasisKind.COMPLEMENT_LAURENT:
            raise BasisMismatch("Laurent coefficients are not orthonormal; convert first")
        return float(np.linalg.norm(self.coeffs))

    def conj(self) -> "CoeffVector":
        """The complex conjugate form (switches conjugation class)."""
        return CoeffVector(self.basis, np.conj(self.coeffs), not self.conjugated)

    def padded(self, truncation: int) -> "CoeffVector":
        """Zero-pad or cut every cap block to a new truncation."""
        old = self.basis
        out = np.zeros(len(old.caps) * truncation, dtype=complex)
        keep = min(truncation, old.truncation)
        for i in range(len(old.caps)):
            out[i * truncation:i * truncation + keep] = self.coeffs[
                i * old.truncation:i * old.truncation + keep
            ]
        return CoeffVector(old.with_truncation(truncation), out, self.conjugated)


def inner_product(a: CoeffVector, b: CoeffVector) -> complex:
    """Bergman inner product ``<a, b>`` of two vectors in the same orthonormal basis."""
    a._check(b)
    if a.basis.kind is BasisKind.COMPLEMENT_LAURENT:
        raise BasisMismatch("Laurent coefficients are not orthonormal; use the Gram matrix")
    # the conjugated bases are orthonormal too, so both cases read the same
    return complex(np.vdot(b.coeffs, a.coeffs))


@dataclass(frozen=True, eq=False)
class HarmonicPair:
    """``alpha + conj(beta)``, a harmonic one-form split into its two parts.

    ``antiholo`` stores the coefficients of ``conj(beta)`` in the conjugate
    basis, so the pair is additive in its coefficient vectors.
    """

    holo: CoeffVector
    antiholo: CoeffVector

    def __post_init__(self):
        if self.holo.conjugated or not self.antiholo.conjugated:
            raise BasisMismatch("holo part must be unconjugated and antiholo part conjugated")
        if self.holo.basis.kind.side != self.antiholo.basis.kind.side:
            raise BasisMismatch("both parts must live on the same side of the curves")

    @classmethod
    def from_holo(cls, v: CoeffVector, anti_basis: BasisId | None = None) -> "HarmonicPair":
        return cls(v, CoeffVector.zeros(anti_basis or v.basis, True))

    @classmethod
    def from_antiholo(cls, v: CoeffVector, holo_basis: BasisId | None = None) -> "HarmonicPair":
        return cls(CoeffVector.zeros(holo_basis or v.basis), v)

    @property
    def side(self) -> int:
        return self.holo.basis.kind.side

    def __add__(self, other: "HarmonicPair") -> "HarmonicPair":
        return HarmonicPair(self.holo + other.holo, self.antiholo + other.antiholo)

    def __mul__(self, scalar) -> "HarmonicPair":
        return HarmonicPair(scalar * self.holo, scalar * self.antiholo)

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.hypot(self.holo.norm(), self.antiholo.norm()))


def project(form: HarmonicPair, which: str) -> CoeffVector:
    """Holomorphic (``"holo"``) or antiholomorphic (``"antiholo"``) component."""
    if which == "holo":
        return form.holo
    if which == "antiholo":
        return form.antiholo
    raise ValueError(f"unknown projection {which!r}")


@dataclass(frozen=True, eq=False)
class BoundaryOneForm:
    """Fourier coefficients of a one-form pulled back to ``theta -> f_k(e^{i theta})``.

    The pullback is ``(sum_j fourier[j + J] e^{i j theta}) d theta`` for
    ``j = -J..J``.  ``side`` records which piece the form was restricted
    from; integrals are taken along the boundary orientation of that piece,
    which is the orientation of the parametrization for the caps and the
    opposite one for the complement.
    """

    curve_index: int
    fourier: np.ndarray
    side: int = SIGMA1

    @property
    def J(self) -> int:
        return (len(self.fourier) - 1) // 2

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.J, self.J + 1)

    def mode(self, j: int) -> complex:
        return complex(self.fourier[j + self.J])

    @property
    def period(self) -> complex:
        """Integral of the form along the boundary orientation of its side."""
        return self.side * 2 * np.pi * self.mode(0)

    def hminus_half_seminorm(self) -> float:
        j = self.modes
        nz = j != 0
        return float(np.sqrt(np.sum(np.abs(self.fourier[nz]) ** 2 / np.abs(j[nz]))))

    def __sub__(self, other: "BoundaryOneForm") -> "BoundaryOneForm":
        J = min(self.J, other.J)
        a = self.fourier[self.J - J:self.J + J + 1]
        b = other.fourier[other.J - J:other.J + J + 1]
        return BoundaryOneForm(self.curve_index, a - b, self.side)


def partial_overfare(form: BoundaryOneForm) -> BoundaryOneForm:
    """Carry boundary values across the curve to the other piece.

    The pulled-back coefficients are unchanged; only the side (and with it
    the boundary orientation used for periods) flips.
    """
    return BoundaryOneForm(form.curve_index, form.fourier.copy(), -form.side)


def boundary_mismatch(a: BoundaryOneForm, b: BoundaryOneForm) -> float:
    """``H^{-1/2}``-weighted distance: weight ``1/|j|`` off zero, 1 at ``j = 0``."""
    d = a - b
    return float(np.hypot(d.hminus_half_seminorm(), abs(d.mode(0))))


# -- complement Gram matrix -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ComplementGram:
    """Gram data of the Laurent basis on the complement.

    ``gram = R^H R`` with ``R`` upper triangular; orthonormal coordinates are
    ``u = R c`` for Laurent coordinates ``c``.  ``image_factor`` is ``R C``
    where ``C`` are the Laurent coordinates of the images ``psi_n`` (see
    :func:`laurent_images`); it is computed without ever forming ``R``.
    """

    basis: BasisId
    gram: np.ndarray
    R: np.ndarray
    image_gram: np.ndarray
    image_factor: np.ndarray

    def to_orthonormal(self, c: np.ndarray) -> np.ndarray:
        return self.R @ c

    def to_laurent(self, u: np.ndarray) -> np.ndarray:
        return solve_triangular(self.R, u, lower=False)

    def condition(self) -> float:
        return float(np.linalg.cond(self.gram))


def laurent_images(cx: CapComplex, truncation: int) -> np.ndarray:
    """Laurent coordinates of ``psi_{k,n} = sqrt(n/pi) d/dz P_{k,n}`` (negated primitive).

    ``P_{k,n}`` is the principal part at ``p_k`` of ``f_k^{-1}(z)**(-n)``;
    its Laurent coefficients are ``(n/j) [w**n] (f_k(w) - p_k)**j``.  The
    matrix is block diagonal and each block is upper triangular in ``(j, n)``.
    """
    N = truncation
    C = np.zeros((cx.n * N, cx.n * N), dtype=complex)
    n = np.arange(1, N + 1)
    for k, cap in enumerate(cx.caps):
        g = TruncatedSeries(cap.coefficients(N + 1))
        power = TruncatedSeries([1.0], trunc=N + 1)
        blk = np.zeros((N, N), dtype=complex)
        for j in range(1, N + 1):
            power = power * g
            blk[j - 1, :] = np.sqrt(n / j) * power.dense(N + 1)[1:]
        C[k * N:(k + 1) * N, k * N:(k + 1) * N] = blk
    return C


def _laurent_on_curve(cx: CapComplex, k: int, truncation: int, M: int) -> np.ndarray:
    """Laurent forms times ``dz/dtheta`` sampled on curve ``k`` (rows = samples)."""
    w = np.exp(2j * np.pi * np.arange(M) / M)
    cap = cx.caps[k]
    z = cap(w)
    dz = cap.deriv(w) * 1j * w
    j = np.arange(1, truncation + 1)[None, :]
    cols = [np.sqrt(j / np.pi) * (z - p)[:, None] ** (-j - 1) * dz[:, None] for p in cx.centers]
    return np.hstack(cols)


def _images_on_curve(cx: CapComplex, k: int, truncation: int, M: int, r: float):
    """``psi`` (times ``dz/dtheta``) and its primitive ``-P/sqrt(n pi)`` on curve ``k``.

    The principal parts are Cauchy integrals over ``f_l(r S^1)`` inside cap
    ``l``, which keeps every summand of moderate size; summing the Laurent
    expansion directly suffers cancellation of terms like ``|z - p|**(-j)``.
    """
    theta = 2 * np.pi * np.arange(M) / M
    w = np.exp(1j * theta)
    z = cx.caps[k](w)
    dz = cx.caps[k].deriv(w) * 1j * w
    n = np.arange(1, truncation + 1)
    scale = 1.0 / np.sqrt(n * np.pi)
    psis, prims = [], []
    # the trapezoid error of the Cauchy integrals decays like r**Mc
    Mc = max(M, int(np.ceil(40.0 / -np.log(r))))
    zeta = r * np.exp(2j * np.pi * np.arange(Mc) / Mc)
    for cap in cx.caps:
        fz = cap(zeta)
        K = cap.deriv(zeta) * zeta / Mc
        Zn = zeta[:, None] ** (-n[None, :])
        D = z[:, None] - fz[None, :]
        P = (K[None, :] / D) @ Zn
        dP = -(K[None, :] / D**2) @ Zn
        psis.append(-dP * scale[None, :] * dz[:, None])
        prims.append(-P * scale[None, :])
    return np.hstack(psis), np.hstack(prims)


@lru_cache(maxsize=64)
def complement_gram(cx: CapComplex, truncation: int | None = None, samples: int | None = None,
                    inner_radius: float = 0.9) -> ComplementGram:
    """Gram matrices on the complement by Stokes on the boundary curves.

    ``<psi_b, psi_a> = -(i/2) sum_k oint_{Gamma_k} F_b conj(psi_a dz)`` with
    ``F_b`` the primitive of ``psi_b`` vanishing at infinity; the sign
    accounts for the complement lying to the right of each curve.  The
    trapezoid rule is spectrally accurate on the analytic curves.

    The orthonormal basis is Gram-Schmidt of the Laurent basis in its
    natural order.  Since the images span the same nested subspaces, its
    factor is the Cholesky factor of the image Gram matrix up to the phases
    of the diagonal of the image coordinates.
    """
    N = truncation or cx.truncation
    M = samples or max(1024, 32 * N)
    H = np.zeros((N * cx.n, N * cx.n), dtype=complex)
    for k in range(cx.n):
        psi, F = _images_on_curve(cx, k, N, M, inner_radius)
        H += -(0.5j) * (np.conj(psi).T @ F) * (2 * np.pi / M)
    H = 0.5 * (H + H.conj().T)
    RH = cholesky(H, lower=False)
    C = laurent_images(cx, N)
    phase = np.diag(C) / np.abs(np.diag(C))
    factor = phase[:, None] * RH
    R = solve_triangular(C.T, factor.T, lower=True).T  # R = factor C^{-1}
    G = R.conj().T @ R
    return ComplementGram(BasisId.sigma2(cx, N, orthonormal=False), G, R, H, factor)


# -- boundary restriction ---------------------------------------------------------


def _fourier(samples: np.ndarray, J: int, curve: int, side: int) -> BoundaryOneForm:
    M = samples.size
    c = np.fft.fft(samples) / M
    power = np.abs(c) ** 2
    freq = np.abs(np.fft.fftfreq(M, 1.0 / M))
    total = power.sum()
    if total > 0 and power[freq >= M // 4].sum() > ALIAS_TOL * total:
        raise AliasingError(
            f"curve {curve}: {M} samples leave {power[freq >= M // 4].sum() / total:.2e}"
            " of the energy in the top quarter of the spectrum"
        )
    if J >= M // 2:
        raise AliasingError(f"cutoff J={J} needs more than {M} samples")
    idx = np.arange(-J, J + 1) % M
    return BoundaryOneForm(curve, c[idx], side)


def _default_samples(J: int) -> int:
    return int(max(256, 2 ** int(np.ceil(np.log2(8 * J + 8)))))


def _pullback_samples(vec: CoeffVector, cx: CapComplex | None, k: int, M: int) -> np.ndarray:
    """Samples of ``h(z(theta)) z'(theta)`` for the form ``vec`` on curve ``k``."""
    b = vec.basis
    theta = 2 * np.pi * np.arange(M) / M
    w = np.exp(1j * theta)
    coeffs = vec.coeffs
    if vec.conjugated:
        coeffs = np.conj(coeffs)
    if b.kind in (BasisKind.DISK_INTERIOR, BasisKind.CAP_PULLBACK):
        if k not in b.caps:
            return np.zeros(M, dtype=complex)
        c = coeffs[b.block(k)]
        n = np.arange(1, b.truncation + 1)
        # e_n pulls back to sqrt(n/pi) zeta**(n-1) d zeta = i sqrt(n/pi) e^{i n theta} d theta
        g = 1j * np.polyval((c * np.sqrt(n / np.pi))[::-1], w) * w
    elif b.kind is BasisKind.DISK_EXTERIOR:
        c = coeffs[b.block(k)]
        n = np.arange(1, b.truncation + 1)
        g = 1j * np.polyval((c * np.sqrt(n / np.pi))[::-1], 1 / w) / w
    else:
        if cx is None:
            raise ValueError("complement forms need the cap complex")
        idx = np.concatenate([np.arange(b.truncation) + c * b.truncation for c in b.caps])
        if b.kind is BasisKind.COMPLEMENT_ORTHONORMAL:
            # orthonormal basis = images times factor^{-1}; the images are
            # evaluated without the cancellation of long Laurent sums
            gram = complement_gram(cx, b.truncation)
            coeffs = solve_triangular(gram.image_factor, coeffs, lower=False)
            table, _ = _images_on_curve(cx, k, b.truncation, M, 0.9)
        else:
            table = _laurent_on_curve(cx, k, b.truncation, M)
        g = table[:, idx] @ coeffs
    return np.conj(g) if vec.conjugated else g


def restrict_vector(vec: CoeffVector, cx: CapComplex | None, curve_index: int, J: int,
                    samples: int | None = None) -> BoundaryOneForm:
    """Boundary values of a single holomorphic or antiholomorphic form."""
    M = samples or _default_samples(J)
    g = _pullback_samples(vec, cx, curve_index, M)
    return _fourier(g, J, curve_index, vec.basis.kind.side)


def boundary_restriction(form: HarmonicPair, cx: CapComplex | None, curve_index: int,
                         J: int | None = None, samples: int | None = None) -> BoundaryOneForm:
    """Fourier coefficients of the pullback of ``form`` to curve ``curve_index``.

    Parameters
    ----------
    form : HarmonicPair
        A form on the caps (``CAP_PULLBACK`` / ``DISK_INTERIOR``) or on the
        complement (``COMPLEMENT_*`` / ``DISK_EXTERIOR``).
    cx : CapComplex
        Supplies the parametrization ``theta -> f_k(e^{i theta})``.  Only
        needed for complement bases.
    J : int, optional
        Fourier cutoff, default ``4 N``.
    samples : int, optional
        Number of equispaced samples; must resolve the form (checked).
    """
    if J is None:
        J = 4 * form.holo.basis.truncation
    M = samples or _default_samples(J)
    g = (_pullback_samples(form.holo, cx, curve_index, M)
         + _pullback_samples(form.antiholo, cx, curve_index, M))
    return _fourier(g, J, curve_index, form.side)


def restrict_callable(h: Callable[[np.ndarray], np.ndarray], cx: CapComplex, curve_index: int,
                      J: int, side: int = SIGMA2, antiholomorphic: bool = False,
                      samples: int | None = None) -> BoundaryOneForm:
    """Restrict the form ``h(z) dz`` (or ``conj(h(z) dz)``) given as a function."""
    M = samples or _default_samples(J)
    w = np.exp(2j * np.pi * np.arange(M) / M)
    cap = cx.caps[curve_index]
    g = h(cap(w)) * cap.deriv(w) * 1j * w
    if antiholomorphic:
        g = np.conj(g)
    return _fourier(g, J, curve_index, side)


# -- export ---------------------------------------------------------------------


def write_csv(obj: CoeffVector | BoundaryOneForm, path) -> None:
    """Write ``index, re, im`` rows (basis index or Fourier mode)."""
    if isinstance(obj, BoundaryOneForm):
        idx, vals = obj.modes, obj.fourier
    else:
        idx, vals = np.arange(obj.coeffs.size), obj.coeffs
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["index", "re", "im"])
        for i, v in zip(idx.tolist(), vals.tolist()):
            wr.writerow([i, repr(float(v.real)), repr(float(v.imag))])
