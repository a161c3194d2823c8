"""The genus-zero scattering matrix, exact overfare and harmonic measures.

The scattering matrix sends the holomorphic parts ``(alpha_1, alpha_2)`` of a
compatible pair of forms on the caps and on the complement to their
antiholomorphic parts::

    (conj(beta_1), conj(beta_2)) = [[-T11bar, -T21bar], [-T12bar, -T22bar]] (alpha_1, alpha_2)

In orthonormal bases the conjugate operator ``Tbar`` has the complex
conjugate matrix, so ``S = -conj(M)`` with ``M = [[M11, M21], [M12, M22]]``.
The blocks with domain on the complement are not assembled by quadrature
over the unbounded piece: ``M21 = M12^T`` follows from the symmetry of the
kernel, and ``M22`` is the unique block making ``M`` unitary.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .capmap import CapComplex
from .schiffer import OperatorMatrix, t_matrix
from .spaces import (
    BasisId,
    BasisKind,
    BasisMismatch,
    CoeffVector,
    HarmonicPair,
    boundary_mismatch,
    boundary_restriction,
)

__all__ = [
    "CompletionError",
    "CollocationError",
    "ScatteringMatrix",
    "ScatteringReport",
    "HarmonicMeasures",
    "assemble_scattering",
    "scatter",
    "overfare_exact_form",
    "overfare_sigma2_form",
    "overfare_mismatch",
    "refinement_ladder",
    "harmonic_measures",
]


class CompletionError(RuntimeError):
    """The assembled columns are too far from orthonormal to complete."""


class CollocationError(RuntimeError):
    """The harmonic-measure collocation system is too ill-conditioned."""


@dataclass(frozen=True, eq=False)
class ScatteringMatrix:
    """Block scattering matrix at truncation ``N`` (per cap and per piece).

    ``blocks[r][c]`` maps input piece ``c`` to output piece ``r`` (0 for the
    caps, 1 for the complement); ``matrix`` is the assembled ``S``.
    """

    blocks: tuple[tuple[OperatorMatrix, OperatorMatrix], tuple[OperatorMatrix, OperatorMatrix]]
    truncation: int
    isometry_residual: float

    @property
    def matrix(self) -> np.ndarray:
        return np.block([[b.entries for b in row] for row in self.blocks])

    def defect(self) -> float:
        S = self.matrix
        return float(np.linalg.norm(S.conj().T @ S - np.eye(S.shape[0]), 2))

    def block_norms(self) -> list[float]:
        return [float(np.linalg.norm(b.entries, 2)) for row in self.blocks for b in row]


@dataclass
class ScatteringReport:
    truncation: int
    unitarity_defect: float
    block_norms: list[float]
    refinement_history: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "truncation": self.truncation,
            "defect": self.unitarity_defect,
            "block_norms": self.block_norms,
            "refinement_history": self.refinement_history,
        }

    def monotone(self) -> bool:
        d = [h["defect"] for h in self.refinement_history]
        return all(b < a for a, b in zip(d, d[1:]))


def assemble_scattering(cx: CapComplex, N: int | None = None,
                        completion_tol: float = 0.05) -> ScatteringMatrix:
    """Assemble ``S`` from ``T11`` and ``T12`` by unitary completion.

    Raises
    ------
    CompletionError
        If ``||M11^H M11 + M12^H M12 - I||`` exceeds ``completion_tol`` before
        completion, which signals an upstream accuracy problem.
    """
    N = N or cx.truncation
    T11 = t_matrix(cx, "sigma1", N=N)
    T12 = t_matrix(cx, "sigma2", N=N)
    A, B = T11.entries, T12.entries
    eye = np.eye(A.shape[1])
    resid = float(np.linalg.norm(A.conj().T @ A + B.conj().T @ B - eye, 2))
    if resid > completion_tol:
        raise CompletionError(f"first block column is {resid:.2e} from isometric")
    C = B.T
    D = -np.linalg.solve(B.conj().T, A.conj().T @ C)
    s1, s2 = BasisId.sigma1(cx, N), BasisId.sigma2(cx, N)
    T21 = OperatorMatrix(s2, s1, C, meta={"operator": "T21", "method": "symmetry"})
    T22 = OperatorMatrix(s2, s2, D, meta={"operator": "T22", "method": "completion"})

    def neg_bar(T: OperatorMatrix) -> OperatorMatrix:
        # -Tbar maps the holomorphic space to the conjugate space
        return OperatorMatrix(T.domain, T.codomain, -np.conj(T.entries), False, True,
                              {**T.meta, "block": "-conj"})

    blocks = ((neg_bar(T11), neg_bar(T21)), (neg_bar(T12), neg_bar(T22)))
    return ScatteringMatrix(blocks, N, resid)


def scatter(S: ScatteringMatrix, alpha1: CoeffVector, alpha2: CoeffVector):
    """Apply ``S`` to the holomorphic pair ``(alpha1, alpha2)``.

    Returns the antiholomorphic parts ``(conj(beta1), conj(beta2))`` as
    conjugated coefficient vectors.
    """
    (b11, b12), (b21, b22) = S.blocks
    for v, basis in ((alpha1, b11.domain), (alpha2, b12.domain)):
        if v.conjugated or v.basis != basis:
            raise BasisMismatch(f"expected an unconjugated vector in {basis}")
    out1 = b11.entries @ alpha1.coeffs + b12.entries @ alpha2.coeffs
    out2 = b21.entries @ alpha1.coeffs + b22.entries @ alpha2.coeffs
    return (CoeffVector(b11.codomain, out1, True), CoeffVector(b21.codomain, out2, True))


# -- overfare ----------------------------------------------------------------------


def overfare_exact_form(cx: CapComplex, gamma_bar: CoeffVector,
                        rows: int | None = None) -> HarmonicPair:
    """Form on the caps with the boundary values of ``T12 gamma_bar``.

    The exact overfare of ``T12 gamma_bar`` is ``-gamma_bar + T11 gamma_bar``.
    ``T11 gamma_bar`` has infinitely many modes; ``rows`` (default ``4 N``)
    output modes per cap are kept.
    """
    if not gamma_bar.conjugated or gamma_bar.basis.kind is not BasisKind.CAP_PULLBACK:
        raise BasisMismatch("gamma_bar must be a conjugated cap-pullback vector")
    N = gamma_bar.basis.truncation
    rows = rows or 4 * N
    T11 = t_matrix(cx, "sigma1", N=N, rows=rows)
    holo = CoeffVector(T11.codomain, T11.entries @ gamma_bar.coeffs)
    return HarmonicPair(holo, -gamma_bar)


def overfare_sigma2_form(cx: CapComplex, gamma_bar: CoeffVector) -> HarmonicPair:
    """``T12 gamma_bar`` as a (holomorphic) form on the complement (orthonormal basis)."""
    N = gamma_bar.basis.truncation
    T12 = t_matrix(cx, "sigma2", N=N)
    holo = CoeffVector(T12.codomain, T12.entries @ gamma_bar.coeffs)
    return HarmonicPair.from_holo(holo)


def overfare_mismatch(cx: CapComplex, gamma_bar: CoeffVector, J: int | None = None,
                      rows: int | None = None) -> float:
    """Largest ``H^{-1/2}``-weighted boundary mismatch over the curves."""
    N = gamma_bar.basis.truncation
    J = J or 4 * N
    inner = overfare_exact_form(cx, gamma_bar, rows)
    outer = overfare_sigma2_form(cx, gamma_bar)
    return max(
        boundary_mismatch(boundary_restriction(outer, cx, k, J),
                          boundary_restriction(inner, cx, k, J))
        for k in range(cx.n)
    )


# -- refinement --------------------------------------------------------------------


def refinement_ladder(cx: CapComplex, truncations=(8, 16, 24)) -> ScatteringReport:
    """Assemble ``S`` at increasing truncations and record the defects.

    At level ``N`` the boundary cutoff is ``J = 4 N`` and the torus FFT size
    (reported as ``quad``) grows with ``N``.
    """
    truncations = list(truncations)
    if not truncations or sorted(set(truncations)) != truncations:
        raise ValueError("truncations must be non-empty and strictly increasing")
    history = []
    S = None
    for N in truncations:
        S = assemble_scattering(cx, N)
        quad = int(2 ** int(np.ceil(np.log2(max(256, 4 * N + 8)))))
        history.append({"N": N, "quad": quad, "J": 4 * N, "defect": S.defect()})
    return ScatteringReport(S.truncation, history[-1]["defect"], S.block_norms(), history)


# -- harmonic measures -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class HarmonicMeasures:
    """Collocation solutions ``omega_k`` and the boundary period matrix.

    ``coeffs[:, k]`` holds the coefficients of ``omega_k`` in the basis
    ``1``, ``Re/Im ((z - p_j)/rho_j)**(-m)`` and ``log|z - p_j| - log|z - p_last|``.
    """

    cx: CapComplex
    modes: int
    radii: np.ndarray
    coeffs: np.ndarray
    period_matrix: np.ndarray
    condition: float
    boundary_error: float

    def _design(self, z: np.ndarray, derivative: bool = False) -> np.ndarray:
        return _design(z, self.cx.centers, self.radii, self.modes, derivative)

    def evaluate(self, k: int, z) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return (self._design(z) @ self.coeffs[:, k]).real

    def reduced(self) -> np.ndarray:
        """Period matrix with the last index dropped."""
        return self.period_matrix[:-1, :-1]


def _design(z: np.ndarray, centers: np.ndarray, radii: np.ndarray, modes: int,
            derivative: bool = False) -> np.ndarray:
    """Real basis functions (or their complex ``d/dz``) at points ``z``."""
    cols = [np.zeros_like(z) if derivative else np.ones_like(z)]
    m = np.arange(1, modes + 1)[None, :]
    for p, rho in zip(centers, radii):
        u = ((z - p) / rho)[:, None]
        g = u ** (-m)
        if derivative:
            dg = -m * u ** (-m - 1) / rho
            cols.extend([dg / 2, dg / 2j])
        else:
            cols.extend([g.real, g.imag])
    last = centers[-1]
    for p in centers[:-1]:
        if derivative:
            cols.append(0.5 / (z - p) - 0.5 / (z - last))
        else:
            cols.append(np.log(np.abs(z - p)) - np.log(np.abs(z - last)))
    out = []
    for c in cols:
        out.append(c if c.ndim == 2 else c[:, None])
    return np.hstack(out)


def harmonic_measures(cx: CapComplex, modes: int | None = None, oversample: int = 2,
                      cond_limit: float = 1e12) -> HarmonicMeasures:
    """Harmonic measures of the complement by least-squares collocation.

    ``omega_k = 1`` on curve ``k`` and ``0`` on the others.  The period matrix
    is ``Pi[j, k] = oint_{Gamma_j} *d omega_k``, with the conjugate
    differential taken along the boundary of the complement, so that
    ``Pi[j, k]`` is the Dirichlet inner product of ``omega_j`` and ``omega_k``.
    """
    if cx.n < 2:
        raise ValueError("harmonic measures need at least two caps")
    n = cx.n
    modes = modes or max(32, cx.truncation)
    radii = np.array([
        np.abs(cx.boundary(k) - cx.centers[k]).min() for k in range(n)
    ])
    nbasis = 1 + 2 * n * modes + (n - 1)
    per_curve = int(np.ceil(oversample * nbasis / n))
    pts, rhs = [], []
    for k in range(n):
        w = np.exp(2j * np.pi * np.arange(per_curve) / per_curve)
        pts.append(cx.caps[k](w))
        r = np.zeros((per_curve, n))
        r[:, k] = 1.0
        rhs.append(r)
    z = np.concatenate(pts)
    A = _design(z, cx.centers, radii, modes)
    Y = np.vstack(rhs)
    s = np.linalg.svd(A, compute_uv=False)
    cond = float(s[0] / s[-1]) if s[-1] > 0 else np.inf
    if cond > cond_limit:
        raise CollocationError(f"collocation condition number {cond:.3e} exceeds {cond_limit:.0e}")
    coeffs, *_ = np.linalg.lstsq(A, Y, rcond=1e-12)

    # independent check points (half-step shifted) and periods
    Mq = max(512, 8 * modes)
    w = np.exp(1j * (2 * np.pi * np.arange(Mq) / Mq + np.pi / Mq))
    err = 0.0
    Pi = np.zeros((n, n))
    for j in range(n):
        zj = cx.caps[j](w)
        dz = cx.caps[j].deriv(w) * 1j * w * (2 * np.pi / Mq)
        vals = _design(zj, cx.centers, radii, modes) @ coeffs
        target = np.zeros(n)
        target[j] = 1.0
        err = max(err, float(np.abs(vals - target[None, :]).max()))
        dw = _design(zj, cx.centers, radii, modes, derivative=True) @ coeffs
        # normal derivative out of the complement, integrated along Gamma_j
        Pi[j, :] = np.sum((2j * dw * dz[:, None]).real, axis=0)
    return HarmonicMeasures(cx, modes, radii, coeffs, Pi, cond, err)


def write_period_csv(hm: HarmonicMeasures, path) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["j", "k", "value"])
        for j in range(hm.period_matrix.shape[0]):
            for k in range(hm.period_matrix.shape[1]):
                wr.writerow([j, k, repr(float(hm.period_matrix[j, k]))])


def report_json(report: ScatteringReport) -> str:
    return json.dumps(report.to_json(), sort_keys=True)
