"""Holomorphic boundary value problem for one-forms in genus zero.

Given a harmonic one-form ``delta`` on the caps, find a holomorphic exact
form ``beta`` on the complement with the same boundary values.  On the
sphere there are no holomorphic one-forms, so the catalyzing and correction
terms vanish and the problem reduces to:

* ``delta`` is admissible iff ``delta = (I - T11) gamma_bar`` for some
  antiholomorphic ``gamma_bar``.  Comparing parts forces ``gamma_bar`` to be
  the antiholomorphic part of ``delta`` and leaves the constraint
  ``P delta + T11 gamma_bar = 0`` on the holomorphic part ``P delta``.
* The solution is ``beta = -T12 gamma_bar``; it is unique.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .capmap import CapComplex
from .scattering import overfare_sigma2_form
from .schiffer import t_matrix
from .spaces import (
    BasisId,
    BasisMismatch,
    CoeffVector,
    HarmonicPair,
    boundary_mismatch,
    boundary_restriction,
)

__all__ = [
    "HbvpData",
    "HbvpSolution",
    "Unsolvable",
    "solvability_residual",
    "least_squares_distance",
    "solve",
    "stability_bound_check",
    "manufacture",
]

DEFAULT_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class HbvpData:
    """Dirichlet datum ``delta`` on the caps and the acceptance tolerance.

    ``delta.holo`` may carry more modes per cap than ``delta.antiholo``;
    the antiholomorphic truncation fixes the problem size ``N``.
    """

    delta: HarmonicPair
    tolerance: float = DEFAULT_TOL

    @property
    def N(self) -> int:
        return self.delta.antiholo.basis.truncation

    @property
    def rows(self) -> int:
        return max(4 * self.N, self.delta.holo.basis.truncation)


@dataclass(frozen=True, eq=False)
class HbvpSolution:
    beta: CoeffVector
    gamma_bar: CoeffVector
    residual: float
    boundary_mismatch: float

    def to_json(self) -> dict:
        def cv(v: CoeffVector) -> dict:
            return {"basis": v.basis.to_dict(), "conjugated": v.conjugated,
                    "re": v.coeffs.real.tolist(), "im": v.coeffs.imag.tolist()}

        return {
            "gamma_bar": cv(self.gamma_bar),
            "beta": cv(self.beta),
            "residual": self.residual,
            "boundary_mismatch": self.boundary_mismatch,
        }


class Unsolvable(ValueError):
    """The datum is not in the range of ``I - T11``."""

    def __init__(self, residual: float, gamma_ls: CoeffVector, distance: float):
        super().__init__(
            f"datum is not admissible: residual {residual:.3e}, "
            f"least-squares distance {distance:.3e}"
        )
        self.residual = residual
        self.gamma_ls = gamma_ls
        self.distance = distance


def _check(cx: CapComplex, data: HbvpData) -> None:
    d = data.delta
    for v in (d.holo, d.antiholo):
        if v.basis.kind.side != +1 or v.basis.caps != tuple(range(cx.n)):
            raise BasisMismatch("delta must be a form on all caps in the cap-pullback basis")


def _t11(cx: CapComplex, data: HbvpData) -> np.ndarray:
    return t_matrix(cx, "sigma1", N=data.N, rows=data.rows).entries


def _holo_padded(data: HbvpData) -> np.ndarray:
    return data.delta.holo.padded(data.rows).coeffs


def solvability_residual(cx: CapComplex, data: HbvpData) -> float:
    """``||P delta + T11 gamma_bar|| / max(1, ||delta||)`` with ``gamma_bar`` the
    antiholomorphic part of ``delta``."""
    _check(cx, data)
    T = _t11(cx, data)
    r = _holo_padded(data) + T @ data.delta.antiholo.coeffs
    return float(np.linalg.norm(r) / max(1.0, data.delta.norm()))


def least_squares_distance(cx: CapComplex, data: HbvpData) -> tuple[float, CoeffVector]:
    """Distance from ``delta`` to the range of ``I - T11`` and the minimizer.

    The two parts of ``(I - T11) g`` are ``-T11 g`` and ``g``, so the
    distance is the residual of a stacked full least-squares problem.
    """
    _check(cx, data)
    T = _t11(cx, data)
    A = np.vstack([-T, np.eye(T.shape[1])])
    b = np.concatenate([_holo_padded(data), data.delta.antiholo.coeffs])
    g, *_ = np.linalg.lstsq(A, b, rcond=None)
    dist = float(np.linalg.norm(A @ g - b))
    return dist, CoeffVector(data.delta.antiholo.basis, g, True)


def solve(cx: CapComplex, data: HbvpData, J: int | None = None) -> HbvpSolution:
    """Solve the problem or raise :class:`Unsolvable`.

    The boundary agreement of ``beta`` (complement side) with ``delta`` (cap
    side) is verified mode by mode from the Fourier coefficients of both
    restrictions; it does not reuse the operator identities.
    """
    res = solvability_residual(cx, data)
    if res > data.tolerance:
        dist, g = least_squares_distance(cx, data)
        raise Unsolvable(res, g, dist)
    gamma = data.delta.antiholo
    beta_form = overfare_sigma2_form(cx, gamma) * (-1.0)
    J = J or 4 * data.N
    inner = HarmonicPair(data.delta.holo, data.delta.antiholo)
    mismatch = max(
        boundary_mismatch(boundary_restriction(beta_form, cx, k, J),
                          boundary_restriction(inner, cx, k, J))
        for k in range(cx.n)
    )
    return HbvpSolution(beta_form.holo, gamma, res, mismatch)


def manufacture(cx: CapComplex, gamma_bar: CoeffVector, rows: int | None = None,
                tolerance: float = DEFAULT_TOL) -> HbvpData:
    """Admissible datum ``delta = (I - T11) gamma_bar`` with ``rows`` holomorphic modes."""
    N = gamma_bar.basis.truncation
    rows = rows or 4 * N
    T = t_matrix(cx, "sigma1", N=N, rows=rows).entries
    holo = CoeffVector(BasisId.sigma1(cx, rows), -T @ gamma_bar.coeffs)
    return HbvpData(HarmonicPair(holo, gamma_bar), tolerance)


def stability_bound_check(cx: CapComplex, trials: int = 20, N: int | None = None,
                          seed: int = 0) -> dict:
    """Largest ``||beta|| / ||delta||`` over random admissible data."""
    N = N or cx.truncation
    rng = np.random.default_rng(seed)
    basis = BasisId.sigma1(cx, N)
    T12 = t_matrix(cx, "sigma2", N=N).entries
    T11 = t_matrix(cx, "sigma1", N=N, rows=4 * N).entries
    ratios = []
    for _ in range(trials):
        g = rng.standard_normal(basis.dim) + 1j * rng.standard_normal(basis.dim)
        beta = -T12 @ g
        delta_norm = np.hypot(np.linalg.norm(g), np.linalg.norm(T11 @ g))
        ratios.append(float(np.linalg.norm(beta) / delta_norm))
    return {"truncation": N, "trials": trials, "seed": seed,
            "max_ratio": max(ratios), "ratios": ratios}
