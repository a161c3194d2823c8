import numpy as np
import pytest

from riemscatter import build_complex
from riemscatter.scattering import (
    CollocationError,
    CompletionError,
    assemble_scattering,
    harmonic_measures,
    overfare_exact_form,
    overfare_mismatch,
    refinement_ladder,
    scatter,
    write_period_csv,
)
from riemscatter.spaces import BasisId, BasisMismatch, CoeffVector


def test_scattering_is_unitary(three_caps):
    S = assemble_scattering(three_caps, 16)
    assert S.defect() < 1e-10
    assert S.matrix.shape == (96, 96)


def test_block_norms_circle(circle):
    S = assemble_scattering(circle, 8)
    n11, n12, n21, n22 = S.block_norms()
    assert n11 < 1e-14 and n22 < 1e-14
    assert n12 == pytest.approx(1) and n21 == pytest.approx(1)


def test_scatter_preserves_energy(quadratic):
    rng = np.random.default_rng(3)
    S = assemble_scattering(quadratic, 16)
    a1 = CoeffVector(BasisId.sigma1(quadratic, 16), rng.standard_normal(16))
    a2 = CoeffVector(BasisId.sigma2(quadratic, 16), rng.standard_normal(16))
    b1, b2 = scatter(S, a1, a2)
    assert b1.conjugated and b2.conjugated
    assert np.hypot(b1.norm(), b2.norm()) == pytest.approx(np.hypot(a1.norm(), a2.norm()), rel=1e-12)
    with pytest.raises(BasisMismatch):
        scatter(S, a2, a1)


def test_completion_guard(quadratic):
    with pytest.raises(CompletionError):
        assemble_scattering(quadratic, 16, completion_tol=-1.0)


def test_ladder_history(quadratic):
    rep = refinement_ladder(quadratic, (4, 8))
    assert [h["N"] for h in rep.refinement_history] == [4, 8]
    assert rep.monotone()
    assert set(rep.to_json()) == {"truncation", "defect", "block_norms", "refinement_history"}
    with pytest.raises(ValueError):
        refinement_ladder(quadratic, (8, 4))


def test_overfare_shapes_and_mismatch(quadratic):
    g = CoeffVector.unit(BasisId.sigma1(quadratic, 8), 2, True)
    form = overfare_exact_form(quadratic, g)
    assert form.holo.basis.truncation == 32
    assert np.allclose(form.antiholo.coeffs, -g.coeffs)
    assert overfare_mismatch(quadratic, g) < 1e-12
    with pytest.raises(BasisMismatch):
        overfare_exact_form(quadratic, g.conj())


def test_two_circle_annulus_periods(tmp_path):
    cx = build_complex([(0, [0.25]), (0, [1.0], True)], 16)
    hm = harmonic_measures(cx)
    P = hm.period_matrix
    assert P[0, 0] == pytest.approx(2 * np.pi / np.log(4), rel=1e-10)
    # rows and columns sum to zero because the measures add up to one
    assert np.abs(P.sum(axis=0)).max() < 1e-8
    # omega_0 = log(|z| / 1) / log(1/4) in the user chart, evaluated internally
    z = cx.to_internal(np.array([0.5, -0.6j]))
    assert np.allclose(hm.evaluate(0, z), np.log(np.abs([0.5, 0.6])) / np.log(0.25), atol=1e-9)
    write_period_csv(hm, tmp_path / "p.csv")
    assert (tmp_path / "p.csv").read_text().startswith("j,k,value")


def test_harmonic_measures_need_two_caps(quadratic):
    with pytest.raises(ValueError):
        harmonic_measures(quadratic)


def test_collocation_condition_guard(three_caps):
    with pytest.raises(CollocationError):
        harmonic_measures(three_caps, cond_limit=1.0)
