import numpy as np
import pytest

from riemscatter.capmap import gauss_area_rule
from riemscatter.schiffer import (
    QuadratureError,
    adjoint_check,
    default_quadrature,
    quadrature_self_test,
    t_matrix,
    theta_matrix,
)


def test_circle_operators(circle):
    T11 = t_matrix(circle, "sigma1", N=8)
    T12 = t_matrix(circle, "sigma2", N=8)
    assert np.abs(T11.entries).max() < 1e-14
    # on the circle T12 is a unitary diagonal (here -identity up to phases)
    assert np.allclose(np.abs(T12.entries), np.eye(8), atol=1e-13)


def test_quadratic_t11_entry(quadratic):
    T = t_matrix(quadratic, "sigma1", N=4)
    assert T.entries[0, 0] == pytest.approx(-0.09)
    assert T.shape == (4, 4)


def test_area_route_matches_contour(quadratic):
    a = t_matrix(quadratic, "sigma2", method="area", N=8).entries
    c = t_matrix(quadratic, "sigma2", N=8).entries
    assert np.abs(a - c).max() < 1e-10


def test_area_route_t11_two_caps():
    from riemscatter import build_complex
    cx = build_complex([(0, [0.5]), (1.2, [0.4, 0.05])], 8)
    a = t_matrix(cx, "sigma1", method="area", N=8).entries
    c = t_matrix(cx, "sigma1", N=8).entries
    assert np.abs(a - c).max() < 1e-8


def test_quadrature_self_test_rejects_coarse_rule():
    quadrature_self_test(default_quadrature(16), 16)
    with pytest.raises(QuadratureError):
        quadrature_self_test(gauss_area_rule(3, 6), 16)


def test_rows_extend_codomain(quadratic):
    T = t_matrix(quadratic, "sigma1", N=4, rows=12)
    assert T.shape == (12, 4)
    assert np.allclose(T.entries[:4], t_matrix(quadratic, "sigma1", N=4).entries)


def test_pythagoras_columns(three_caps):
    res = adjoint_check(three_caps, N=12)
    assert res["max_defect"] < 1e-10
    assert len(res["column_defects"]) == 36


def test_theta_bounds(quadratic):
    th = theta_matrix(quadratic, N=12)
    assert 0 < th.sigma_min <= th.sigma_max <= 1 + 1e-12
    # Theta^H Theta = I - T11^H T11 gives sigma_min**2 = 1 - ||Gr||**2 = 1 - 1/81
    assert th.sigma_min == pytest.approx(np.sqrt(1 - 1 / 81), rel=1e-8)


def test_unknown_piece(quadratic):
    with pytest.raises(ValueError):
        t_matrix(quadratic, "sigma3")


def test_operator_json(quadratic, tmp_path):
    T = t_matrix(quadratic, "sigma2", N=3)
    d = T.to_json()
    assert d["domain"]["kind"] == "cap_pullback"
    T.dump(tmp_path / "t.json")
    assert (tmp_path / "t.json").stat().st_size > 0
