import numpy as np
import pytest

from riemscatter.spaces import (
    SIGMA1,
    SIGMA2,
    AliasingError,
    BasisId,
    BasisKind,
    BasisMismatch,
    CoeffVector,
    HarmonicPair,
    boundary_mismatch,
    boundary_restriction,
    complement_gram,
    inner_product,
    partial_overfare,
    restrict_callable,
    restrict_vector,
)


def laurent_gram_polar(cx, N, M=4096):
    """Gram matrix of sqrt(j/pi) z**(-j-1) dz outside a star-shaped curve about 0.

    The radial integral is done in closed form: along a ray at angle phi the
    integrand is r**(-a-b-1) e^{i(b-a) phi}, so the entry reduces to a
    boundary integral of z**(-a) conj(z)**(-b) / (a + b) d phi.
    """
    w = np.exp(2j * np.pi * np.arange(M) / M)
    z = cx.caps[0](w)
    dphi = (cx.caps[0].deriv(w) * 1j * w / z).imag * (2 * np.pi / M)
    G = np.zeros((N, N), dtype=complex)
    for a in range(1, N + 1):
        for b in range(1, N + 1):
            G[b - 1, a - 1] = np.sqrt(a * b) / np.pi * np.sum(z ** (-a) * np.conj(z) ** (-b) * dphi) / (a + b)
    return G


def test_circle_laurent_basis_is_orthonormal(circle):
    g = complement_gram(circle, 8)
    assert np.allclose(g.gram, np.eye(8), atol=1e-13)


def test_gram_matches_polar_oracle(quadratic):
    g = complement_gram(quadratic, 8)
    assert np.allclose(g.gram, laurent_gram_polar(quadratic, 8), atol=1e-10)


def test_gram_factor_roundtrip(quadratic):
    g = complement_gram(quadratic, 8)
    c = np.arange(1, 9) + 1j
    assert np.allclose(g.to_laurent(g.to_orthonormal(c)), c)
    assert g.condition() < 1e3


def test_coeff_vector_algebra(quadratic):
    b = BasisId.sigma1(quadratic, 4)
    u = CoeffVector.unit(b, 1)
    v = CoeffVector(b, [1, 2j, 0, 0])
    assert np.allclose((u + v).coeffs, [1, 1 + 2j, 0, 0])
    assert inner_product(v, u) == pytest.approx(2j)
    assert v.norm() == pytest.approx(np.sqrt(5))
    with pytest.raises(BasisMismatch):
        u + u.conj()
    with pytest.raises(BasisMismatch):
        CoeffVector(b, [1, 2])
    assert v.padded(6).coeffs.size == 6
    assert np.allclose(v.padded(2).coeffs, [1, 2j])


def test_laurent_norm_refused(quadratic):
    v = CoeffVector.unit(BasisId.sigma2(quadratic, 4, orthonormal=False), 0)
    with pytest.raises(BasisMismatch):
        v.norm()


def test_harmonic_pair_sides(quadratic):
    s1 = BasisId.sigma1(quadratic, 4)
    s2 = BasisId.sigma2(quadratic, 4)
    assert BasisKind.CAP_PULLBACK.side == SIGMA1
    assert BasisKind.COMPLEMENT_ORTHONORMAL.side == SIGMA2
    with pytest.raises(BasisMismatch):
        HarmonicPair(CoeffVector.zeros(s1), CoeffVector.zeros(s2, True))
    pair = HarmonicPair.from_holo(CoeffVector.unit(s1, 0))
    assert pair.side == SIGMA1 and pair.norm() == pytest.approx(1)


def test_disk_basis_restriction(circle):
    e1 = CoeffVector.unit(BasisId.sigma1(circle, 4), 0)
    b = restrict_vector(e1, circle, 0, 8)
    expected = np.zeros(17, dtype=complex)
    expected[8 + 1] = 1j / np.sqrt(np.pi)
    assert np.allclose(b.fourier, expected, atol=1e-15)


def test_orthonormal_and_laurent_restrictions_agree(quadratic):
    g = complement_gram(quadratic, 6)
    u = np.zeros(6, dtype=complex)
    u[2] = 1.0
    ortho = CoeffVector(BasisId.sigma2(quadratic, 6), u)
    laurent = CoeffVector(BasisId.sigma2(quadratic, 6, orthonormal=False), g.to_laurent(u))
    a = restrict_vector(ortho, quadratic, 0, 24)
    b = restrict_vector(laurent, quadratic, 0, 24)
    assert np.abs(a.fourier - b.fourier).max() < 1e-10


def test_callable_restriction_matches_vector(circle):
    # e_2 = sqrt(2/pi) z dz on the unit disk
    b1 = restrict_callable(lambda z: np.sqrt(2 / np.pi) * z, circle, 0, 8, side=SIGMA1)
    b2 = restrict_vector(CoeffVector.unit(BasisId.sigma1(circle, 4), 1), circle, 0, 8)
    assert boundary_mismatch(b1, b2) < 1e-14


def test_aliasing_detected(circle):
    with pytest.raises(AliasingError):
        restrict_callable(lambda z: z ** 40, circle, 0, 4, samples=64)


def test_partial_overfare_flips_periods(circle):
    b = restrict_callable(lambda z: 1 / z, circle, 0, 8, side=SIGMA2)
    assert b.period == pytest.approx(-2j * np.pi)
    o = partial_overfare(b)
    assert o.side == SIGMA1
    assert o.period == pytest.approx(2j * np.pi)
    assert np.array_equal(o.fourier, b.fourier)


def test_restriction_default_cutoff(quadratic):
    pair = HarmonicPair.from_holo(CoeffVector.unit(BasisId.sigma1(quadratic, 5), 0))
    assert boundary_restriction(pair, quadratic, 0).J == 20
