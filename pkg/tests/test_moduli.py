import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import ellipk as scipy_ellipk

from augteich.moduli import (
    ModulusDomainError,
    Quadrilateral,
    TopologyError,
    agm,
    annulus_modulus,
    ellipk,
    grid_quadrilateral_modulus,
    grotzsch_mu,
    isoperimetric_bound,
    lambda_of_K,
    mu_inverse,
    mu_inverse_pair,
    rectangle_modulus,
    rengel_lower_bound,
)


def test_annulus_examples():
    assert annulus_modulus(math.exp(-2 * math.pi)) == pytest.approx(1.0, abs=1e-15)
    assert annulus_modulus(math.exp(-4 * math.pi)) == pytest.approx(2.0, abs=1e-15)
    assert annulus_modulus(0.5) == pytest.approx(0.11032, abs=1e-5)
    for bad in (0.0, 1.0, -0.2, 3.0):
        with pytest.raises(ModulusDomainError):
            annulus_modulus(bad)


@given(st.floats(1e-6, 0.999), st.floats(1e-6, 0.999))
def test_annulus_log_additivity(r1, r2):
    assert annulus_modulus(r1 * r2) == pytest.approx(annulus_modulus(r1) + annulus_modulus(r2),
                                                      abs=1e-12)


def test_rectangle_examples():
    assert rectangle_modulus(1, 1) == 1
    assert rectangle_modulus(2, 1) == 2
    assert rectangle_modulus(1, 3) == pytest.approx(1 / 3)
    with pytest.raises(ModulusDomainError):
        rectangle_modulus(0, 1)


def test_agm_and_ellipk_against_scipy():
    assert agm(1.0, 1.0) == 1.0
    for k in (0.0, 0.1, 0.5, 0.9, 0.999):
        assert ellipk(k) == pytest.approx(float(scipy_ellipk(k * k)), rel=1e-14)


def test_mu_symmetric_point():
    assert grotzsch_mu(1 / math.sqrt(2)) == pytest.approx(math.pi / 2, abs=1e-14)


def test_mu_matches_elliptic_oracle():
    for r in (0.01, 0.3, 0.5, 0.9):
        K, Kp = scipy_ellipk(r * r), scipy_ellipk(1 - r * r)
        assert grotzsch_mu(r) == pytest.approx(math.pi / 2 * Kp / K, rel=1e-13)


def test_mu_small_r_example():
    # documented example: mu(0.01) close to log(400)/(2 pi)
    assert abs(grotzsch_mu(0.01) - math.log(400) / (2 * math.pi)) < 1e-3


def test_mu_small_r_asymptotic_trend():
    gaps = [abs(grotzsch_mu(r) - math.log(4 / r) / (2 * math.pi)) for r in (1e-2, 1e-4, 1e-6)]
    assert gaps[0] > gaps[1] > gaps[2]


def test_mu_log_asymptotic_in_this_normalisation():
    # with mu(1/sqrt 2) = pi/2 the small-r behaviour is mu(r) ~ log(4/r)
    gaps = [abs(grotzsch_mu(r) - math.log(4 / r)) for r in (1e-2, 1e-4, 1e-6)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-10


def test_mu_monotone_and_functional_equation():
    r = np.linspace(0.005, 0.995, 100)
    mu = np.array([grotzsch_mu(v) for v in r])
    assert np.all(np.diff(mu) < 0)
    assert grotzsch_mu(0.3) > grotzsch_mu(0.6)
    for v in np.arange(1, 10) / 10:
        assert grotzsch_mu(v) * grotzsch_mu(math.sqrt(1 - v * v)) == pytest.approx(
            math.pi ** 2 / 4, abs=1e-8)


def test_mu_domain():
    for bad in (0.0, 1.0, 1.5, -0.1):
        with pytest.raises(ModulusDomainError):
            grotzsch_mu(bad)


def test_mu_inverse_examples():
    assert mu_inverse(math.pi / 2) == pytest.approx(1 / math.sqrt(2), abs=1e-12)
    assert mu_inverse(grotzsch_mu(0.4)) == pytest.approx(0.4, abs=1e-9)
    with pytest.raises(ModulusDomainError):
        mu_inverse(0.0)


def test_mu_inverse_large_argument_example():
    assert mu_inverse(10.0) < 1e-20


@settings(max_examples=100, deadline=None)
@given(st.floats(0.25, 30.0))
def test_mu_inverse_round_trip(m):
    # below m ~ 0.25 the root lies within 1e-12 of 1 and is not representable
    assert abs(grotzsch_mu(mu_inverse(m)) - m) < 1e-10 * max(1.0, m)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 0.25))
def test_mu_inverse_small_argument_via_complement(m):
    r, rc = mu_inverse_pair(m)
    assert abs(grotzsch_mu(rc) - math.pi ** 2 / (4 * m)) < 1e-10 * math.pi ** 2 / (4 * m)


def test_lambda_examples():
    assert lambda_of_K(1.0) == pytest.approx(1.0, abs=1e-9)
    for K in (1.1, 2.0, 5.0):
        assert lambda_of_K(K) * lambda_of_K(1 / K) == pytest.approx(1.0, abs=1e-8)
    assert 1 < lambda_of_K(1.1) < lambda_of_K(1.2)
    K = np.linspace(1, 10, 50)
    lam = np.array([lambda_of_K(v) for v in K])
    assert np.all(np.diff(lam) > 0)
    with pytest.raises(ModulusDomainError):
        lambda_of_K(0.0)


def test_isoperimetric_examples():
    for rho in np.arange(1, 10) / 10:
        chk = isoperimetric_bound(rho ** 2, 1.0, -math.log(rho) / (2 * math.pi))
        assert chk.holds and chk.slack >= 0
    assert isoperimetric_bound(0.5, 1.0, 0.0).holds
    bad = isoperimetric_bound(0.9, 1.0, 10.0)
    assert not bad.holds and bad.slack < 0


def test_quadrilateral_validation():
    with pytest.raises(ModulusDomainError):
        Quadrilateral(((0, 0), (1, 0), (1, 1), (0, 1)), (0, 2, 1, 3))
    with pytest.raises(ModulusDomainError):
        Quadrilateral(((0, 0), (1, 1), (1, 0), (0, 1)), (0, 1, 2, 3))
    with pytest.raises(ModulusDomainError):
        Quadrilateral(((0, 0), (1, 0), (1, 1e-9), (0, 1e-9)), (0, 1, 2, 3))


def test_grid_square_and_rectangle():
    assert grid_quadrilateral_modulus(Quadrilateral.rectangle(1, 1), 256).value == pytest.approx(1.0, rel=0.02)
    v = grid_quadrilateral_modulus(Quadrilateral.rectangle(2, 1), 256)
    assert v.value == pytest.approx(2.0, rel=0.02)
    assert v.method == "grid_estimate" and v.resolution == 256


def _l_shape():
    pts = ((0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2))
    return Quadrilateral(pts, (0, 1, 3, 5))


@pytest.mark.slow
def test_grid_l_shape_refinement():
    a = grid_quadrilateral_modulus(_l_shape(), 256).value
    b = grid_quadrilateral_modulus(_l_shape(), 512).value
    assert abs(a - b) / b < 0.01


@st.composite
def star_quads(draw):
    # vertices in angular order about the origin with every gap in (0.4, pi): simple
    ang = sorted(draw(st.lists(st.floats(0, 2 * math.pi), min_size=4, max_size=4,
                               unique=True)))
    gaps = np.diff(ang + [ang[0] + 2 * math.pi])
    if gaps.min() < 0.4 or gaps.max() > math.pi - 0.2:
        ang = [0.0, math.pi / 2, math.pi, 1.5 * math.pi]
    rad = [draw(st.floats(0.5, 1.5)) for _ in range(4)]
    pts = [(r * math.cos(a), r * math.sin(a)) for r, a in zip(rad, ang)]
    return Quadrilateral(tuple(pts), (0, 1, 2, 3))


@settings(max_examples=20, deadline=None)
@given(star_quads())
def test_rengel_lower_bound(q):
    est = grid_quadrilateral_modulus(q, 128).value
    assert est >= rengel_lower_bound(q) * (1 - 0.02)


def test_rengel_slanted_sides_regression():
    # slanted a-sides once left the Dirichlet band almost empty at some resolutions
    pts = ((1.0, 0.0), (0.0, 1.0), (-0.5, 0.0), (0.0, -0.75))
    q = Quadrilateral(pts, (0, 1, 2, 3))
    vals = [grid_quadrilateral_modulus(q, n).value for n in (128, 256)]
    assert min(vals) >= rengel_lower_bound(q)
    assert abs(vals[0] - vals[1]) / vals[1] < 0.01


RECIPROCITY_QUADS = [
    ((1.412, 0.45), (0.406, 0.531), (-1.193, -0.29), (0.929, -0.319)),
    ((-0.791, 0.853), (-0.773, -0.055), (-0.46, -0.442), (1.221, -0.411)),
    ((1.0, 0.0), (0.0, 1.0), (-0.5, 0.0), (0.0, -0.75)),
    ((0, 0), (2, 0), (2, 1), (0, 1)),
]


@pytest.mark.slow
@pytest.mark.parametrize("pts", RECIPROCITY_QUADS)
def test_quadrilateral_reciprocity_refines(pts):
    # swapping the roles of the side pairs inverts the modulus; the discrete
    # product approaches 1 under refinement, slowly at sharp corners
    q = Quadrilateral(pts, (0, 1, 2, 3))
    conj = Quadrilateral(pts, (1, 2, 3, 0))
    err = [abs(grid_quadrilateral_modulus(q, n).value * grid_quadrilateral_modulus(conj, n).value - 1)
           for n in (128, 512)]
    assert err[1] < 0.05
    assert err[1] <= err[0] + 1e-3


def test_disconnected_raster():
    # a channel far thinner than the grid spacing
    pts = ((0, 0), (1, 0), (1, 0.49), (2, 0.49), (2, 0), (3, 0), (3, 1), (2, 1),
           (2, 0.4901), (1, 0.4901), (1, 1), (0, 1))
    q = Quadrilateral(pts, (11, 0, 5, 6))
    with pytest.raises(TopologyError):
        grid_quadrilateral_modulus(q, 16)
