import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from augteich.collar_hexagon import (
    ContainmentError, collar_chart, collar_quantities, double_to_pants,
    hexagon_from_sides, hexagon_regions, karcher_mean, seam_length, t_profile,
    xi_profile, PantsPoint,
)
from augteich.hyp_core import GeometryError, IdealPoint, distance_complex


def test_collar_quantities_example():
    lp, area = collar_quantities(2.0, 1.0)
    assert lp == pytest.approx(3.0862, abs=1e-4)
    assert area == pytest.approx(2.3504, abs=1e-4)


def test_collar_quantities_small_width_limit():
    lp, area = collar_quantities(1.5, 1e-12)
    assert lp == pytest.approx(1.5, abs=1e-12)
    assert area == pytest.approx(0.0, abs=1e-11)


@given(st.floats(1e-3, 20.0), st.floats(1e-3, 5.0))
def test_collar_pythagoras(ell, d):
    lp, area = collar_quantities(ell, d)
    assert lp * lp - ell * ell - area * area == pytest.approx(0.0, abs=1e-12 * lp * lp)


def test_collar_quantities_domain():
    with pytest.raises(GeometryError):
        collar_quantities(-1.0, 1.0)


def test_collar_chart_width_example():
    c = collar_chart(2.0, 1.0)
    assert c.width == pytest.approx(0.41357, abs=1e-5)
    assert c.width == pytest.approx(math.asinh(1 / (2 * math.sinh(1))), abs=1e-15)


def test_cusp_chart_horocycle_length():
    c = collar_chart(0.0, 1.0)
    assert c.is_cusp
    assert c.outer_length == 1.0
    assert c.integrated_area() == pytest.approx(1.0, rel=1e-10)


@given(st.floats(0.01, 10.0))
def test_full_collar_area_identity(ell):
    c = collar_chart(ell, 1.0)
    assert ell * math.sinh(c.width) == pytest.approx(ell / (2 * math.sinh(ell / 2)), rel=1e-12)


@pytest.mark.parametrize("ell,t", [(2.0, 1.0), (0.3, 0.25), (4.0, 0.5)])
def test_collar_area_by_integration(ell, t):
    c = collar_chart(ell, t)
    assert c.integrated_area() == pytest.approx(c.area, rel=1e-9)


def test_collar_chart_domain():
    with pytest.raises(GeometryError):
        collar_chart(1.0, 0.0)
    with pytest.raises(GeometryError):
        collar_chart(-0.1, 0.5)


def test_equilateral_hexagon_seams():
    hx = hexagon_from_sides(1, 1, 1)
    b = hx.b
    assert abs(b[0] - b[1]) < 1e-10 and abs(b[1] - b[2]) < 1e-10
    ch = (math.cosh(1) + math.cosh(1) ** 2) / math.sinh(1) ** 2
    assert math.cosh(b[0]) == pytest.approx(ch, rel=1e-12)
    assert ch == pytest.approx(2.8414, abs=1e-4)


def test_equilateral_hexagon_round_trip():
    hx = hexagon_from_sides(1, 1, 1)
    for i in range(3):
        assert hx.measured_alpha(i) == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 4.0), st.floats(0.05, 4.0), st.floats(0.05, 4.0))
def test_hexagon_trig_consistency(h1, h2, h3):
    hx = hexagon_from_sides(h1, h2, h3)
    h = (h1, h2, h3)
    for i in range(3):
        assert hx.measured_alpha(i) == pytest.approx(h[i], abs=1e-8)
    for j in range(3):
        assert hx.measured_seam(j) == pytest.approx(hx.b[j], abs=1e-8)


def test_cusped_hexagon_has_ideal_vertices():
    hx = hexagon_from_sides(0, 1, 1)
    assert hx.is_cusp(0)
    assert sum(isinstance(v, IdealPoint) for v in hx.vertices) == 2
    assert hx.measured_alpha(1) == pytest.approx(1.0, abs=1e-9)


def test_hexagon_domain_error():
    with pytest.raises(GeometryError):
        hexagon_from_sides(-1, 1, 1)


def test_ideal_triangle_double_allowed():
    hx = hexagon_from_sides(0, 0, 0)
    assert all(hx.is_cusp(i) for i in range(3))


def test_profiles():
    assert t_profile(0.0) == 0.25
    assert xi_profile(0.0) == math.pi / 4
    h = np.linspace(0, 10, 101)
    assert np.all(np.diff(t_profile(h)) < 0)
    assert np.all(np.diff(xi_profile(h)) < 0)


def test_equilateral_barycenter_is_symmetric():
    hx = hexagon_from_sides(1, 1, 1)
    reg = hexagon_regions(hx)
    # the order-3 symmetry fixes the point equidistant from the three seams
    assert distance_complex(reg.barycenter, hx.center) < 1e-9


def test_karcher_mean_of_symmetric_pair():
    m = karcher_mean([1j, 4j])
    assert m == pytest.approx(2j, abs=1e-10)


SWEEP = [0.0, 0.1, 1.0, 5.0]


@pytest.mark.parametrize("h", list(itertools.product(SWEEP, repeat=3)))
def test_region_containments_sweep(h):
    reg = hexagon_regions(hexagon_from_sides(*h))
    c = reg.checks
    assert c["star_shaped"]
    assert c["core_boundary_in_hexagon"]
    assert c["conv_in_core"]
    assert c["barycenter_in_core"]
    assert c["tent_margin"] >= 0


@pytest.mark.parametrize("h", [(1, 1, 1), (0.1, 1.0, 5.0), (0, 1, 1), (5, 5, 5)])
def test_incidence_angle_lower_bound(h):
    # per-instance floor on the angle at which rays from B meet the core boundary;
    # known to fail for cusped and long-sided hexagons, see README
    reg = hexagon_regions(hexagon_from_sides(*h))
    bound = float(xi_profile(max(h))) / 2
    assert reg.core.incidence_angles(64).min() >= bound


def test_incidence_angle_positive_everywhere():
    for h in itertools.product(SWEEP, repeat=3):
        reg = hexagon_regions(hexagon_from_sides(*h))
        assert reg.checks["min_incidence"] > 0


def test_core_vertices_on_boundary():
    reg = hexagon_regions(hexagon_from_sides(0.5, 1.0, 2.0))
    for arc in reg.core_arcs:
        for tau in (0.0, 1.0):
            p = arc.points(np.array([tau]))[0]
            theta, d = reg.core.polar(np.array([p]))
            _, _, d_hit = reg.core.hit(theta)
            assert d[0] == pytest.approx(d_hit[0], abs=1e-8)


def test_cusp_region_horocycle():
    hx = hexagon_from_sides(0, 1, 1)
    reg = hexagon_regions(hx)
    assert reg.t[0] == 0.25
    # the pants cusp chart has period 1; the horocycle bounding the collar has length t(0)
    pg = double_to_pants(hx)
    chart = pg.collar(0, reg.t[0])
    assert chart.outer_length == pytest.approx(0.25)
    # frame chart has period 2, so the height doubles
    assert reg.outer_heights[0] == pytest.approx(2 * chart.min_height)


def test_pants_boundary_lengths():
    assert double_to_pants(hexagon_from_sides(1, 1, 1)).boundary_lengths == (2.0, 2.0, 2.0)


def test_involution_fixes_seams_only():
    hx = hexagon_from_sides(0.8, 1.1, 1.7)
    pg = double_to_pants(hx)
    for N in hx.beta_frames:
        for y in np.exp(np.linspace(-0.5, 0.5, 5)):
            z = complex(N.apply_complex(1j * y))
            if not hx.contains(np.array([z]))[0]:
                continue
            p = PantsPoint(0, z)
            assert pg.same_point(p, pg.involution(p))
    z = hx.center
    p = PantsPoint(0, z)
    assert not pg.same_point(p, pg.involution(p))


def test_involution_is_isometry_of_collar_coords():
    hx = hexagon_from_sides(0.8, 1.1, 1.7)
    pg = double_to_pants(hx)
    z = hx.center
    for i in range(3):
        rho0, x0 = pg.collar_coords(i, PantsPoint(0, z))
        rho1, x1 = pg.collar_coords(i, PantsPoint(1, z))
        assert rho0 == pytest.approx(rho1)
        assert x0 + x1 == pytest.approx(2 * hx.h[i])


def test_sheet_collar_restriction():
    hx = hexagon_from_sides(1, 1, 1)
    reg = hexagon_regions(hx)
    pg = double_to_pants(hx)
    chart = pg.collar(0, reg.t[0])
    assert chart.width == pytest.approx(reg.widths[0], rel=1e-12)


def test_seam_length_formula():
    assert seam_length(1, 1, 1) == pytest.approx(hexagon_from_sides(1, 1, 1).b[0])


def test_collar_hypercycle_at_least_one():
    # outer hypercycle of the full collar is never shorter than 1
    for ell in np.geomspace(1e-3, 20, 60):
        assert collar_chart(float(ell), 1.0).outer_length >= 1.0 - 1e-12
