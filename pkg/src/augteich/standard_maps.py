"""Standard maps between collars and between pairs of pants, and numerical
distortion measurement.

An annulus map sends the hypercycle at parameter s (s = 1 on the core
geodesic, s = 0 on the outer boundary, lengths interpolated linearly) to the
target hypercycle at the same s, and twists by theta (in turns) with the
profile 1 - Phi(rho~/D~): full twist at the geodesic, none at the outer
boundary. Working with 1 - s = sinh^2(rho/2) / sinh^2(D/2) keeps the radial
rule accurate near the geodesic.

The core map is a cone construction from the barycentres: boundary arcs map
by arclength proportion, rays from B map homothetically onto rays from B~.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import integrate

from .collar_hexagon import (
    CollarChart,
    HexRegions,
    PantsGeometry,
    collar_chart,
    double_to_pants,
    hexagon_from_sides,
    hexagon_regions,
)
from .hyp_core import GeometryError, distance_complex, fermi_to_halfplane, halfplane_to_fermi


class OrientationError(GeometryError):
    pass


# --- twist profile ---------------------------------------------------------------


def mollifier(s):
    """exp(-1 / (s (1/2 - s))) on (0, 1/2), zero elsewhere (unnormalised)."""
    s = np.asarray(s, dtype=float)
    inside = (s > 0) & (s < 0.5)
    safe = np.where(inside, s, 0.25)
    return np.where(inside, np.exp(-1.0 / (safe * (0.5 - safe))), 0.0)


_GL_X, _GL_W = np.polynomial.legendre.leggauss(64)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


class TwistProfile:
    """Bump phi supported in (0, 1/2) with unit integral, and Phi = int_0^s phi."""

    def __init__(self, bump=mollifier):
        self.bump = bump
        mass, _ = integrate.quad(bump, 0.0, 0.5, epsabs=1e-15, epsrel=1e-13, limit=200)
        if not mass > 0:
            raise GeometryError("bump function has no mass on (0, 1/2)")
        self.mass = mass
        if abs(self.Phi(0.5) - 1.0) > 1e-9:
            raise GeometryError("quadrature of the bump is not accurate enough")

    def phi(self, s):
        return self.bump(s) / self.mass

    def Phi(self, s):
        s = np.clip(np.asarray(s, dtype=float), 0.0, 0.5)
        nodes = s[..., None] * _GL_X
        out = s * (self.phi(nodes) @ _GL_W)
        return np.where(s >= 0.5, 1.0, out) if out.ndim else (1.0 if s >= 0.5 else float(out))


DEFAULT_PROFILE = TwistProfile()


# --- annulus maps ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AnnulusMap:
    """Standard map A_t(l) -> A_t~(l~) with twist ``theta`` in turns.

    Chart points are (rho, x) for l > 0 (x in length units along the
    geodesic) and (y, x) for a cusp chart of period 1.
    """

    source: CollarChart
    target: CollarChart
    theta: float = 0.0
    profile: TwistProfile = DEFAULT_PROFILE

    def __post_init__(self):
        if self.source.is_cusp and not self.target.is_cusp:
            raise GeometryError("a cusp can only be mapped to a cusp")

    # 1 - s, the normalised depth from the outer boundary
    def _depth(self, chart: CollarChart, r):
        r = np.asarray(r, dtype=float)
        if chart.is_cusp:
            return 1.0 / (r * chart.t)
        return (np.sinh(r / 2.0) / math.sinh(chart.width / 2.0)) ** 2

    def _radius(self, chart: CollarChart, depth):
        depth = np.asarray(depth, dtype=float)
        if chart.is_cusp:
            with np.errstate(divide="ignore"):
                return 1.0 / (depth * chart.t)
        return 2.0 * np.arcsinh(np.sqrt(np.maximum(depth, 0.0)) * math.sinh(chart.width / 2.0))

    def _period(self, chart: CollarChart) -> float:
        return 1.0 if chart.is_cusp else chart.ell

    def _twist(self, rho_t):
        if self.target.is_cusp:
            return 0.0
        return self.theta * (1.0 - self.profile.Phi(np.asarray(rho_t) / self.target.width))

    def eval(self, r, x):
        """Image chart coordinates of source chart coordinates (r, x)."""
        r_t = self._radius(self.target, self._depth(self.source, r))
        u = np.asarray(x, dtype=float) / self._period(self.source)
        u_t = u + self._twist(r_t)
        return r_t, u_t * self._period(self.target)

    def inverse(self, r_t, x_t):
        r = self._radius(self.source, self._depth(self.target, r_t))
        u_t = np.asarray(x_t, dtype=float) / self._period(self.target)
        u = u_t - self._twist(r_t)
        return r, u * self._period(self.source)

    # the same maps on the universal covers, drawn in the upper half-plane
    @staticmethod
    def _to_chart(chart: CollarChart, z):
        z = np.asarray(z, dtype=complex)
        if chart.is_cusp:
            return z.imag, z.real
        return halfplane_to_fermi(z)

    @staticmethod
    def _from_chart(chart: CollarChart, r, x):
        if chart.is_cusp:
            return np.asarray(x) + 1j * np.asarray(r)
        return fermi_to_halfplane(r, x)

    def eval_halfplane(self, z):
        r, x = self._to_chart(self.source, z)
        return self._from_chart(self.target, *self.eval(r, x))

    def inverse_halfplane(self, z):
        r, x = self._to_chart(self.target, z)
        return self._from_chart(self.source, *self.inverse(r, x))

    def chart_grid(self, n: int, s_max: float = 1.0, side: str = "source"):
        """Product grid of chart points covering one period, uniform in the
        radial parameter s on [0, s_max] (s = 0 on the outer boundary)."""
        chart = self.source if side == "source" else self.target
        s = s_max * (np.arange(n) + 0.5) / n
        u = (np.arange(n) + 0.5) / n
        S, U = np.meshgrid(s, u, indexing="ij")
        depth = 1.0 - S
        if chart.is_cusp:
            r = 1.0 / (chart.t * depth)
        else:
            r = self._radius(chart, depth)
        return self._from_chart(chart, r, U * self._period(chart)).ravel()


def annulus_map(ell: float, ell_t: float, theta: float = 0.0, t: float = 1.0,
                t_t: float | None = None, profile: TwistProfile = DEFAULT_PROFILE) -> AnnulusMap:
    return AnnulusMap(collar_chart(ell, t), collar_chart(ell_t, t if t_t is None else t_t),
                      theta, profile)


# --- core and pants maps ------------------------------------------------------------


def core_map(src: HexRegions, tgt: HexRegions, z):
    """Cone map of the source core onto the target core."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    S, T = src.core, tgt.core
    theta, d = S.polar(z)
    k, tau, d_q = S.hit(theta)
    q_t = T.boundary_point(k, tau)
    theta_t, d_qt = T.polar(q_t)
    return T.from_polar(theta_t, d / d_q * d_qt)


@dataclass(frozen=True, eq=False)
class PantsMap:
    """Standard map of pairs of pants dH -> dH~ with twists (turns) per cuff."""

    source: HexRegions
    target: HexRegions
    twists: tuple = (0.0, 0.0, 0.0)
    profile: TwistProfile = DEFAULT_PROFILE

    def __post_init__(self):
        for i in range(3):
            if self.source.hexagon.is_cusp(i) and not self.target.hexagon.is_cusp(i):
                raise GeometryError("a cusp of the source must stay a cusp")

    @cached_property
    def source_pants(self) -> PantsGeometry:
        return double_to_pants(self.source.hexagon)

    @cached_property
    def target_pants(self) -> PantsGeometry:
        return double_to_pants(self.target.hexagon)

    @cached_property
    def collar_maps(self) -> tuple:
        out = []
        for i in range(3):
            out.append(AnnulusMap(self.source_pants.collar(i, self.source.t[i]),
                                  self.target_pants.collar(i, self.target.t[i]),
                                  float(self.twists[i]), self.profile))
        return tuple(out)

    def eval_core(self, z):
        return core_map(self.source, self.target, z)

    def eval_collar(self, i: int, sheet, z):
        """Image (sheet, z~) of hexagon points z on the given sheet lying in
        the collar of cuff i."""
        sheet = np.atleast_1d(np.asarray(sheet, dtype=int))
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        src, tgt = self.source.hexagon, self.target.hexagon
        w = src.alpha_frames[i].inverse().apply_complex(z)
        if src.is_cusp(i):
            r, x = w.imag / 2.0, w.real / 2.0
            x = np.where(sheet == 0, x, 1.0 - x)
        else:
            r, x = halfplane_to_fermi(w)
            x = np.where(sheet == 0, x, 2.0 * src.h[i] - x)
        r_t, x_t = self.collar_maps[i].eval(r, x)
        if tgt.is_cusp(i):
            x_t = np.mod(x_t, 1.0)
            new_sheet = (x_t > 0.5).astype(int)
            xh = np.where(new_sheet == 0, x_t, 1.0 - x_t)
            w_t = 2.0 * (xh + 1j * r_t)
        else:
            h_t = tgt.h[i]
            x_t = np.mod(x_t, 2.0 * h_t)
            new_sheet = (x_t > h_t).astype(int)
            xh = np.where(new_sheet == 0, x_t, 2.0 * h_t - x_t)
            w_t = fermi_to_halfplane(r_t, xh)
        return new_sheet, tgt.alpha_frames[i].apply_complex(w_t)

    def region(self, z):
        """-1 for the core, i for the collar of cuff i."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        reg = np.full(z.shape, -1)
        for i in range(3):
            reg = np.where((reg < 0) & self.source.in_collar(i, z), i, reg)
        return reg

    def eval(self, sheet, z):
        """Pants map on points (sheet, z) of the doubled hexagon."""
        sheet = np.atleast_1d(np.asarray(sheet, dtype=int))
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        outside = ~self.source.hexagon.contains(z, 1e-9)
        if outside.any():
            warnings.warn(f"{int(outside.sum())} points lie outside the hexagon; "
                          "resolved to the nearest region", RuntimeWarning, stacklevel=2)
        reg = self.region(z)
        out_sheet = sheet.copy()
        out = np.empty(z.shape, dtype=complex)
        core = reg < 0
        if core.any():
            out[core] = self.eval_core(z[core])
        for i in range(3):
            sel = reg == i
            if sel.any():
                out_sheet[sel], out[sel] = self.eval_collar(i, sheet[sel], z[sel])
        return out_sheet, out

    def interface_gap(self, n: int = 256) -> float:
        """Largest hyperbolic distance between the core and collar images of
        points on the three core/collar interfaces, over both sheets."""
        arcs = self.source.core_arcs
        per = -(-n // 3)
        u = (np.arange(per) + 0.5) / per
        worst = 0.0
        for i in range(3):
            z = arcs[2 * i].points(u)
            zc = self.eval_core(z)
            for sheet in (0, 1):
                sh, zt = self.eval_collar(i, np.full(z.shape, sheet), z)
                if np.any(sh != sheet):
                    return math.inf
                worst = max(worst, float(np.max(distance_complex(zc, zt))))
        return worst

    def core_samples(self, n: int, tube: float = 1e-5):
        """Polar grid of the source core about B, minus a tube around the six
        cone segments where the core map is not differentiable."""
        S = self.source.core
        corners = [S.polar(np.array([complex(a.points(0.0))]))[0][0] for a in S.arcs]
        # the distortion of a cone map peaks in narrow angular wedges next to
        # the corners, so angles are refined geometrically towards each corner
        near = np.geomspace(1e-4, 0.2, max(4, n // 4))
        theta = -math.pi + 2 * math.pi * (np.arange(n) + 0.5) / n
        theta = np.concatenate([theta] + [c + s * near for c in corners for s in (-1, 1)])
        theta = np.sort(np.angle(np.exp(1j * theta)))
        frac = (np.arange(n) + 0.5) / n
        _, _, d_q = S.hit(theta)
        TH, FR = np.meshgrid(theta, frac, indexing="ij")
        D = FR * d_q[:, None]
        pts = S.from_polar(TH, D).ravel()
        th, d = TH.ravel(), D.ravel()
        keep = np.ones(pts.shape, dtype=bool)
        for phi in corners:
            dth = th - phi
            dist = np.arcsinh(np.sinh(d) * np.abs(np.sin(dth)))
            keep &= ~((dist < tube) & (np.cos(dth) > 0))
        return pts[keep], 1.0 - keep.mean()


def pants_map(h, h_t, twists=(0.0, 0.0, 0.0), profile=DEFAULT_PROFILE) -> PantsMap:
    """Standard pants map between hexagons with alpha sides h and h_t."""
    src = hexagon_regions(hexagon_from_sides(*h))
    tgt = hexagon_regions(hexagon_from_sides(*h_t))
    return PantsMap(src, tgt, tuple(float(v) for v in twists), profile)


def pants_map_eval(m: PantsMap, sheet, z):
    return m.eval(sheet, z)


def annulus_map_eval(m: AnnulusMap, r, x):
    return m.eval(r, x)


def core_map_eval(m: PantsMap, z):
    return m.eval_core(z)


# --- distortion ----------------------------------------------------------------------


@dataclass(frozen=True)
class DistortionReport:
    points: np.ndarray
    K: np.ndarray
    eps: np.ndarray           # metric deviation of the map's pullback
    eps_inverse: np.ndarray   # the same for the inverse map, at image points
    skipped: float = 0.0      # fraction of requested samples excluded
    resolution: int | None = None

    @property
    def sup_K(self) -> float:
        return float(self.K.max()) if self.K.size else 1.0

    @property
    def sup_eps(self) -> float:
        return float(self.eps.max()) if self.eps.size else 0.0

    @property
    def sup_eps_inverse(self) -> float:
        return float(self.eps_inverse.max()) if self.eps_inverse.size else 0.0

    @staticmethod
    def merge(reports, resolution=None) -> "DistortionReport":
        reports = list(reports)
        if not reports:
            e = np.empty(0)
            return DistortionReport(e.astype(complex), e, e, e, 0.0, resolution)
        n = sum(r.points.size for r in reports) or 1
        skipped = sum(r.skipped * r.points.size for r in reports) / n
        return DistortionReport(np.concatenate([r.points for r in reports]),
                                np.concatenate([r.K for r in reports]),
                                np.concatenate([r.eps for r in reports]),
                                np.concatenate([r.eps_inverse for r in reports]),
                                skipped, resolution)


def measure_distortion(f, points, step: float = 1e-6, skipped: float = 0.0,
                       resolution: int | None = None) -> DistortionReport:
    """Pointwise distortion of a map f between hyperbolic half-planes.

    Central differences with step ``step`` in the hyperbolic scale at each
    point; K from the Beltrami quotient, eps from the eigenvalues of the
    pullback metric relative to the source metric.
    """
    z = np.atleast_1d(np.asarray(points, dtype=complex)).ravel()
    if z.size == 0:
        e = np.empty(0)
        return DistortionReport(z, e, e, e, skipped, resolution)
    dz = step * z.imag
    fz0 = np.asarray(f(z), dtype=complex)
    fx = (np.asarray(f(z + dz)) - np.asarray(f(z - dz))) / (2 * dz)
    fy = (np.asarray(f(z + 1j * dz)) - np.asarray(f(z - 1j * dz))) / (2 * dz)
    a = np.abs(0.5 * (fx - 1j * fy))
    b = np.abs(0.5 * (fx + 1j * fy))
    bad = a <= b
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        raise OrientationError(f"map reverses orientation or is singular at {z[k]!r}")
    K = (a + b) / (a - b)
    scale = (z.imag / fz0.imag) ** 2
    mu_hi = scale * (a + b) ** 2
    mu_lo = scale * (a - b) ** 2
    eps = np.maximum(np.abs(mu_hi - 1.0), np.abs(mu_lo - 1.0))
    eps_inv = np.maximum(np.abs(1.0 / mu_hi - 1.0), np.abs(1.0 / mu_lo - 1.0))
    return DistortionReport(z, K, eps, eps_inv, skipped, resolution)


def pants_map_distortion(m: PantsMap, n: int = 64, collar_smax=(1.0, 1.0, 1.0),
                         include_core: bool = True) -> DistortionReport:
    """Distortion of a pants map: the core map on a polar grid and each
    collar map on a chart grid (the collar grid covers both sheets).

    ``collar_smax[i]`` restricts the collar of cuff i to s <= collar_smax[i];
    a value of 0 drops that collar.
    """
    parts = []
    if include_core:
        pts, skipped = m.core_samples(n)
        parts.append(measure_distortion(m.eval_core, pts, skipped=skipped))
    for i, A in enumerate(m.collar_maps):
        s_max = collar_smax[i]
        if s_max <= 0:
            continue
        pts = A.chart_grid(n, s_max=s_max)
        if not A.source.is_cusp:
            pts = pts[pts.real > 0]        # drop the core geodesic itself
        parts.append(measure_distortion(A.eval_halfplane, pts))
    return DistortionReport.merge(parts, n)
