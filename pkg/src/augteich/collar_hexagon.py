"""Collars, right-angled hexagons and the regions used by the standard maps.

Conventions
-----------
A hexagon H(h1, h2, h3) has sides (alpha1, beta3, alpha2, beta1, alpha3, beta2)
in counterclockwise order, with alpha_i of length h_i. Vertices are

    v1 = alpha1.beta3, v2 = beta3.alpha2, v3 = alpha2.beta1,
    v4 = beta1.alpha3, v5 = alpha3.beta2, v6 = beta2.alpha1.

Each alpha side has a chart (a Mobius frame):

* h > 0: the frame sends the imaginary axis onto alpha_i, i to its vertex on
  the "next" seam (the one following alpha_i counterclockwise) and i e^h to its
  vertex on the "previous" seam. The hexagon lies in Re > 0, so Fermi
  coordinates (rho, x) about the axis describe the half collar with
  x in [0, h].
* h = 0: the frame sends infinity to the ideal vertex, the next seam to
  Re = 0 and the previous seam to Re = 1. The doubled pants has period 2 in
  this frame, so the horocycle of length t sits at height 2/t.

The pants collar of d(alpha_i) has length l = 2h and its one-sided width D
satisfies l sinh D = t l / (2 sinh(l/2)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import integrate
from scipy.optimize import brentq

from .hyp_core import (
    DegeneracyError,
    GeodesicSegment,
    GeometryError,
    HorocycleArc,
    HypercycleArc,
    IdealPoint,
    MobiusTransform,
    NotStarShapedError,
    distance_complex,
    fermi_to_halfplane,
    frame_at,
    frame_to_infinity,
    geodesic_frame,
    halfplane_to_fermi,
    ideal_geodesic_frame,
)

NEXT = {0: 2, 1: 0, 2: 1}   # alpha_i -> index of the seam after it (ccw)
PREV = {0: 1, 1: 2, 2: 0}   # alpha_i -> index of the seam before it
NEXT_VERTEX = (0, 2, 4)     # vertex of alpha_i on its next seam (0-based v1..v6)
PREV_VERTEX = (5, 1, 3)


class ContainmentError(GeometryError):
    pass


# --- collars ---------------------------------------------------------------


def collar_quantities(ell: float, d: float) -> tuple[float, float]:
    """(hypercycle length, area) of the one-sided collar of width d about a
    geodesic of length ell."""
    if ell <= 0 or d < 0:
        raise GeometryError("need ell > 0 and d >= 0")
    return ell * math.cosh(d), ell * math.sinh(d)


def collar_width(ell: float, t: float) -> float:
    return math.asinh(t / (2.0 * math.sinh(ell / 2.0)))


@dataclass(frozen=True)
class CollarChart:
    """One-sided collar A_t(ell) of area t ell / (2 sinh(ell/2)).

    Fermi chart (rho in [0, D], x in [0, ell)) when ell > 0; cusp chart
    (height y >= 1/t, x in [0, 1)) when ell == 0.
    """

    ell: float
    t: float

    def __post_init__(self):
        if self.ell < 0:
            raise GeometryError("collar length must be nonnegative")
        if not 0 < self.t <= 1:
            raise GeometryError("area fraction t must lie in (0, 1]")

    @property
    def is_cusp(self) -> bool:
        return self.ell == 0

    @property
    def width(self) -> float:
        if self.is_cusp:
            return math.inf
        return collar_width(self.ell, self.t)

    @property
    def area(self) -> float:
        if self.is_cusp:
            return self.t
        return self.t * self.ell / (2.0 * math.sinh(self.ell / 2.0))

    @property
    def outer_length(self) -> float:
        """Length of the bounding hypercycle (or horocycle)."""
        if self.is_cusp:
            return self.t
        return self.ell * math.cosh(self.width)

    @property
    def min_height(self) -> float:
        if not self.is_cusp:
            raise GeometryError("only cusp charts have a height coordinate")
        return 1.0 / self.t

    def integrated_area(self) -> float:
        """Area by integrating the chart's area element."""
        if self.is_cusp:
            val, _ = integrate.quad(lambda y: y ** -2, self.min_height, math.inf,
                                    epsabs=1e-14, epsrel=1e-12)
            return val
        val, _ = integrate.dblquad(lambda x, rho: math.cosh(rho), 0.0, self.width,
                                   0.0, self.ell, epsabs=1e-14, epsrel=1e-12)
        return val


def collar_chart(ell: float, t: float) -> CollarChart:
    return CollarChart(float(ell), float(t))


def t_profile(h):
    """Collar area fraction used on a side of half-length h; t(0) = 1/4."""
    return 1.0 / (4.0 * (1.0 + np.asarray(h, dtype=float)))


def xi_profile(h):
    """Tent angle used on a side of half-length h; xi(0) = pi/4."""
    return math.pi / (4.0 * (1.0 + np.asarray(h, dtype=float)))


# --- Minkowski model helpers -------------------------------------------------

_J = np.diag([1.0, 1.0, -1.0])


def _lip(a, b) -> float:
    return float(a @ _J @ b)


def _lcross(a, b):
    return _J @ np.cross(a, b)


def _future(v):
    return -v if v[2] < 0 else v


def _to_disc(v) -> complex:
    v = _future(np.asarray(v, dtype=float))
    q = _lip(v, v)
    if q < -1e-14 * v[2] ** 2:
        v = v / math.sqrt(-q)
        return complex(v[0], v[1]) / (1.0 + v[2])
    return complex(v[0], v[1]) / v[2]


def to_hyperboloid(z):
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    r2 = x * x + y * y
    return np.stack([x / y, (r2 - 1.0) / (2.0 * y), (r2 + 1.0) / (2.0 * y)], axis=-1)


def from_hyperboloid(v):
    v = np.asarray(v, dtype=float)
    y = 1.0 / (v[..., 2] - v[..., 1])
    return v[..., 0] * y + 1j * y


def karcher_mean(points, tol: float = 1e-13, maxiter: int = 5000) -> complex:
    """Minimiser of the sum of squared distances, by Riemannian gradient
    descent. The step is the inverse of the largest Hessian eigenvalue
    bound mean(d coth d), which keeps the iteration monotone."""
    P = to_hyperboloid(np.asarray(points, dtype=complex))
    c = P.mean(axis=0)
    c = c / math.sqrt(-_lip(c, c))
    for _ in range(maxiter):
        ip = -(P @ _J @ c)                       # cosh of distances
        ip = np.maximum(ip, 1.0)
        d = np.arccosh(ip)
        coef = np.where(d > 1e-12, d / np.sinh(np.maximum(d, 1e-300)), 1.0)
        logs = coef[:, None] * (P - ip[:, None] * c[None, :])
        g = logs.mean(axis=0)
        n = math.sqrt(max(_lip(g, g), 0.0))
        if n < tol:
            break
        curv = np.mean(np.where(d > 1e-12, d / np.tanh(np.maximum(d, 1e-300)), 1.0))
        g = g / curv
        n = n / curv
        c = math.cosh(n) * c + math.sinh(n) * g / n
        c = c / math.sqrt(-_lip(c, c))
    else:
        raise GeometryError("Karcher mean iteration did not converge")
    return complex(from_hyperboloid(c))


# --- hexagons --------------------------------------------------------------


def seam_length(hk: float, hi: float, hj: float) -> float:
    """Length of the seam opposite alpha_k (between alpha_i and alpha_j)."""
    if hi == 0 or hj == 0:
        return math.inf
    c = (math.cosh(hk) + math.cosh(hi) * math.cosh(hj)) / (math.sinh(hi) * math.sinh(hj))
    return math.acosh(c)


def _ideal_to_halfplane(w: complex) -> float:
    phi = math.atan2(w.imag, w.real)
    if abs(abs(phi) - math.pi) < 1e-15:
        return math.inf
    return math.tan(phi / 2.0)


@dataclass(frozen=True, eq=False)
class HexagonGeometry:
    h: tuple
    b: tuple
    vertices: tuple          # complex, or IdealPoint at cusps
    beta_ends: tuple         # per seam: (IdealPoint, IdealPoint)
    alpha_frames: tuple
    beta_frames: tuple
    center: complex          # the point equidistant from the three seam lines

    def is_cusp(self, i: int) -> bool:
        return self.h[i] == 0

    def measured_alpha(self, i: int) -> float:
        if self.is_cusp(i):
            return 0.0
        return float(distance_complex(self.vertices[NEXT_VERTEX[i]],
                                      self.vertices[PREV_VERTEX[i]]))

    def measured_seam(self, j: int) -> float:
        """Length of beta_j measured between its two vertices."""
        a, b = {2: (0, 1), 0: (2, 3), 1: (4, 5)}[j]
        va, vb = self.vertices[a], self.vertices[b]
        if isinstance(va, IdealPoint) or isinstance(vb, IdealPoint):
            return math.inf
        return float(distance_complex(va, vb))

    def alpha_coords(self, i: int, z):
        """Chart coordinates of z for alpha_i: (rho, x) Fermi pair, or the
        frame point w itself at a cusp."""
        w = self.alpha_frames[i].inverse().apply_complex(z)
        if self.is_cusp(i):
            return w
        return halfplane_to_fermi(w)

    def contains(self, z, tol: float = 1e-9):
        """Membership in the closed hexagon (ideal vertices excluded)."""
        z = np.asarray(z, dtype=complex)
        ok = np.ones(z.shape, dtype=bool)
        for N in self.beta_frames:
            w = N.inverse().apply_complex(z)
            ok &= w.real >= -tol * np.abs(w)
        for i, F in enumerate(self.alpha_frames):
            if not self.is_cusp(i):
                w = F.inverse().apply_complex(z)
                ok &= w.real >= -tol * np.abs(w)
        return ok

    def reflect_in_seam(self, j: int, z):
        """Reflection of z in the seam line beta_j."""
        N = self.beta_frames[j]
        return N.apply_complex(-np.conj(N.inverse().apply_complex(z)))


def hexagon_from_sides(h1: float, h2: float, h3: float) -> HexagonGeometry:
    h = tuple(float(v) for v in (h1, h2, h3))
    if any(not (v >= 0 and math.isfinite(v)) for v in h):
        raise GeometryError(f"hexagon sides must be finite and nonnegative, got {h}")
    c = [math.cosh(v) for v in h]
    # Gram matrix of the unit normals m1, m2, m3 of the seam lines
    G = np.array([[1.0, -c[2], -c[1]],
                  [-c[2], 1.0, -c[0]],
                  [-c[1], -c[0], 1.0]])
    lam, Q = np.linalg.eigh(G)
    if not (lam[0] < 0 < lam[1]):
        raise GeometryError("normals Gram matrix does not have signature (2, 1)")
    order = [1, 2, 0]        # the negative direction becomes the time axis
    M = (Q[:, order] * np.sqrt(np.abs(lam[order]))[None, :])
    m = [M[j] for j in range(3)]
    s = m[0] + m[1] + m[2]
    if s[2] < 0:
        m = [-v for v in m]
        s = -s
    s_hat = s / math.sqrt(-_lip(s, s))

    def foot(j):
        u = s_hat - _lip(s_hat, m[j]) * m[j]
        return u / math.sqrt(-_lip(u, u))

    # alpha normals and vertices in the Minkowski model
    adj = {0: (2, 1), 1: (0, 2), 2: (1, 0)}     # alpha_i -> (next seam, prev seam)
    vert_vec = [None] * 6
    ideal = [False] * 6
    for i in range(3):
        jn, jp = adj[i]
        n = _lcross(m[jn], m[jp])
        for vidx, j in ((NEXT_VERTEX[i], jn), (PREV_VERTEX[i], jp)):
            if h[i] == 0:
                vert_vec[vidx] = _future(n)
                ideal[vidx] = True
            else:
                vert_vec[vidx] = _future(_lcross(n, m[j]))

    def seam_ends(j):
        u = foot(j)
        w = _lcross(m[j], u)
        w = w / math.sqrt(abs(_lip(w, w)))
        return u + w, u - w

    # normalise in the disc: centre to 0, fixed orientation and rotation
    c0 = _to_disc(s_hat)
    feet = [_to_disc(foot(j)) for j in range(3)]

    def mob(w, flip, c1, rot):
        w = np.conj(w) if flip else w
        return rot * (w - c1) / (1.0 - np.conj(c1) * w)

    f = [mob(v, False, c0, 1.0) for v in feet]
    a3, a1, a2 = (math.atan2(v.imag, v.real) for v in (f[2], f[0], f[1]))
    flip = ((a1 - a3) % (2 * math.pi)) > ((a2 - a3) % (2 * math.pi))
    c1 = np.conj(c0) if flip else c0
    f1 = mob(feet[0], flip, c1, 1.0)
    rot = complex(np.exp(1j * (math.pi / 2 - math.atan2(f1.imag, f1.real))))

    def to_hp(v, is_ideal):
        w = complex(mob(_to_disc(v), flip, c1, rot))
        if is_ideal:
            return IdealPoint(_ideal_to_halfplane(w))
        return 1j * (1.0 - w) / (1.0 + w)

    vertices = tuple(to_hp(vert_vec[k], ideal[k]) for k in range(6))
    ends_disc = []
    for j in range(3):
        e1, e2 = seam_ends(j)
        ends_disc.append(tuple(complex(mob(_to_disc(e), flip, c1, rot)) for e in (e1, e2)))
    beta_ends = tuple(tuple(IdealPoint(_ideal_to_halfplane(w)) for w in pair)
                      for pair in ends_disc)

    beta_frames = []
    for j in range(3):
        a, b = beta_ends[j]
        N = ideal_geodesic_frame(a, b)
        if N.inverse().apply_complex(1j).real < 0:
            N = ideal_geodesic_frame(b, a)
        beta_frames.append(N)

    alpha_frames = []
    for i in range(3):
        if h[i] > 0:
            alpha_frames.append(geodesic_frame(vertices[NEXT_VERTEX[i]],
                                               vertices[PREV_VERTEX[i]]))
            continue
        a = vertices[NEXT_VERTEX[i]]
        a_disc = complex(mob(_to_disc(vert_vec[NEXT_VERTEX[i]]), flip, c1, rot))
        G0 = frame_to_infinity(a)
        G0i = G0.inverse()
        other = []
        for j in adj[i]:
            k = int(np.argmax([abs(e - a_disc) for e in ends_disc[j]]))
            other.append(G0i.apply_ideal(beta_ends[j][k]).x)
        pn, pp = other
        if not pp > pn:
            raise GeometryError("cusp frame has the wrong orientation")
        alpha_frames.append(G0 @ MobiusTransform(pp - pn, pn, 0.0, 1.0))

    b = (seam_length(h[0], h[1], h[2]), seam_length(h[1], h[2], h[0]),
         seam_length(h[2], h[0], h[1]))
    return HexagonGeometry(h, b, vertices, beta_ends, tuple(alpha_frames),
                           tuple(beta_frames), 1j)


# --- star-shaped core regions -------------------------------------------------


class StarDomain:
    """Region bounded by a closed chain of arcs, star-shaped about ``center``.

    Rays from the centre are straight lines in the disc model centred there,
    and every arc is a Euclidean circle in that model, so ray hits are roots
    of a quadratic; everything is vectorised over points.
    """

    def __init__(self, center: complex, arcs):
        self.center = complex(center)
        self.arcs = list(arcs)
        self._circles = np.array([self._circle(a) for a in self.arcs])

    def disc(self, z):
        z = np.asarray(z, dtype=complex)
        c = self.center
        return (z - c) / (z - np.conj(c))

    def from_disc(self, w):
        w = np.asarray(w, dtype=complex)
        c = self.center
        return (c - np.conj(c) * w) / (1.0 - w)

    def _circle(self, arc):
        pts = self.disc(arc.points(np.array([0.0, 0.5, 1.0])))
        A = np.stack([np.abs(pts) ** 2, pts.real, pts.imag, np.ones(3)], axis=1)
        v = np.linalg.svd(A)[2][-1]
        return v / np.max(np.abs(v))

    def polar(self, z):
        """(direction angle, hyperbolic distance) of z as seen from the centre."""
        w = self.disc(z)
        return np.angle(w), 2.0 * np.arctanh(np.minimum(np.abs(w), 1.0 - 1e-16))

    def from_polar(self, theta, d):
        return self.from_disc(np.tanh(np.asarray(d) / 2.0) * np.exp(1j * np.asarray(theta)))

    def hit(self, theta, tol: float = 1e-9):
        """First boundary hit of the ray at angle theta: (arc index, arc
        parameter, hyperbolic distance)."""
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        ct, st = np.cos(theta), np.sin(theta)
        best_r = np.full(theta.shape, np.inf)
        best_k = np.full(theta.shape, -1)
        best_t = np.zeros(theta.shape)
        for k, (A, D, E, F) in enumerate(self._circles):
            b = D * ct + E * st
            disc = b * b - 4.0 * A * F
            ok = disc >= 0
            sq = np.sqrt(np.where(ok, disc, 0.0))
            q = -0.5 * (b + np.where(b >= 0, sq, -sq))
            with np.errstate(divide="ignore", invalid="ignore"):
                roots = (np.where(np.abs(A) > 0, q / A, np.inf), F / q)
            for r in roots:
                good = ok & np.isfinite(r) & (r > 0) & (r < 1)
                if not good.any():
                    continue
                pts = self.from_disc(np.where(good, r, 0.5) * np.exp(1j * theta))
                tau = self.arcs[k].param_of(pts)
                good &= (tau >= -tol) & (tau <= 1 + tol) & (r < best_r)
                best_r = np.where(good, r, best_r)
                best_k = np.where(good, k, best_k)
                best_t = np.where(good, np.clip(tau, 0.0, 1.0), best_t)
        if np.any(best_k < 0):
            raise NotStarShapedError("a ray from the centre misses the boundary")
        return best_k, best_t, 2.0 * np.arctanh(best_r)

    def boundary_point(self, k, tau):
        k = np.atleast_1d(k)
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        out = np.empty(tau.shape, dtype=complex)
        for idx in np.unique(k):
            sel = k == idx
            out[sel] = self.arcs[int(idx)].points(tau[sel])
        return out

    def boundary_samples(self, per_arc: int = 64):
        """Sample points, arc indices and parameters along the closed chain."""
        tau = (np.arange(per_arc) + 0.5) / per_arc
        pts, ks, ts = [], [], []
        for k, arc in enumerate(self.arcs):
            pts.append(arc.points(tau))
            ks.append(np.full(per_arc, k))
            ts.append(tau)
        return np.concatenate(pts), np.concatenate(ks), np.concatenate(ts)

    def incidence_angles(self, per_arc: int = 64):
        """Angle between the radial direction and the boundary tangent at samples."""
        pts, ks, ts = self.boundary_samples(per_arc)
        dt = 1e-6
        p_lo = self.disc(self.boundary_point(ks, ts - dt))
        p_hi = self.disc(self.boundary_point(ks, ts + dt))
        tang = p_hi - p_lo
        w = self.disc(pts)
        ang = np.abs(np.angle(tang / w))
        return np.minimum(ang, math.pi - ang)

    def star_check(self, per_arc: int = 64) -> bool:
        """Polar angle strictly increasing along the boundary, one full turn."""
        pts = []
        tau = np.linspace(0.0, 1.0, per_arc + 1)[:-1]
        for arc in self.arcs:
            pts.append(arc.points(tau))
        theta = np.unwrap(np.angle(self.disc(np.concatenate(pts))))
        steps = np.diff(np.append(theta, theta[0] + 2 * math.pi))
        total = theta[-1] - theta[0] + steps[-1]
        return bool(np.all(steps > 0) and abs(total - 2 * math.pi) < 1e-6)


# --- regions -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class HexRegions:
    hexagon: HexagonGeometry
    t: tuple
    xi: tuple                 # tent angles actually used
    xi_profile: tuple         # tent angles requested by the profile
    shrinks: int
    widths: tuple             # collar widths D_i (inf at cusps)
    outer_heights: tuple      # cusp horocycle heights in frame coordinates (nan otherwise)
    x_pts: tuple
    y_pts: tuple
    peaks: tuple              # the tent apexes P_i
    core_arcs: tuple          # boundary of H-core, ccw, starting with alpha'''_1
    conv_vertices: tuple      # 9 vertices of H-conv, ccw
    barycenter: complex
    checks: dict

    @cached_property
    def core(self) -> StarDomain:
        return StarDomain(self.barycenter, self.core_arcs)

    def in_collar(self, i: int, z):
        """Membership in the closed half collar A_t(alpha_i)."""
        hx = self.hexagon
        if hx.is_cusp(i):
            w = hx.alpha_coords(i, z)
            return w.imag >= self.outer_heights[i] * (1 - 1e-12)
        rho, _ = hx.alpha_coords(i, z)
        return rho <= self.widths[i] * (1 + 1e-12)

    def in_core(self, z, tol: float = 1e-9):
        hx = self.hexagon
        ok = hx.contains(z, tol)
        for i in range(3):
            if hx.is_cusp(i):
                w = hx.alpha_coords(i, z)
                ok &= w.imag <= self.outer_heights[i] * (1 + tol)
            else:
                rho, _ = hx.alpha_coords(i, z)
                ok &= rho >= self.widths[i] - tol
        return ok


def _tent_apex(hx: HexagonGeometry, i: int, t: float, xi: float):
    """Frame coordinates of x_i and of the apex of the tent over alpha_i."""
    if hx.is_cusp(i):
        Y = 2.0 / t
        ray = frame_at(1j * Y, -xi)
        g = lambda s: float(ray.apply_complex(1j * math.exp(s)).real) - 0.5
        target = lambda w: w.imag
    else:
        h = hx.h[i]
        D = collar_width(2 * h, t)
        z0 = complex(fermi_to_halfplane(D, 0.0))
        ray = frame_at(z0, math.atan2(z0.imag, z0.real) - xi)
        g = lambda s: math.log(abs(complex(ray.apply_complex(1j * math.exp(s))))) - h / 2
        target = lambda w: float(halfplane_to_fermi(w)[0])
    s_hi = 1e-3
    while g(s_hi) < 0:
        s_hi *= 2
        if s_hi > 60:
            return None
    s = brentq(g, 0.0, s_hi, xtol=1e-15, rtol=1e-15)
    w = complex(ray.apply_complex(1j * math.exp(s)))
    return w, target(w)


def _side(hx: HexagonGeometry, i: int, t: float, xi: float, tol: float):
    """Collar boundary points x_i, y_i and tent apex P_i for one alpha side,
    or None when the tent leaves the half-area collar."""
    F = hx.alpha_frames[i]
    apex = _tent_apex(hx, i, t, xi)
    if apex is None:
        return None
    wP, val = apex
    if hx.is_cusp(i):
        Y = 2.0 / t
        xw, yw = 1j * Y, 1.0 + 1j * Y
        width, height = math.inf, Y
        margin = val - 4.0          # the half-area horoball is y >= 4 in the frame
        arc = HorocycleArc(F, Y, 1.0, 0.0)
    else:
        h = hx.h[i]
        width, height = collar_width(2 * h, t), math.nan
        xw = complex(fermi_to_halfplane(width, 0.0))
        yw = complex(fermi_to_halfplane(width, h))
        margin = collar_width(2 * h, 0.5) - val
        arc = HypercycleArc(F, width, h, 0.0)
    if margin < -tol:
        return None
    return dict(x=complex(F.apply_complex(xw)), y=complex(F.apply_complex(yw)),
                P=complex(F.apply_complex(wP)), width=width, height=height,
                margin=margin, arc=arc)


def hexagon_regions(hx: HexagonGeometry, max_shrinks: int = 60,
                    tol: float = 1e-9) -> HexRegions:
    """Collars, tents, the core H-core, the 9-gon H-conv and its barycentre.

    On each side the tent angle is halved until the tent stays inside the
    half-area collar; a hard error is raised if that never happens.
    """
    t = tuple(float(v) for v in t_profile(hx.h))
    xi0 = tuple(float(v) for v in xi_profile(hx.h))
    xi, sides, shrinks = [], [], 0
    for i in range(3):
        angle = xi0[i]
        for k in range(max_shrinks + 1):
            side = _side(hx, i, t[i], angle, tol)
            if side is not None:
                break
            angle *= 0.5
        else:
            raise ContainmentError(f"tent over side {i + 1} never fits the half-area collar")
        shrinks = max(shrinks, k)
        xi.append(angle)
        sides.append(side)

    arcs, conv = [], []
    for i in range(3):
        arcs.append(sides[i]["arc"])
        arcs.append(GeodesicSegment(sides[i]["x"], sides[(i + 1) % 3]["y"]))
        conv += [sides[i]["y"], sides[i]["P"], sides[i]["x"]]
    data = dict(B=karcher_mean(conv), arcs=arcs, conv=conv,
                margins=[sd["margin"] for sd in sides],
                widths=[sd["width"] for sd in sides],
                heights=[sd["height"] for sd in sides],
                x=[sd["x"] for sd in sides], y=[sd["y"] for sd in sides],
                P=[sd["P"] for sd in sides])
    k = shrinks

    B = data["B"]
    core = StarDomain(B, data["arcs"])
    checks = {"tent_margin": min(data["margins"])}
    checks["star_shaped"] = core.star_check(256)
    if not checks["star_shaped"]:
        raise NotStarShapedError("core region is not star-shaped about the barycentre")
    pts, _, _ = core.boundary_samples(32)
    checks["core_boundary_in_hexagon"] = bool(np.all(hx.contains(pts, tol)))
    # H-conv boundary sampled along its geodesic edges lies in H-core
    conv = data["conv"]
    inside = []
    regions = HexRegions(hx, t, tuple(xi), xi0, k, tuple(data["widths"]),
                         tuple(data["heights"]), tuple(data["x"]), tuple(data["y"]),
                         tuple(data["P"]), tuple(data["arcs"]), tuple(conv), B, checks)
    for a, b in zip(conv, conv[1:] + conv[:1]):
        seg = GeodesicSegment(a, b).points(np.linspace(0.0, 1.0, 33))
        inside.append(regions.in_core(seg, 1e-8))
    checks["conv_in_core"] = bool(np.all(np.concatenate(inside)))
    checks["barycenter_in_core"] = bool(regions.in_core(np.array([B]))[0])
    checks["min_incidence"] = float(core.incidence_angles(64).min())
    return regions


# --- pants ---------------------------------------------------------------------


@dataclass(frozen=True)
class PantsPoint:
    """Point of the doubled hexagon: sheet 0 is H, sheet 1 its mirror copy."""

    sheet: int
    z: complex


@dataclass(frozen=True, eq=False)
class PantsGeometry:
    hexagon: HexagonGeometry

    @property
    def boundary_lengths(self) -> tuple:
        return tuple(2.0 * h for h in self.hexagon.h)

    def involution(self, p: PantsPoint) -> PantsPoint:
        """The isometry swapping the two sheets; fixes the seams."""
        return PantsPoint(1 - p.sheet, p.z)

    def on_seam(self, z, tol: float = 1e-9):
        z = np.asarray(z, dtype=complex)
        hit = np.zeros(z.shape, dtype=bool)
        for N in self.hexagon.beta_frames:
            w = N.inverse().apply_complex(z)
            hit |= np.abs(w.real) <= tol * np.abs(w)
        return hit

    def same_point(self, p: PantsPoint, q: PantsPoint, tol: float = 1e-9) -> bool:
        """Equality in dH: sheets agree, or both copies of one seam point."""
        if abs(p.z - q.z) > tol * max(1.0, abs(p.z)):
            return False
        return p.sheet == q.sheet or bool(self.on_seam(p.z, tol))

    def collar(self, i: int, t: float) -> CollarChart:
        return collar_chart(self.boundary_lengths[i], t)

    def collar_coords(self, i: int, p: PantsPoint):
        """(rho, x) in the pants collar of d(alpha_i), x in [0, 2h); at a cusp
        (y, x) in the standard chart of period 1."""
        hx = self.hexagon
        c = hx.alpha_coords(i, p.z)
        if hx.is_cusp(i):
            w = c / 2.0
            x = w.real if p.sheet == 0 else 1.0 - w.real
            return w.imag, x
        rho, x = c
        if p.sheet == 1:
            x = 2.0 * hx.h[i] - x
        return rho, x


def double_to_pants(hx: HexagonGeometry) -> PantsGeometry:
    return PantsGeometry(hx)
