"""Upper half-plane primitives: points, isometries, geodesics, equidistant
curves and the ray/boundary intersection used by cone constructions.

Points are handled as complex numbers internally (``z = x + iy``, ``y > 0``);
:class:`HyperbolicPoint` and :class:`IdealPoint` are the typed wrappers used
at module boundaries. Every routine that takes ``z`` also accepts numpy
arrays of complex values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import brentq

DEFAULT_TOL = 1e-9


class GeometryError(ValueError):
    """Raised when a construction leaves its domain of validity."""


class DegeneracyError(GeometryError):
    pass


class NotStarShapedError(GeometryError):
    pass


@dataclass(frozen=True)
class HyperbolicPoint:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryError(f"non-finite point ({self.x}, {self.y})")
        if not self.y > 0:
            raise GeometryError(f"point not in upper half-plane: y={self.y}")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    @classmethod
    def from_complex(cls, z) -> "HyperbolicPoint":
        z = complex(z)
        return cls(z.real, z.imag)


@dataclass(frozen=True)
class IdealPoint:
    """Point of the boundary circle; ``x = inf`` encodes the point at infinity."""

    x: float

    @property
    def is_infinity(self) -> bool:
        return math.isinf(self.x)


def as_complex(p) -> complex:
    if isinstance(p, HyperbolicPoint):
        return p.z
    if isinstance(p, IdealPoint):
        raise GeometryError("ideal point has no interior coordinate")
    return complex(p)


@dataclass(frozen=True)
class MobiusTransform:
    """Element of PSL(2,R) acting by z -> (az+b)/(cz+d).

    Entries are rescaled to determinant one on construction, with the sign
    fixed so that c > 0, or c == 0 and d > 0.
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        a, b, c, d = (float(v) for v in (self.a, self.b, self.c, self.d))
        det = a * d - b * c
        if not det > 0 or not math.isfinite(det):
            raise GeometryError(f"matrix is not in GL+(2,R): det={det}")
        s = 1.0 / math.sqrt(det)
        if c < 0 or (c == 0 and d < 0):
            s = -s
        object.__setattr__(self, "a", a * s)
        object.__setattr__(self, "b", b * s)
        object.__setattr__(self, "c", c * s)
        object.__setattr__(self, "d", d * s)

    @classmethod
    def from_matrix(cls, m) -> "MobiusTransform":
        m = np.asarray(m, dtype=float)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @classmethod
    def identity(cls) -> "MobiusTransform":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def translation(cls, b: float) -> "MobiusTransform":
        return cls(1.0, b, 0.0, 1.0)

    @classmethod
    def dilation(cls, k: float) -> "MobiusTransform":
        """z -> k z, a translation of length |log k| along the imaginary axis."""
        r = math.sqrt(k)
        return cls(r, 0.0, 0.0, 1.0 / r)

    @classmethod
    def rotation_about_i(cls, angle: float) -> "MobiusTransform":
        """Elliptic element fixing i whose derivative at i is exp(i*angle)."""
        c, s = math.cos(angle / 2), math.sin(angle / 2)
        return cls(c, s, -s, c)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    @property
    def trace(self) -> float:
        return self.a + self.d

    def __matmul__(self, other: "MobiusTransform") -> "MobiusTransform":
        return MobiusTransform.from_matrix(self.matrix @ other.matrix)

    def inverse(self) -> "MobiusTransform":
        return MobiusTransform(self.d, -self.b, -self.c, self.a)

    def conjugate_by_reflection(self) -> "MobiusTransform":
        """r m r with r(z) = -conj(z)."""
        return MobiusTransform(self.a, -self.b, -self.c, self.d)

    def apply_complex(self, z):
        z = np.asarray(z, dtype=complex)
        den = self.c * z + self.d
        if np.any(np.abs(den) < 1e-300):
            raise DegeneracyError("point sent to infinity by Mobius map")
        return (self.a * z + self.b) / den

    def apply(self, p):
        if isinstance(p, IdealPoint):
            return self.apply_ideal(p)
        w = complex(self.apply_complex(as_complex(p)))
        if not w.imag > 0:
            raise DegeneracyError("image left the upper half-plane")
        return HyperbolicPoint.from_complex(w)

    __call__ = apply

    def apply_ideal(self, p: IdealPoint) -> IdealPoint:
        if p.is_infinity:
            return IdealPoint(math.inf if self.c == 0 else self.a / self.c)
        den = self.c * p.x + self.d
        if den == 0:
            return IdealPoint(math.inf)
        return IdealPoint((self.a * p.x + self.b) / den)

    def derivative(self, z):
        z = np.asarray(z, dtype=complex)
        return 1.0 / (self.c * z + self.d) ** 2

    def allclose(self, other: "MobiusTransform", tol: float = 1e-12) -> bool:
        return bool(np.allclose(self.matrix, other.matrix, atol=tol, rtol=0))


def distance(p, q) -> float:
    """Hyperbolic distance; arccosh(1 + |p-q|^2 / (2 y_p y_q)) in a stable form."""
    return float(distance_complex(as_complex(p), as_complex(q)))


def distance_complex(z, w):
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return 2.0 * np.arcsinh(np.abs(z - w) / (2.0 * np.sqrt(z.imag * w.imag)))


def cayley_to_halfplane(w):
    """Disc to half-plane, w -> i(1-w)/(1+w); sends 0 to i."""
    w = np.asarray(w, dtype=complex)
    if np.any(np.abs(w) >= 1.0):
        raise GeometryError("point not inside the unit disc")
    if np.any(np.abs(1.0 + w) < 1e-300):
        raise GeometryError("pole of the Cayley transform at w = -1")
    out = 1j * (1.0 - w) / (1.0 + w)
    return complex(out) if out.ndim == 0 else out


def halfplane_to_disc(z):
    z = np.asarray(z, dtype=complex)
    out = (1j - z) / (1j + z)
    return complex(out) if out.ndim == 0 else out


def disc_distance(u, v):
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    return 2.0 * np.arctanh(np.abs((u - v) / (1.0 - np.conj(u) * v)))


# --- frames -------------------------------------------------------------
#
# A frame is a Mobius map M used as a chart: the standard object (imaginary
# axis, point i, point at infinity) is carried to the object of interest.


def fermi_to_halfplane(rho, x):
    """Fermi coordinates about the imaginary axis: foot i*e^x, signed distance rho
    (positive towards Re z > 0)."""
    rho = np.asarray(rho, dtype=float)
    x = np.asarray(x, dtype=float)
    return np.exp(x) * (np.tanh(rho) + 1j / np.cosh(rho))


def halfplane_to_fermi(z):
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)
    return np.arctanh(np.clip(z.real / r, -1.0, 1.0)), np.log(r)


def frame_at(p, angle: float) -> MobiusTransform:
    """Frame with M(i) = p whose differential turns the upward direction at i
    into the direction ``angle`` at p (Euclidean argument of the tangent)."""
    z = as_complex(p)
    affine = MobiusTransform(z.imag, z.real, 0.0, 1.0)
    return affine @ MobiusTransform.rotation_about_i(angle - math.pi / 2)


def geodesic_frame(p, q) -> MobiusTransform:
    """Frame with M(i) = p and M(i e^d) = q, d = dist(p, q)."""
    zp, zq = as_complex(p), as_complex(q)
    if abs(zp - zq) < 1e-15 * max(1.0, abs(zp)):
        raise DegeneracyError("geodesic frame needs distinct points")
    to_i = MobiusTransform(1.0, -zp.real, 0.0, zp.imag)
    w = complex(halfplane_to_disc(to_i.apply_complex(zq)))
    # the upward direction at i is the negative real direction in the disc
    rot = MobiusTransform.rotation_about_i(math.pi - math.atan2(w.imag, w.real))
    return (rot @ to_i).inverse()


def ideal_geodesic_frame(a: IdealPoint, b: IdealPoint) -> MobiusTransform:
    """Frame with M(0) = a and M(inf) = b."""
    if a.is_infinity and b.is_infinity or a == b:
        raise DegeneracyError("ideal endpoints must be distinct")
    if b.is_infinity:
        return MobiusTransform(1.0, a.x, 0.0, 1.0)
    if a.is_infinity:
        # z -> b - 1/z sends 0 to infinity and infinity to b
        return MobiusTransform(b.x, -1.0, 1.0, 0.0)
    if b.x > a.x:
        return MobiusTransform(b.x, a.x, 1.0, 1.0)
    return MobiusTransform(b.x, -a.x, 1.0, -1.0)


def frame_to_infinity(a: IdealPoint) -> MobiusTransform:
    """Frame whose point at infinity is the ideal point a (M(inf) = a)."""
    if a.is_infinity:
        return MobiusTransform.identity()
    return MobiusTransform(a.x, -1.0, 1.0, 0.0)


# --- curves ----------------------------------------------------------------


class BoundaryArc:
    """Piece of a piecewise curve, parametrised proportionally to arclength on
    [0, 1]. Subclasses implement ``points`` and ``length``."""

    length: float

    def points(self, t):
        raise NotImplementedError

    def point(self, t: float) -> complex:
        return complex(self.points(np.asarray(t, dtype=float)))

    @cached_property
    def samples(self):
        t = np.linspace(0.0, 1.0, 97)
        return t, self.points(t)


@dataclass(frozen=True, eq=False)
class GeodesicSegment(BoundaryArc):
    start: complex
    end: complex

    @cached_property
    def frame(self) -> MobiusTransform:
        return geodesic_frame(self.start, self.end)

    @property
    def length(self) -> float:
        return distance(self.start, self.end)

    def points(self, t):
        t = np.asarray(t, dtype=float)
        return self.frame.apply_complex(1j * np.exp(t * self.length))

    def point_at(self, s):
        """Point at arclength s from ``start``."""
        return self.frame.apply_complex(1j * np.exp(np.asarray(s, dtype=float)))

    def param_of(self, z):
        """Signed arclength fraction of points on the carrying geodesic."""
        w = self.frame.inverse().apply_complex(z)
        return np.log(np.abs(w)) / self.length


@dataclass(frozen=True, eq=False)
class HypercycleArc(BoundaryArc):
    """Points at distance ``rho`` from the frame's geodesic, feet x in [x0, x1]."""

    frame: MobiusTransform
    rho: float
    x0: float
    x1: float

    @property
    def length(self) -> float:
        return math.cosh(self.rho) * abs(self.x1 - self.x0)

    def points(self, t):
        t = np.asarray(t, dtype=float)
        return self.frame.apply_complex(
            fermi_to_halfplane(self.rho, self.x0 + t * (self.x1 - self.x0)))

    def param_of(self, z):
        w = self.frame.inverse().apply_complex(z)
        return (np.log(np.abs(w)) - self.x0) / (self.x1 - self.x0)


@dataclass(frozen=True, eq=False)
class HorocycleArc(BoundaryArc):
    """Horizontal segment at ``height`` in a frame centred at an ideal point."""

    frame: MobiusTransform
    height: float
    x0: float
    x1: float

    @property
    def length(self) -> float:
        return abs(self.x1 - self.x0) / self.height

    def points(self, t):
        t = np.asarray(t, dtype=float)
        return self.frame.apply_complex(self.x0 + t * (self.x1 - self.x0) + 1j * self.height)

    def param_of(self, z):
        w = self.frame.inverse().apply_complex(z)
        return (w.real - self.x0) / (self.x1 - self.x0)


@dataclass(frozen=True)
class EquidistantCurve:
    """Geodesic, hypercycle or horocycle, described in a frame.

    For ``geodesic``/``hypercycle`` the base geodesic is the image of the
    imaginary axis; for ``horocycle`` the base ideal point is the image of
    infinity and ``distance`` is the Euclidean height in the frame.
    """

    kind: str
    frame: MobiusTransform
    distance: float = 0.0

    def __post_init__(self):
        if self.kind not in ("geodesic", "hypercycle", "horocycle"):
            raise GeometryError(f"unknown curve kind {self.kind!r}")
        if self.kind == "hypercycle" and self.distance == 0:
            raise GeometryError("hypercycle needs nonzero distance")
        if self.kind == "horocycle" and not self.distance > 0:
            raise GeometryError("horocycle height must be positive")

    def arc(self, x0: float, x1: float) -> BoundaryArc:
        if self.kind == "horocycle":
            return HorocycleArc(self.frame, self.distance, x0, x1)
        return HypercycleArc(self.frame, self.distance, x0, x1)

    def contains(self, z, tol: float = DEFAULT_TOL) -> bool:
        w = complex(self.frame.inverse().apply_complex(as_complex(z)))
        if self.kind == "horocycle":
            return abs(w.imag - self.distance) <= tol * self.distance
        rho, _ = halfplane_to_fermi(w)
        return abs(float(rho) - self.distance) <= tol


# --- ray casting -------------------------------------------------------------


@dataclass(frozen=True)
class RayHit:
    point: complex
    arclength: float
    angle: float
    arc_index: int
    param: float

    @property
    def grazing_angle(self) -> float:
        """Incidence angle folded into (0, pi/2]."""
        return min(self.angle, math.pi - self.angle)


def ray_boundary_intersection(origin, direction, arcs, max_length: float = 60.0,
                              angle_tol: float = 1e-8) -> RayHit:
    """First point where the geodesic ray from ``origin`` (Euclidean tangent
    ``direction``, complex or angle) meets the piecewise curve ``arcs``."""
    if isinstance(direction, (int, float)):
        angle = float(direction)
    else:
        angle = math.atan2(complex(direction).imag, complex(direction).real)
    ray = frame_at(origin, angle)
    inv = ray.inverse()
    best = None
    for k, arc in enumerate(arcs):
        t, pts = arc.samples
        w = inv.apply_complex(pts)
        re = w.real
        for j in np.flatnonzero((re[:-1] * re[1:] <= 0.0)):
            if re[j] == 0.0 and re[j + 1] == 0.0:
                continue
            if re[j] == 0.0:
                tj = t[j]
            elif re[j + 1] == 0.0:
                tj = t[j + 1]
            else:
                tj = brentq(lambda u: float(inv.apply_complex(arc.point(u)).real),
                            t[j], t[j + 1], xtol=1e-15, rtol=1e-15, maxiter=200)
            hit_w = complex(inv.apply_complex(arc.point(tj)))
            if hit_w.imag < 1.0 - 1e-13:
                continue
            s = math.log(max(hit_w.imag, 1.0))
            if best is None or s < best[0] - 1e-13:
                best = (s, k, tj, hit_w)
    if best is None or best[0] > max_length:
        raise NotStarShapedError("ray does not meet the boundary within the length cap")
    s, k, tj, hit_w = best
    arc = arcs[k]
    dt = 1e-7
    lo, hi = max(tj - dt, 0.0), min(tj + dt, 1.0)
    tangent = complex(inv.apply_complex(arc.point(hi)) - inv.apply_complex(arc.point(lo)))
    # angle between the upward ray direction and the boundary tangent
    inc = abs(math.atan2(tangent.real, tangent.imag))
    if min(inc, math.pi - inc) < angle_tol:
        raise DegeneracyError("tangential ray/boundary intersection")
    return RayHit(complex(ray.apply_complex(hit_w)), s, inc, k, tj)
